// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "himod/config.hpp"
#include "himod/constants.hpp"
#include "himod/error.hpp"
#include "himod/io.hpp"
#include "validate.hpp"

namespace fs = std::filesystem;
using namespace himod;

namespace
{

enum ExitCode
{
  exit_ok = 0,
  exit_config = 2,
  exit_numerical = 3,
  exit_io = 4
};

unsigned resolve_threads(int flag)
{
  if (flag > 0)
  {
    return static_cast<unsigned>(flag);
  }
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("HIMOD_NUM_THREADS"))
  {
    char *end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
    {
      throw ConfigError(std::string("HIMOD_NUM_THREADS must be a positive integer, got '") +
                        env + "'");
    }
    n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

int cmd_simulate(const std::string &config_path, const std::string &out_dir, int threads_flag)
{
  const SimulationConfig cfg = load_config(config_path);
  const unsigned threads = resolve_threads(threads_flag);
  const SimulationRun run = run_simulation(cfg, threads);

  fs::path dir = out_dir.empty() ? fs::path(cfg.output.directory) : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
  {
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
  ManifestInfo info;
  info.config_echo = cfg.echo;
  info.n_dofs = run.result.n_dofs;
  info.threads = threads;
  info.assembly = run.assembly;
  info.total_seconds = run.seconds;
  const fs::path base = dir / cfg.output.basename;
  if (cfg.output.csv)
  {
    const fs::path p = base.string() + ".csv";
    write_csv(run.result, p);
    info.outputs.push_back(p.string());
  }
  if (cfg.output.touchstone)
  {
    const fs::path p = base.string() + touchstone_extension(run.result.ports.size());
    write_touchstone(run.result, p);
    info.outputs.push_back(p.string());
  }
  if (cfg.output.manifest)
  {
    const fs::path p = base.string() + ".manifest.json";
    info.outputs.push_back(p.string());
    write_manifest(run.result, info, p);
  }
  std::printf("N_tot = %zu, %zu frequencies, assembly %.3f s, total %.3f s\n",
              run.result.n_dofs, run.result.size(), run.assembly.seconds, run.seconds);
  for (const auto &o : info.outputs)
  {
    std::printf("wrote %s\n", o.c_str());
  }
  if (run.result.n_failed() > 0)
  {
    for (std::size_t k = 0; k < run.result.size(); k++)
    {
      if (!run.result.ok(k))
      {
        std::fprintf(stderr, "error: f = %.17g Hz: %s\n", run.result.frequencies[k],
                     run.result.errors[k].c_str());
      }
    }
    return exit_numerical;
  }
  return exit_ok;
}

int cmd_modes(const std::string &config_path)
{
  const SimulationConfig cfg = load_config(config_path);
  const ModeBasis basis = build_mode_table(cfg.profile.a0(), cfg.profile.b0(), cfg.modes);
  std::printf("reference section %.6g mm x %.6g mm, %zu TE + %zu TM modes\n",
              basis.a0 * 1e3, basis.b0 * 1e3, basis.n_te, basis.n_tm);
  std::printf("%5s  %-8s %12s %14s %14s\n", "index", "mode", "kc [rad/m]", "fc port1 [GHz]",
              "fc port2 [GHz]");
  for (std::size_t n = 0; n < basis.size(); n++)
  {
    const Mode &m = basis.modes[n];
    const Mode m2 = make_mode(m.kind, m.p, m.q, cfg.profile.aL(), cfg.profile.bL());
    std::printf("%5zu  %-8s %12.6f %14.6f %14.6f\n", n, to_string(m.id()).c_str(), m.kc,
                cutoff_frequency(m, cfg.eps_r, cfg.mu_r) * 1e-9,
                cutoff_frequency(m2, cfg.eps_r, cfg.mu_r) * 1e-9);
  }
  return exit_ok;
}

std::vector<Eigen::Vector3d> read_points(const fs::path &path, double scale)
{
  std::ifstream in(path);
  if (!in)
  {
    throw IoError("cannot read points file '" + path.string() + "'");
  }
  std::vector<Eigen::Vector3d> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line))
  {
    lineno++;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
    {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z))
    {
      if (pts.empty() && lineno == 1)
      {
        continue;
      }
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected x, y, z");
    }
    pts.emplace_back(x * scale, y * scale, z * scale);
  }
  return pts;
}

int cmd_field(const std::string &config_path, const std::string &points_path,
              double frequency_ghz, int port, const std::string &mode_label,
              const std::string &out_path, int threads_flag)
{
  const SimulationConfig cfg = load_config(config_path);
  const SimulationSetup s = make_setup(cfg, resolve_threads(threads_flag));
  const double f = frequency_ghz > 0.0 ? frequency_ghz * 1e9 : cfg.frequencies.front();
  if (port != 1 && port != 2)
  {
    throw ConfigError("--port must be 1 or 2");
  }
  std::size_t mode = 0;
  if (!mode_label.empty())
  {
    const ModeId id = parse_mode_id(mode_label);
    auto it = std::find_if(s.basis.modes.begin(), s.basis.modes.end(),
                           [&](const Mode &m) { return m.id() == id; });
    if (it == s.basis.modes.end())
    {
      throw ConfigError("mode " + mode_label + " is not part of the configured basis");
    }
    mode = static_cast<std::size_t>(it - s.basis.modes.begin());
  }
  const auto pts = read_points(points_path, cfg.length_unit);

  const AssembledSystem sys = assemble_AB(s.profile, s.basis, s.disc, s.assembly);
  const PortCoupling pc = assemble_port_coupling(s.basis, s.disc, s.profile, f, cfg.eps_r,
                                                 cfg.mu_r, cfg.port2_model);
  SolveOptions so = s.sweep.solve;
  so.keep_fields = true;
  const FrequencySolution sol = solve_at_frequency(sys, pc, f, so);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(sol.S.rows());
  a(static_cast<Eigen::Index>((port - 1) * s.basis.size() + mode)) = 1.0;
  const auto coeff = excitation_coefficients(sol, a);
  const auto E = reconstruct_field(coeff, s.basis, s.disc, s.profile, pts);

  std::ofstream file;
  std::ostream *out = &std::cout;
  if (!out_path.empty())
  {
    file.open(out_path, std::ios::trunc);
    if (!file)
    {
      throw IoError("cannot open '" + out_path + "' for writing");
    }
    out = &file;
  }
  char buf[512];
  *out << "x_m,y_m,z_m,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im\n";
  for (std::size_t i = 0; i < pts.size(); i++)
  {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  pts[i].x(), pts[i].y(), pts[i].z(), E[i].x().real(), E[i].x().imag(),
                  E[i].y().real(), E[i].y().imag(), E[i].z().real(), E[i].z().imag());
    *out << buf;
  }
  out->flush();
  if (!*out)
  {
    throw IoError("error while writing field output");
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"himod: multimode scattering of smooth rectangular-waveguide tapers"};
  app.require_subcommand(1);
  std::string config_path, out_dir, points_path, mode_label, field_out;
  int threads = 0, port = 1;
  double freq_ghz = 0.0;

  auto *sim = app.add_subcommand("simulate", "assemble, sweep and write S-parameters");
  sim->add_option("--config", config_path, "JSON configuration")->required();
  sim->add_option("--out", out_dir, "output directory (overrides output.directory)");
  sim->add_option("--threads", threads, "worker threads (overrides HIMOD_NUM_THREADS)")
      ->check(CLI::PositiveNumber);

  auto *modes = app.add_subcommand("modes", "print the modal basis and port cutoffs");
  modes->add_option("--config", config_path, "JSON configuration")->required();

  auto *val = app.add_subcommand("validate", "uniform-guide oracle and invariant checks");
  val->add_option("--config", config_path, "JSON configuration")->required();
  val->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto *field = app.add_subcommand("field", "reconstruct the electric field at points");
  field->add_option("--config", config_path, "JSON configuration")->required();
  field->add_option("--points", points_path, "x,y,z per line in config length units")
      ->required();
  field->add_option("--frequency", freq_ghz, "frequency in GHz (default: first sample)");
  field->add_option("--port", port, "excited port (1 or 2)");
  field->add_option("--mode", mode_label, "excited mode label (default: first basis mode)");
  field->add_option("--out", field_out, "output CSV (default: stdout)");
  field->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return exit_config;
  }

  try
  {
    if (*sim)
    {
      return cmd_simulate(config_path, out_dir, threads);
    }
    if (*modes)
    {
      return cmd_modes(config_path);
    }
    if (*val)
    {
      const SimulationConfig cfg = load_config(config_path);
      return tools::run_validation(cfg, resolve_threads(threads), std::cout) ? exit_ok
                                                                             : exit_numerical;
    }
    if (*field)
    {
      return cmd_field(config_path, points_path, freq_ghz, port, mode_label, field_out,
                       threads);
    }
  }
  catch (const ConfigError &e)
  {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  }
  catch (const NumericalError &e)
  {
    if (e.frequency())
    {
      std::fprintf(stderr, "numerical error at f = %.17g Hz: %s\n", *e.frequency(), e.what());
    }
    else
    {
      std::fprintf(stderr, "numerical error: %s\n", e.what());
    }
    return exit_numerical;
  }
  catch (const IoError &e)
  {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return exit_io;
  }
  catch (const std::exception &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_numerical;
  }
  return exit_ok;
}
