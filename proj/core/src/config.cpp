// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "himod/error.hpp"

namespace himod
{

namespace
{

using json = nlohmann::json;

[[noreturn]] void fail(const std::string &path, const std::string &what)
{
  throw ConfigError("config: " + (path.empty() ? std::string("<root>") : path) + ": " + what);
}

std::string join(const std::string &path, const std::string &key)
{
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json &obj, const std::string &path, std::set<std::string> allowed)
{
  if (!obj.is_object())
  {
    fail(path, "expected an object");
  }
  for (const auto &item : obj.items())
  {
    if (!allowed.count(item.key()))
    {
      fail(join(path, item.key()), "unknown key");
    }
  }
}

double get_number(const json &obj, const std::string &key, const std::string &path)
{
  const json &v = obj.at(key);
  if (!v.is_number())
  {
    fail(join(path, key), "expected a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x))
  {
    fail(join(path, key), "expected a finite number");
  }
  return x;
}

std::optional<double> opt_number(const json &obj, const std::string &key,
                                 const std::string &path, double scale = 1.0)
{
  if (!obj.contains(key))
  {
    return std::nullopt;
  }
  return get_number(obj, key, path) * scale;
}

long long get_integer(const json &obj, const std::string &key, const std::string &path)
{
  const json &v = obj.at(key);
  if (!v.is_number_integer())
  {
    fail(join(path, key), "expected an integer");
  }
  return v.get<long long>();
}

bool get_bool(const json &obj, const std::string &key, const std::string &path)
{
  const json &v = obj.at(key);
  if (!v.is_boolean())
  {
    fail(join(path, key), "expected true or false");
  }
  return v.get<bool>();
}

std::string get_string(const json &obj, const std::string &key, const std::string &path)
{
  const json &v = obj.at(key);
  if (!v.is_string())
  {
    fail(join(path, key), "expected a string");
  }
  return v.get<std::string>();
}

double length_scale(const std::string &unit, const std::string &path)
{
  if (unit == "m")
  {
    return 1.0;
  }
  if (unit == "mm")
  {
    return 1e-3;
  }
  if (unit == "um")
  {
    return 1e-6;
  }
  fail(path, "unknown length unit '" + unit + "' (expected m, mm or um)");
}

double frequency_scale(const std::string &unit, const std::string &path)
{
  if (unit == "Hz")
  {
    return 1.0;
  }
  if (unit == "kHz")
  {
    return 1e3;
  }
  if (unit == "MHz")
  {
    return 1e6;
  }
  if (unit == "GHz")
  {
    return 1e9;
  }
  fail(path, "unknown frequency unit '" + unit + "' (expected Hz, kHz, MHz or GHz)");
}

ProfileKind parse_kind(const std::string &s, const std::string &path)
{
  for (ProfileKind k : {ProfileKind::constant, ProfileKind::linear, ProfileKind::sinusoidal,
                        ProfileKind::tabulated, ProfileKind::piecewise})
  {
    if (s == to_string(k))
    {
      return k;
    }
  }
  fail(path, "unknown profile kind '" + s + "'");
}

std::vector<TabulatedPoint> read_samples_file(const std::filesystem::path &file, double scale,
                                              const std::string &path)
{
  std::ifstream in(file);
  if (!in)
  {
    throw IoError("cannot read profile samples file '" + file.string() + "'");
  }
  std::vector<TabulatedPoint> out;
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
    double z, a, b;
    if (!(ls >> z >> a >> b))
    {
      // A non-numeric first line is a header.
      if (out.empty() && lineno == 1)
      {
        continue;
      }
      fail(path, file.string() + ":" + std::to_string(lineno) + ": expected z, a, b");
    }
    out.push_back({z * scale, a * scale, b * scale});
  }
  return out;
}

ProfileDescription parse_profile(const json &j, const std::string &path, double scale,
                                 const std::filesystem::path &base_dir)
{
  check_keys(j, path,
             {"kind", "a0", "b0", "aL", "bL", "length", "samples", "samples_file", "segments"});
  if (!j.contains("kind"))
  {
    fail(join(path, "kind"), "missing required key");
  }
  ProfileDescription d;
  d.kind = parse_kind(get_string(j, "kind", path), join(path, "kind"));
  d.a0 = opt_number(j, "a0", path, scale);
  d.b0 = opt_number(j, "b0", path, scale);
  d.aL = opt_number(j, "aL", path, scale);
  d.bL = opt_number(j, "bL", path, scale);
  d.length = opt_number(j, "length", path, scale);

  const bool has_samples = j.contains("samples") || j.contains("samples_file");
  if (has_samples && d.kind != ProfileKind::tabulated)
  {
    fail(path, "samples are only allowed for the tabulated kind");
  }
  if (j.contains("segments") && d.kind != ProfileKind::piecewise)
  {
    fail(join(path, "segments"), "segments are only allowed for the piecewise kind");
  }
  if (d.kind == ProfileKind::tabulated)
  {
    if (j.contains("samples") == j.contains("samples_file"))
    {
      fail(path, "tabulated profile needs exactly one of samples, samples_file");
    }
    if (j.contains("samples"))
    {
      const json &s = j.at("samples");
      if (!s.is_array())
      {
        fail(join(path, "samples"), "expected an array of [z, a, b] triples");
      }
      for (std::size_t i = 0; i < s.size(); i++)
      {
        const std::string p = join(path, "samples[" + std::to_string(i) + "]");
        if (!s[i].is_array() || s[i].size() != 3 || !s[i][0].is_number() ||
            !s[i][1].is_number() || !s[i][2].is_number())
        {
          fail(p, "expected [z, a, b]");
        }
        d.samples.push_back({s[i][0].get<double>() * scale, s[i][1].get<double>() * scale,
                             s[i][2].get<double>() * scale});
      }
    }
    else
    {
      std::filesystem::path file = get_string(j, "samples_file", path);
      if (file.is_relative())
      {
        file = base_dir / file;
      }
      d.samples = read_samples_file(file, scale, join(path, "samples_file"));
    }
  }
  if (d.kind == ProfileKind::piecewise)
  {
    if (!j.contains("segments") || !j.at("segments").is_array() || j.at("segments").empty())
    {
      fail(join(path, "segments"), "piecewise profile needs a nonempty segments array");
    }
    const json &s = j.at("segments");
    for (std::size_t i = 0; i < s.size(); i++)
    {
      d.segments.push_back(
          parse_profile(s[i], join(path, "segments[" + std::to_string(i) + "]"), scale,
                        base_dir));
    }
  }
  return d;
}

ModeSelection parse_modes(const json &j, const std::string &path)
{
  check_keys(j, path, {"auto", "list"});
  if (j.contains("auto") == j.contains("list"))
  {
    fail(path, "expected exactly one of auto, list");
  }
  if (j.contains("auto"))
  {
    const long long n = get_integer(j, "auto", path);
    if (n < 1)
    {
      fail(join(path, "auto"), "mode count must be at least 1");
    }
    return AutoSelection{static_cast<std::size_t>(n)};
  }
  const json &l = j.at("list");
  if (!l.is_array() || l.empty())
  {
    fail(join(path, "list"), "expected a nonempty array of mode labels");
  }
  std::vector<ModeId> ids;
  for (std::size_t i = 0; i < l.size(); i++)
  {
    const std::string p = join(path, "list[" + std::to_string(i) + "]");
    if (!l[i].is_string())
    {
      fail(p, "expected a mode label such as \"TE10\"");
    }
    try
    {
      ids.push_back(parse_mode_id(l[i].get<std::string>()));
    }
    catch (const ConfigError &e)
    {
      fail(p, e.what());
    }
  }
  return ids;
}

MeshConfig parse_mesh(const json &j, const std::string &path, double scale)
{
  check_keys(j, path, {"elements", "breakpoints", "degree"});
  MeshConfig m;
  if (j.contains("elements") == j.contains("breakpoints"))
  {
    fail(path, "expected exactly one of elements, breakpoints");
  }
  if (j.contains("elements"))
  {
    const long long n = get_integer(j, "elements", path);
    if (n < 1)
    {
      fail(join(path, "elements"), "need at least one element");
    }
    m.elements = static_cast<std::size_t>(n);
  }
  else
  {
    const json &b = j.at("breakpoints");
    if (!b.is_array())
    {
      fail(join(path, "breakpoints"), "expected an array");
    }
    for (std::size_t i = 0; i < b.size(); i++)
    {
      if (!b[i].is_number())
      {
        fail(join(path, "breakpoints[" + std::to_string(i) + "]"), "expected a number");
      }
      m.breakpoints.push_back(b[i].get<double>() * scale);
    }
    m.elements = m.breakpoints.empty() ? 0 : m.breakpoints.size() - 1;
  }
  if (j.contains("degree"))
  {
    const long long p = get_integer(j, "degree", path);
    if (p < 2)
    {
      fail(join(path, "degree"), "degree must be at least 2 so that the longitudinal "
                                 "degree (degree - 1) is at least 1");
    }
    if (p > 12)
    {
      fail(join(path, "degree"), "degree above 12 is not supported");
    }
    m.degree = static_cast<int>(p);
  }
  return m;
}

std::vector<double> parse_frequency(const json &j, const std::string &path)
{
  check_keys(j, path, {"start", "stop", "count", "list", "unit"});
  const double scale =
      j.contains("unit") ? frequency_scale(get_string(j, "unit", path), join(path, "unit"))
                         : 1.0;
  std::vector<double> f;
  if (j.contains("list"))
  {
    if (j.contains("start") || j.contains("stop") || j.contains("count"))
    {
      fail(path, "list cannot be combined with start/stop/count");
    }
    const json &l = j.at("list");
    if (!l.is_array())
    {
      fail(join(path, "list"), "expected an array");
    }
    for (std::size_t i = 0; i < l.size(); i++)
    {
      if (!l[i].is_number())
      {
        fail(join(path, "list[" + std::to_string(i) + "]"), "expected a number");
      }
      f.push_back(l[i].get<double>() * scale);
    }
  }
  else
  {
    for (const char *k : {"start", "stop", "count"})
    {
      if (!j.contains(k))
      {
        fail(join(path, k), "missing required key");
      }
    }
    const double f0 = get_number(j, "start", path) * scale;
    const double f1 = get_number(j, "stop", path) * scale;
    const long long n = get_integer(j, "count", path);
    if (n < 1)
    {
      fail(join(path, "count"), "count must be at least 1");
    }
    if (n == 1)
    {
      if (f0 != f1)
      {
        fail(path, "a single sample requires start == stop");
      }
      f.push_back(f0);
    }
    else
    {
      for (long long i = 0; i < n; i++)
      {
        f.push_back(f0 + (f1 - f0) * static_cast<double>(i) / static_cast<double>(n - 1));
      }
      f.back() = f1;
    }
  }
  if (f.empty())
  {
    fail(path, "frequency list is empty");
  }
  for (std::size_t i = 0; i < f.size(); i++)
  {
    if (!(f[i] > 0.0) || !std::isfinite(f[i]))
    {
      fail(path, "frequencies must be positive");
    }
    if (i > 0 && !(f[i] > f[i - 1]))
    {
      fail(path, "frequencies must be strictly increasing");
    }
  }
  return f;
}

Discretization1D make_disc(const MeshConfig &mesh, double length)
{
  if (!mesh.breakpoints.empty())
  {
    if (std::abs(mesh.breakpoints.back() - length) > 1e-9 * length)
    {
      throw ConfigError("config: mesh.breakpoints: last breakpoint must equal the profile "
                        "length");
    }
    std::vector<double> b = mesh.breakpoints;
    b.back() = length;
    return build_discretization(std::move(b), mesh.degree);
  }
  return build_discretization(length, mesh.elements, mesh.degree);
}

}  // namespace

SimulationConfig parse_config(const std::string &text, const std::filesystem::path &base_dir)
{
  json root;
  try
  {
    root = json::parse(text, nullptr, true, true);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  check_keys(root, "",
             {"units", "profile", "modes", "mesh", "frequency", "material", "quadrature",
              "port2_model", "solver", "output", "name", "description"});
  for (const char *k : {"profile", "modes", "mesh", "frequency"})
  {
    if (!root.contains(k))
    {
      fail(k, "missing required section");
    }
  }

  SimulationConfig c;
  const double scale =
      root.contains("units") ? length_scale(get_string(root, "units", ""), "units") : 1.0;
  c.length_unit = scale;
  c.profile_description = parse_profile(root.at("profile"), "profile", scale, base_dir);
  try
  {
    c.profile = make_profile(c.profile_description);
  }
  catch (const ConfigError &e)
  {
    fail("profile", e.what());
  }
  catch (const std::invalid_argument &e)
  {
    fail("profile", e.what());
  }

  c.modes = parse_modes(root.at("modes"), "modes");
  try
  {
    (void)build_mode_table(c.profile.a0(), c.profile.b0(), c.modes);
  }
  catch (const std::invalid_argument &e)
  {
    fail("modes", e.what());
  }

  c.mesh = parse_mesh(root.at("mesh"), "mesh", scale);
  try
  {
    (void)make_disc(c.mesh, c.profile.length());
  }
  catch (const ConfigError &e)
  {
    fail("mesh", e.what());
  }

  c.frequencies = parse_frequency(root.at("frequency"), "frequency");

  if (root.contains("material"))
  {
    const json &m = root.at("material");
    check_keys(m, "material", {"eps_r", "mu_r"});
    c.eps_r = opt_number(m, "eps_r", "material").value_or(1.0);
    c.mu_r = opt_number(m, "mu_r", "material").value_or(1.0);
    if (!(c.eps_r > 0.0) || !(c.mu_r > 0.0))
    {
      fail("material", "eps_r and mu_r must be positive");
    }
  }

  if (root.contains("quadrature"))
  {
    const json &q = root.at("quadrature");
    const std::string p = "quadrature";
    check_keys(q, p, {"nx", "ny", "nz", "rel_tol", "max_order", "adaptive"});
    auto order = [&](const char *k) -> std::optional<int>
    {
      if (!q.contains(k))
      {
        return std::nullopt;
      }
      const long long n = get_integer(q, k, p);
      if (n < 1 || n > max_gauss_order)
      {
        fail(join(p, k), "order must be in [1, " + std::to_string(max_gauss_order) + "]");
      }
      return static_cast<int>(n);
    };
    c.quadrature.nx = order("nx");
    c.quadrature.ny = order("ny");
    c.quadrature.nz = order("nz");
    c.quadrature.max_order = order("max_order");
    c.quadrature.rel_tol = opt_number(q, "rel_tol", p);
    if (c.quadrature.rel_tol && !(*c.quadrature.rel_tol > 0.0))
    {
      fail(join(p, "rel_tol"), "must be positive");
    }
    if (q.contains("adaptive"))
    {
      c.quadrature.adaptive = get_bool(q, "adaptive", p);
    }
  }

  if (root.contains("port2_model"))
  {
    const std::string m = get_string(root, "port2_model", "");
    if (m == "covariant")
    {
      c.port2_model = Port2Model::covariant;
    }
    else if (m == "scaled")
    {
      c.port2_model = Port2Model::scaled;
    }
    else
    {
      fail("port2_model", "expected \"covariant\" or \"scaled\"");
    }
  }

  if (root.contains("solver"))
  {
    const json &s = root.at("solver");
    check_keys(s, "solver", {"rcond_min"});
    c.rcond_min = opt_number(s, "rcond_min", "solver").value_or(c.rcond_min);
    if (!(c.rcond_min >= 0.0))
    {
      fail("solver.rcond_min", "must be non-negative");
    }
  }

  if (root.contains("output"))
  {
    const json &o = root.at("output");
    const std::string p = "output";
    check_keys(o, p, {"directory", "basename", "csv", "touchstone", "manifest"});
    if (o.contains("directory"))
    {
      c.output.directory = get_string(o, "directory", p);
    }
    if (o.contains("basename"))
    {
      c.output.basename = get_string(o, "basename", p);
      if (c.output.basename.empty())
      {
        fail(join(p, "basename"), "must not be empty");
      }
    }
    if (o.contains("csv"))
    {
      c.output.csv = get_bool(o, "csv", p);
    }
    if (o.contains("touchstone"))
    {
      c.output.touchstone = get_bool(o, "touchstone", p);
    }
    if (o.contains("manifest"))
    {
      c.output.manifest = get_bool(o, "manifest", p);
    }
  }
  c.echo = root.dump(2);
  return c;
}

SimulationConfig load_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw IoError("cannot read config file '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : ".");
}

SimulationSetup make_setup(const SimulationConfig &config, unsigned threads)
{
  ModeBasis basis = build_mode_table(config.profile.a0(), config.profile.b0(), config.modes);
  Discretization1D disc = make_disc(config.mesh, config.profile.length());
  AssemblyOptions ao;
  ao.quadrature = default_quadrature(basis, disc);
  const QuadratureConfig &q = config.quadrature;
  ao.quadrature.nx = q.nx.value_or(ao.quadrature.nx);
  ao.quadrature.ny = q.ny.value_or(ao.quadrature.ny);
  ao.quadrature.nz = q.nz.value_or(ao.quadrature.nz);
  ao.quadrature.rel_tol = q.rel_tol.value_or(ao.quadrature.rel_tol);
  ao.quadrature.max_order = q.max_order.value_or(ao.quadrature.max_order);
  ao.quadrature.adaptive = q.adaptive.value_or(ao.quadrature.adaptive);
  ao.eps_r = config.eps_r;
  ao.mu_r = config.mu_r;
  ao.threads = std::max(1u, threads);
  SweepOptions so;
  so.threads = std::max(1u, threads);
  so.eps_r = config.eps_r;
  so.mu_r = config.mu_r;
  so.port2_model = config.port2_model;
  so.solve.rcond_min = config.rcond_min;
  return {config.profile, std::move(basis), std::move(disc), ao, so, config.frequencies};
}

SimulationRun run_simulation(const SimulationConfig &config, unsigned threads)
{
  const auto t0 = std::chrono::steady_clock::now();
  SimulationRun run{make_setup(config, threads), {}, {}, 0.0};
  const SimulationSetup &s = run.setup;
  const AssembledSystem sys = assemble_AB(s.profile, s.basis, s.disc, s.assembly);
  run.assembly = sys.stats;
  run.result = sweep(sys, s.basis, s.disc, s.profile, s.frequencies, s.sweep);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace himod
