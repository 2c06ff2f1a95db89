// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "himod/error.hpp"

namespace himod
{

namespace
{

std::string fmt17(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string &s)
{
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

std::vector<std::string> split_csv(const std::string &line)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line)
  {
    if (c == '"')
    {
      quoted = !quoted;
    }
    else if (c == ',' && !quoted)
    {
      out.push_back(cur);
      cur.clear();
    }
    else if (c != '\r')
    {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::ofstream open_out(const std::filesystem::path &path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void finish(std::ofstream &out, const std::filesystem::path &path)
{
  out.flush();
  if (!out)
  {
    throw IoError("error while writing '" + path.string() + "'");
  }
}

double parse_double(const std::string &s, const std::filesystem::path &path)
{
  try
  {
    std::size_t n = 0;
    const double v = std::stod(s, &n);
    if (n != s.size())
    {
      throw std::invalid_argument(s);
    }
    return v;
  }
  catch (const std::exception &)
  {
    throw IoError("malformed number '" + s + "' in '" + path.string() + "'");
  }
}

}  // namespace

void write_csv(const ScatteringResult &result, const std::filesystem::path &path)
{
  std::ofstream out = open_out(path);
  out << "freq_hz,port_i,mode_i,port_j,mode_j,re,im,mag_db,phase_rad\n";
  const std::size_t n = result.ports.size();
  for (std::size_t k = 0; k < result.size(); k++)
  {
    if (!result.ok(k))
    {
      continue;
    }
    const Eigen::MatrixXcd &S = result.samples[k].S;
    const std::string f = fmt17(result.frequencies[k]);
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = 0; j < n; j++)
      {
        const auto s = S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out << f << ',' << result.ports[i].port << ',' << csv_field(to_string(result.ports[i].mode))
            << ',' << result.ports[j].port << ',' << csv_field(to_string(result.ports[j].mode))
            << ',' << fmt17(s.real()) << ',' << fmt17(s.imag()) << ','
            << fmt17(20.0 * std::log10(std::abs(s))) << ',' << fmt17(std::arg(s)) << '\n';
      }
    }
  }
  finish(out, path);
}

std::vector<CsvRow> read_csv(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw IoError("cannot read '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("freq_hz,", 0) != 0)
  {
    throw IoError("'" + path.string() + "' is not a himod CSV file");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line))
  {
    if (line.empty())
    {
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 9)
    {
      throw IoError("malformed CSV row in '" + path.string() + "'");
    }
    rows.push_back({parse_double(f[0], path), static_cast<int>(parse_double(f[1], path)), f[2],
                    static_cast<int>(parse_double(f[3], path)), f[4],
                    {parse_double(f[5], path), parse_double(f[6], path)}});
  }
  return rows;
}

std::string touchstone_extension(std::size_t n_ports)
{
  return ".s" + std::to_string(n_ports) + "p";
}

void write_touchstone(const ScatteringResult &result, const std::filesystem::path &path)
{
  std::ofstream out = open_out(path);
  const std::size_t n = result.ports.size();
  out << "! himod generalized scattering matrix, power-wave normalized\n";
  for (std::size_t i = 0; i < n; i++)
  {
    out << "! port " << i + 1 << ": physical port " << result.ports[i].port << ", mode "
        << to_string(result.ports[i].mode) << '\n';
  }
  for (std::size_t k = 0; k < result.size(); k++)
  {
    if (!result.ok(k))
    {
      out << "! sample at " << fmt17(result.frequencies[k]) << " Hz failed: " << result.errors[k]
          << '\n';
    }
  }
  out << "# HZ S RI R 1\n";
  auto pair = [&](const std::complex<double> &s)
  { out << ' ' << fmt17(s.real()) << ' ' << fmt17(s.imag()); };
  for (std::size_t k = 0; k < result.size(); k++)
  {
    if (!result.ok(k))
    {
      continue;
    }
    const Eigen::MatrixXcd &S = result.samples[k].S;
    out << fmt17(result.frequencies[k]);
    if (n == 2)
    {
      pair(S(0, 0));
      pair(S(1, 0));
      pair(S(0, 1));
      pair(S(1, 1));
      out << '\n';
      continue;
    }
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = 0; j < n; j++)
      {
        if (j > 0 && j % 4 == 0)
        {
          out << '\n';
        }
        pair(S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
      out << '\n';
    }
  }
  finish(out, path);
}

TouchstoneData read_touchstone(const std::filesystem::path &path)
{
  TouchstoneData data;
  const std::string ext = path.extension().string();
  if (ext.size() < 4 || ext[0] != '.' || (ext[1] != 's' && ext[1] != 'S') ||
      (ext.back() != 'p' && ext.back() != 'P'))
  {
    throw IoError("'" + path.string() + "' does not have a .sNp extension");
  }
  data.n_ports = static_cast<std::size_t>(parse_double(ext.substr(2, ext.size() - 3), path));
  std::ifstream in(path);
  if (!in)
  {
    throw IoError("cannot read '" + path.string() + "'");
  }
  const std::size_t n = data.n_ports;
  const std::size_t per = 1 + 2 * n * n;
  std::vector<double> values;
  std::string line;
  bool option_seen = false;
  while (std::getline(in, line))
  {
    const auto bang = line.find('!');
    if (bang != std::string::npos)
    {
      line.resize(bang);
    }
    std::istringstream ls(line);
    std::string tok;
    if (line.find('#') != std::string::npos)
    {
      std::string opt;
      while (ls >> tok)
      {
        opt += tok + " ";
      }
      if (opt != "# HZ S RI R 1 ")
      {
        throw IoError("unsupported Touchstone option line '" + opt + "'");
      }
      option_seen = true;
      continue;
    }
    while (ls >> tok)
    {
      values.push_back(parse_double(tok, path));
    }
  }
  if (!option_seen || values.size() % per != 0)
  {
    throw IoError("malformed Touchstone file '" + path.string() + "'");
  }
  for (std::size_t r = 0; r < values.size() / per; r++)
  {
    const double *v = &values[r * per];
    data.frequencies.push_back(v[0]);
    Eigen::MatrixXcd S(n, n);
    for (std::size_t t = 0; t < n * n; t++)
    {
      std::size_t i = t / n, j = t % n;
      if (n == 2)
      {
        std::swap(i, j);  // column-major order for two-port data
      }
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {v[1 + 2 * t],
                                                                       v[2 + 2 * t]};
    }
    data.S.push_back(S);
  }
  return data;
}

void write_manifest(const ScatteringResult &result, const ManifestInfo &info,
                    const std::filesystem::path &path)
{
  using json = nlohmann::json;
  json m;
  m["tool"] = "himod";
  try
  {
    m["config"] = json::parse(info.config_echo.empty() ? "{}" : info.config_echo);
  }
  catch (const json::parse_error &)
  {
    m["config"] = info.config_echo;
  }
  m["n_dofs"] = info.n_dofs;
  m["threads"] = info.threads;
  json ports = json::array();
  for (const auto &p : result.ports)
  {
    ports.push_back({{"port", p.port}, {"mode", to_string(p.mode)}});
  }
  m["ports"] = ports;
  m["assembly"] = {{"seconds", info.assembly.seconds},
                   {"max_order_x", info.assembly.max_nx},
                   {"max_order_y", info.assembly.max_ny},
                   {"max_order_z", info.assembly.max_nz},
                   {"escalations", info.assembly.escalations}};
  json samples = json::array();
  for (std::size_t k = 0; k < result.size(); k++)
  {
    json s{{"frequency_hz", result.frequencies[k]}, {"ok", result.ok(k)}};
    if (result.ok(k))
    {
      s["seconds"] = result.samples[k].seconds;
      s["residual"] = result.samples[k].residual;
      s["rcond"] = result.samples[k].rcond;
    }
    else
    {
      s["error"] = result.errors[k];
    }
    samples.push_back(s);
  }
  m["samples"] = samples;
  m["failed_samples"] = result.n_failed();
  m["total_seconds"] = info.total_seconds;
  m["outputs"] = info.outputs;
  std::ofstream out = open_out(path);
  out << m.dump(2) << '\n';
  finish(out, path);
}

void write_triplets(const Eigen::SparseMatrix<double> &m, const std::filesystem::path &path)
{
  std::ofstream out = open_out(path);
  for (Eigen::Index c = 0; c < m.outerSize(); c++)
  {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
    {
      out << it.row() << ' ' << it.col() << ' ' << fmt17(it.value()) << '\n';
    }
  }
  finish(out, path);
}

}  // namespace himod
