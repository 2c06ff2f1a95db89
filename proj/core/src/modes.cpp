// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/modes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "himod/constants.hpp"
#include "himod/error.hpp"

namespace himod
{

namespace
{

void check_domain(const Mode &m, double x, double y)
{
  const double sx = 1e-12 * m.a, sy = 1e-12 * m.b;
  if (!(x >= -sx && x <= m.a + sx && y >= -sy && y <= m.b + sy))
  {
    std::ostringstream msg;
    msg << "modal field evaluated outside the cross-section: (" << x << ", " << y << ")";
    throw std::out_of_range(msg.str());
  }
}

// Trigonometric factors of a mode at a point, in the shifted arguments.
struct Factors
{
  double sx, cx, sy, cy;
};

Factors factors(const Mode &m, double x, double y)
{
  const double u = m.kx * (x - m.a);
  const double v = m.ky * (y - m.b);
  return {std::sin(u), std::cos(u), std::sin(v), std::cos(v)};
}

bool nearly_equal(double x, double y)
{
  return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y));
}

}  // namespace

std::string to_string(const ModeId &id)
{
  std::ostringstream s;
  s << (id.kind == ModeKind::TE ? "TE" : "TM");
  if (id.p > 9 || id.q > 9)
  {
    s << id.p << ',' << id.q;
  }
  else
  {
    s << id.p << id.q;
  }
  return s.str();
}

ModeId parse_mode_id(const std::string &text)
{
  std::string t;
  for (char c : text)
  {
    if (!std::isspace(static_cast<unsigned char>(c)))
    {
      t.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  auto fail = [&]() -> ModeId
  { throw ConfigError("invalid mode label '" + text + "' (expected e.g. TE10, TM11)"); };
  if (t.size() < 4)
  {
    return fail();
  }
  ModeId id{};
  if (t.starts_with("TE"))
  {
    id.kind = ModeKind::TE;
  }
  else if (t.starts_with("TM"))
  {
    id.kind = ModeKind::TM;
  }
  else
  {
    return fail();
  }
  const std::string idx = t.substr(2);
  if (!std::all_of(idx.begin(), idx.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == ','; }))
  {
    return fail();
  }
  const auto comma = idx.find(',');
  try
  {
    if (comma == std::string::npos)
    {
      if (idx.size() != 2)
      {
        return fail();
      }
      id.p = idx[0] - '0';
      id.q = idx[1] - '0';
    }
    else
    {
      id.p = std::stoi(idx.substr(0, comma));
      id.q = std::stoi(idx.substr(comma + 1));
    }
  }
  catch (const std::logic_error &)
  {
    return fail();
  }
  return id;
}

Mode make_mode(ModeKind kind, int p, int q, double a, double b)
{
  if (!(a > 0.0) || !(b > 0.0))
  {
    throw ConfigError("mode guide dimensions must be positive");
  }
  if (p < 0 || q < 0 || (p == 0 && q == 0))
  {
    throw ConfigError("invalid mode indices " + to_string(ModeId{kind, p, q}));
  }
  if (kind == ModeKind::TM && (p == 0 || q == 0))
  {
    throw ConfigError("TM modes require p >= 1 and q >= 1, got " +
                      to_string(ModeId{kind, p, q}));
  }
  Mode m{};
  m.kind = kind;
  m.p = p;
  m.q = q;
  m.a = a;
  m.b = b;
  m.kx = p * constants::pi / a;
  m.ky = q * constants::pi / b;
  m.kc = std::sqrt(m.kx * m.kx + m.ky * m.ky);
  const double ep = (p == 0) ? 1.0 : 2.0;
  const double eq = (q == 0) ? 1.0 : 2.0;
  m.norm = std::sqrt(ep * eq / (a * b));
  return m;
}

int ModeBasis::max_p() const
{
  int v = 0;
  for (const auto &m : modes)
  {
    v = std::max(v, m.p);
  }
  return v;
}

int ModeBasis::max_q() const
{
  int v = 0;
  for (const auto &m : modes)
  {
    v = std::max(v, m.q);
  }
  return v;
}

ModeBasis build_mode_table(double a0, double b0, const ModeSelection &selection)
{
  if (!(a0 > 0.0) || !(b0 > 0.0))
  {
    throw ConfigError("reference cross-section dimensions must be positive");
  }
  std::vector<Mode> ordered;
  if (const auto *sel = std::get_if<AutoSelection>(&selection))
  {
    if (sel->count == 0)
    {
      throw ConfigError("mode selection is empty");
    }
    // The TE_p0 family alone supplies N candidates with p <= N, so indices above N can
    // never be among the N smallest.
    const int n = static_cast<int>(sel->count);
    std::vector<Mode> candidates;
    for (int p = 0; p <= n; p++)
    {
      for (int q = 0; q <= n; q++)
      {
        if (p == 0 && q == 0)
        {
          continue;
        }
        candidates.push_back(make_mode(ModeKind::TE, p, q, a0, b0));
        if (p > 0 && q > 0)
        {
          candidates.push_back(make_mode(ModeKind::TM, p, q, a0, b0));
        }
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Mode &l, const Mode &r)
              {
                if (!nearly_equal(l.kc, r.kc))
                {
                  return l.kc < r.kc;
                }
                if (l.kind != r.kind)
                {
                  return l.kind == ModeKind::TE;
                }
                if (l.q != r.q)
                {
                  return l.q < r.q;
                }
                return l.p < r.p;
              });
    ordered.assign(candidates.begin(), candidates.begin() + n);
  }
  else
  {
    const auto &list = std::get<std::vector<ModeId>>(selection);
    if (list.empty())
    {
      throw ConfigError("mode selection is empty");
    }
    for (std::size_t i = 0; i < list.size(); i++)
    {
      for (std::size_t j = 0; j < i; j++)
      {
        if (list[i] == list[j])
        {
          throw ConfigError("duplicate mode " + to_string(list[i]) + " in selection");
        }
      }
      ordered.push_back(make_mode(list[i].kind, list[i].p, list[i].q, a0, b0));
    }
  }

  ModeBasis basis;
  basis.a0 = a0;
  basis.b0 = b0;
  std::stable_partition(ordered.begin(), ordered.end(),
                        [](const Mode &m) { return m.kind == ModeKind::TE; });
  basis.modes = std::move(ordered);
  basis.n_te = static_cast<std::size_t>(
      std::count_if(basis.modes.begin(), basis.modes.end(),
                    [](const Mode &m) { return m.kind == ModeKind::TE; }));
  basis.n_tm = basis.modes.size() - basis.n_te;
  return basis;
}

TransverseField eval_transverse(const Mode &m, double x, double y)
{
  check_domain(m, x, y);
  const auto f = factors(m, x, y);
  const double c = m.norm / m.kc;
  if (m.kind == ModeKind::TE)
  {
    return {c * m.ky * f.cx * f.sy, -c * m.kx * f.sx * f.cy};
  }
  return {c * m.kx * f.cx * f.sy, c * m.ky * f.sx * f.cy};
}

double eval_longitudinal(const Mode &m, double x, double y)
{
  if (m.kind != ModeKind::TM)
  {
    throw std::invalid_argument("longitudinal field requested for a TE mode");
  }
  check_domain(m, x, y);
  const auto f = factors(m, x, y);
  return m.norm * f.sx * f.sy;
}

ModeCurls eval_curls(const Mode &m, double x, double y)
{
  check_domain(m, x, y);
  const auto f = factors(m, x, y);
  if (m.kind == ModeKind::TE)
  {
    // d/dx(-c kx sx cy) - d/dy(c ky cx sy) = -c (kx^2 + ky^2) cx cy
    return {-m.norm * m.kc * f.cx * f.cy, 0.0, 0.0};
  }
  // TM transverse field is a gradient, so its transverse curl vanishes.
  return {0.0, m.norm * m.ky * f.sx * f.cy, -m.norm * m.kx * f.cx * f.sy};
}

double cutoff_frequency(const Mode &m, double eps_r, double mu_r)
{
  return constants::c0 * m.kc / (2.0 * constants::pi * std::sqrt(eps_r * mu_r));
}

}  // namespace himod
