// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "himod/error.hpp"
#include "himod/modes.hpp"
#include "himod/quadrature.hpp"

using namespace himod;

namespace
{

constexpr double mm = 1e-3;
constexpr double pi = std::numbers::pi;
const double wr90_a = 22.86 * mm, wr90_b = 10.16 * mm;

ModeId te_mode(int p, int q) { return {ModeKind::TE, p, q}; }
ModeId tm_mode(int p, int q) { return {ModeKind::TM, p, q}; }

// Reference enumeration: all (p, q) up to 12, sorted by cutoff then the tie rule.
std::vector<ModeId> brute_force_order(double a, double b, std::size_t n)
{
  struct C
  {
    ModeId id;
    double k;
  };
  std::vector<C> all;
  for (int p = 0; p <= 12; p++)
  {
    for (int q = 0; q <= 12; q++)
    {
      if (p == 0 && q == 0)
      {
        continue;
      }
      const double k = std::hypot(p * pi / a, q * pi / b);
      all.push_back({te_mode(p, q), k});
      if (p > 0 && q > 0)
      {
        all.push_back({tm_mode(p, q), k});
      }
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const C &l, const C &r) {
    if (l.k != r.k)
    {
      return l.k < r.k;
    }
    if (l.id.kind != r.id.kind)
    {
      return l.id.kind == ModeKind::TE;
    }
    if (l.id.q != r.id.q)
    {
      return l.id.q < r.id.q;
    }
    return l.id.p < r.id.p;
  });
  std::vector<ModeId> out;
  for (std::size_t i = 0; i < n; i++)
  {
    out.push_back(all[i].id);
  }
  return out;
}

}  // namespace

TEST(Modes, Wr90AutoFourOrderAndWavenumbers)
{
  const ModeBasis basis = build_mode_table(wr90_a, wr90_b, AutoSelection{4});
  ASSERT_EQ(basis.size(), 4u);
  EXPECT_EQ(basis.n_te, 4u);
  EXPECT_EQ(basis.n_tm, 0u);
  const ModeId expect[] = {te_mode(1, 0), te_mode(2, 0), te_mode(0, 1), te_mode(1, 1)};
  const double kc[] = {137.4275, 274.8550, 309.2119, 338.3760};
  for (std::size_t n = 0; n < 4; n++)
  {
    EXPECT_EQ(basis.modes[n].id(), expect[n]) << n;
    EXPECT_NEAR(basis.modes[n].kc, kc[n], 1e-3) << n;
  }
}

TEST(Modes, AutoSelectionMatchesBruteForceThenSplitsBlocks)
{
  const ModeBasis basis = build_mode_table(wr90_a, wr90_b, AutoSelection{20});
  const auto order = brute_force_order(wr90_a, wr90_b, 20);
  std::vector<ModeId> te_ids, tm_ids;
  for (const ModeId &id : order)
  {
    (id.kind == ModeKind::TE ? te_ids : tm_ids).push_back(id);
  }
  ASSERT_EQ(basis.n_te, te_ids.size());
  ASSERT_EQ(basis.n_tm, tm_ids.size());
  for (std::size_t n = 0; n < te_ids.size(); n++)
  {
    EXPECT_EQ(basis.te_modes()[n].id(), te_ids[n]);
  }
  for (std::size_t n = 0; n < tm_ids.size(); n++)
  {
    EXPECT_EQ(basis.tm_modes()[n].id(), tm_ids[n]);
  }
}

TEST(Modes, AutoSelectionIsStable)
{
  const ModeBasis a = build_mode_table(wr90_a, wr90_b, AutoSelection{20});
  const ModeBasis b = build_mode_table(wr90_a, wr90_b, AutoSelection{20});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t n = 0; n < a.size(); n++)
  {
    EXPECT_EQ(a.modes[n].id(), b.modes[n].id());
    EXPECT_EQ(a.modes[n].kc, b.modes[n].kc);
  }
}

TEST(Modes, ExplicitFilterList)
{
  const ModeBasis basis =
      build_mode_table(19.05 * mm, 9.525 * mm,
                       std::vector<ModeId>{te_mode(1, 0), te_mode(1, 2), tm_mode(1, 2), te_mode(1, 4), tm_mode(1, 4),
                                           te_mode(1, 6), tm_mode(1, 6)});
  EXPECT_EQ(basis.n_te, 4u);
  EXPECT_EQ(basis.n_tm, 3u);
  EXPECT_EQ(basis.size(), 7u);
  EXPECT_EQ(basis.modes[0].id(), te_mode(1, 0));
  EXPECT_EQ(basis.modes[3].id(), te_mode(1, 6));
  EXPECT_EQ(basis.modes[4].id(), tm_mode(1, 2));
  EXPECT_EQ(basis.max_p(), 1);
  EXPECT_EQ(basis.max_q(), 6);
}

TEST(Modes, SquareGuideTieBreak)
{
  const ModeBasis basis = build_mode_table(1.0, 1.0, AutoSelection{4});
  EXPECT_EQ(basis.modes[0].id(), te_mode(1, 0));
  EXPECT_EQ(basis.modes[1].id(), te_mode(0, 1));
  EXPECT_EQ(basis.modes[2].id(), te_mode(1, 1));
  EXPECT_EQ(basis.modes[3].id(), tm_mode(1, 1));
}

TEST(Modes, WavenumbersAndNormalization)
{
  const Mode m = make_mode(ModeKind::TE, 2, 1, wr90_a, wr90_b);
  EXPECT_DOUBLE_EQ(m.kx, 2 * pi / wr90_a);
  EXPECT_DOUBLE_EQ(m.ky, pi / wr90_b);
  EXPECT_DOUBLE_EQ(m.kc, std::sqrt(m.kx * m.kx + m.ky * m.ky));
  EXPECT_DOUBLE_EQ(m.norm, std::sqrt(4.0 / (wr90_a * wr90_b)));
  const Mode m10 = make_mode(ModeKind::TE, 1, 0, wr90_a, wr90_b);
  EXPECT_DOUBLE_EQ(m10.norm, std::sqrt(2.0 / (wr90_a * wr90_b)));
}

TEST(Modes, InvalidIndicesRejected)
{
  EXPECT_THROW(make_mode(ModeKind::TE, 0, 0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(make_mode(ModeKind::TM, 1, 0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(make_mode(ModeKind::TM, 0, 2, 1.0, 1.0), ConfigError);
  EXPECT_THROW(make_mode(ModeKind::TE, -1, 1, 1.0, 1.0), ConfigError);
  EXPECT_THROW(build_mode_table(1.0, 1.0, std::vector<ModeId>{}), ConfigError);
  EXPECT_THROW(build_mode_table(1.0, 1.0, AutoSelection{0}), ConfigError);
  EXPECT_THROW(build_mode_table(1.0, 1.0, std::vector<ModeId>{te_mode(1, 0), te_mode(1, 0)}),
               ConfigError);
}

TEST(Modes, ParseLabels)
{
  EXPECT_EQ(parse_mode_id("TE10"), te_mode(1, 0));
  EXPECT_EQ(parse_mode_id("TM12"), tm_mode(1, 2));
  EXPECT_EQ(parse_mode_id("TE1,12"), te_mode(1, 12));
  EXPECT_EQ(to_string(te_mode(1, 12)), "TE1,12");
  EXPECT_EQ(to_string(tm_mode(1, 1)), "TM11");
  EXPECT_THROW(parse_mode_id("XY10"), ConfigError);
  EXPECT_THROW(parse_mode_id("TE1"), ConfigError);
  EXPECT_THROW(parse_mode_id(""), ConfigError);
}

TEST(Modes, Te10FieldShape)
{
  const Mode m = make_mode(ModeKind::TE, 1, 0, wr90_a, wr90_b);
  // e_t = B sin(pi x / a) y: maximum on the center line, zero on the side walls.
  const TransverseField c = eval_transverse(m, wr90_a / 2, 0.3 * wr90_b);
  EXPECT_DOUBLE_EQ(c.ex, 0.0);
  EXPECT_NEAR(c.ey, m.norm, 1e-12 * m.norm);
  EXPECT_NEAR(eval_transverse(m, 0.0, 0.5 * wr90_b).ey, 0.0, 1e-12 * m.norm);
  EXPECT_NEAR(eval_transverse(m, wr90_a, 0.5 * wr90_b).ey, 0.0, 1e-12 * m.norm);
  const TransverseField q = eval_transverse(m, wr90_a / 6, 0.1 * wr90_b);
  EXPECT_NEAR(q.ey, 0.5 * m.norm, 1e-12 * m.norm);
}

TEST(Modes, Te10CurlAtCenter)
{
  const Mode m = make_mode(ModeKind::TE, 1, 0, wr90_a, wr90_b);
  const ModeCurls c = eval_curls(m, wr90_a / 2, 0.4 * wr90_b);
  // d/dx (B sin(kx x)) = B kx cos(kx x), zero on the center line and +-B kx at the walls.
  EXPECT_NEAR(c.curl_t_et, 0.0, 1e-12 * m.norm * m.kx);
  EXPECT_NEAR(std::abs(eval_curls(m, 0.0, 0.4 * wr90_b).curl_t_et), m.norm * m.kx,
              1e-12 * m.norm * m.kx);
  EXPECT_EQ(c.curl_gz_x, 0.0);
  EXPECT_EQ(c.curl_gz_y, 0.0);
}

TEST(Modes, Tm11LongitudinalField)
{
  const Mode m = make_mode(ModeKind::TM, 1, 1, wr90_a, wr90_b);
  EXPECT_NEAR(std::abs(eval_longitudinal(m, wr90_a / 2, wr90_b / 2)), m.norm, 1e-12 * m.norm);
  EXPECT_NEAR(eval_longitudinal(m, 0.0, wr90_b / 3), 0.0, 1e-12 * m.norm);
  EXPECT_NEAR(eval_longitudinal(m, wr90_a / 3, wr90_b), 0.0, 1e-12 * m.norm);
  // The gradient-like curl of z e_z vanishes where both derivatives do.
  const ModeCurls c = eval_curls(m, wr90_a / 2, wr90_b / 2);
  EXPECT_NEAR(c.curl_gz_x, 0.0, 1e-10 * m.norm * m.ky);
  EXPECT_NEAR(c.curl_gz_y, 0.0, 1e-10 * m.norm * m.kx);
  EXPECT_EQ(c.curl_t_et, 0.0);
  const Mode e = make_mode(ModeKind::TE, 1, 1, wr90_a, wr90_b);
  EXPECT_THROW(eval_longitudinal(e, 0.0, 0.0), std::invalid_argument);
}

TEST(Modes, TransposedGuideSymmetry)
{
  const Mode m10 = make_mode(ModeKind::TE, 1, 0, wr90_a, wr90_b);
  const Mode m01 = make_mode(ModeKind::TE, 0, 1, wr90_b, wr90_a);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; k++)
  {
    const double x = u(rng) * wr90_a, y = u(rng) * wr90_b;
    const TransverseField f = eval_transverse(m10, x, y);
    const TransverseField g = eval_transverse(m01, y, x);
    // Swapping the axes is a reflection, which flips the sign of a solenoidal field.
    EXPECT_NEAR(g.ex, -f.ey, 1e-12 * m10.norm);
    EXPECT_NEAR(g.ey, -f.ex, 1e-12 * m10.norm);
  }
}

TEST(Modes, CurlsMatchFiniteDifferences)
{
  const ModeBasis basis = build_mode_table(wr90_a, wr90_b, AutoSelection{20});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double hx = 1e-7 * wr90_a, hy = 1e-7 * wr90_a;
  for (const Mode &m : basis.modes)
  {
    const double scale = m.norm * m.kc;
    for (int k = 0; k < 50; k++)
    {
      const double x = u(rng) * wr90_a, y = u(rng) * wr90_b;
      const ModeCurls c = eval_curls(m, x, y);
      const double dey_dx =
          (eval_transverse(m, x + hx, y).ey - eval_transverse(m, x - hx, y).ey) / (2 * hx);
      const double dex_dy =
          (eval_transverse(m, x, y + hy).ex - eval_transverse(m, x, y - hy).ex) / (2 * hy);
      EXPECT_NEAR(c.curl_t_et, dey_dx - dex_dy, 1e-5 * scale) << to_string(m.id());
      if (m.kind == ModeKind::TM)
      {
        const double dez_dy =
            (eval_longitudinal(m, x, y + hy) - eval_longitudinal(m, x, y - hy)) / (2 * hy);
        const double dez_dx =
            (eval_longitudinal(m, x + hx, y) - eval_longitudinal(m, x - hx, y)) / (2 * hx);
        EXPECT_NEAR(c.curl_gz_x, dez_dy, 1e-5 * scale) << to_string(m.id());
        EXPECT_NEAR(c.curl_gz_y, -dez_dx, 1e-5 * scale) << to_string(m.id());
      }
    }
  }
}

TEST(Modes, OrthonormalityTwentyWr90)
{
  const ModeBasis basis = build_mode_table(wr90_a, wr90_b, AutoSelection{20});
  const MappedRule rx = map_rule(gauss_nodes(3 * basis.max_p() + 16), 0.0, wr90_a);
  const MappedRule ry = map_rule(gauss_nodes(3 * basis.max_q() + 16), 0.0, wr90_b);
  const std::size_t M = basis.size();
  double worst_t = 0.0, worst_z = 0.0;
  for (std::size_t n = 0; n < M; n++)
  {
    for (std::size_t m = n; m < M; m++)
    {
      double gt = 0.0, gz = 0.0;
      for (std::size_t j = 0; j < ry.x.size(); j++)
      {
        for (std::size_t i = 0; i < rx.x.size(); i++)
        {
          const double w = rx.w[i] * ry.w[j];
          const TransverseField a = eval_transverse(basis.modes[n], rx.x[i], ry.x[j]);
          const TransverseField b = eval_transverse(basis.modes[m], rx.x[i], ry.x[j]);
          gt += w * (a.ex * b.ex + a.ey * b.ey);
          if (basis.modes[n].kind == ModeKind::TM && basis.modes[m].kind == ModeKind::TM)
          {
            gz += w * eval_longitudinal(basis.modes[n], rx.x[i], ry.x[j]) *
                  eval_longitudinal(basis.modes[m], rx.x[i], ry.x[j]);
          }
        }
      }
      worst_t = std::max(worst_t, std::abs(gt - (n == m ? 1.0 : 0.0)));
      if (basis.modes[n].kind == ModeKind::TM && basis.modes[m].kind == ModeKind::TM)
      {
        worst_z = std::max(worst_z, std::abs(gz - (n == m ? 1.0 : 0.0)));
      }
    }
  }
  EXPECT_LE(worst_t, 1e-10);
  EXPECT_LE(worst_z, 1e-10);
}

TEST(Modes, TangentialFieldVanishesOnWalls)
{
  const ModeBasis basis = build_mode_table(wr90_a, wr90_b, AutoSelection{20});
  for (const Mode &m : basis.modes)
  {
    for (int k = 0; k <= 40; k++)
    {
      const double x = wr90_a * k / 40, y = wr90_b * k / 40;
      EXPECT_LE(std::abs(eval_transverse(m, 0.0, y).ey), 1e-12 * m.norm);
      EXPECT_LE(std::abs(eval_transverse(m, wr90_a, y).ey), 1e-12 * m.norm);
      EXPECT_LE(std::abs(eval_transverse(m, x, 0.0).ex), 1e-12 * m.norm);
      EXPECT_LE(std::abs(eval_transverse(m, x, wr90_b).ex), 1e-12 * m.norm);
    }
  }
}

TEST(Modes, DomainChecked)
{
  const Mode m = make_mode(ModeKind::TE, 1, 0, wr90_a, wr90_b);
  EXPECT_THROW(eval_transverse(m, -1e-6, 0.0), std::out_of_range);
  EXPECT_THROW(eval_transverse(m, 0.0, 2 * wr90_b), std::out_of_range);
}

TEST(Modes, CutoffFrequency)
{
  const Mode m = make_mode(ModeKind::TE, 1, 0, wr90_a, wr90_b);
  EXPECT_NEAR(cutoff_frequency(m), 6.557e9, 1e6);
  EXPECT_NEAR(cutoff_frequency(m, 4.0, 1.0), cutoff_frequency(m) / 2, 1.0);
}
