// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "himod/constants.hpp"
#include "himod/error.hpp"
#include "himod/ports.hpp"

using namespace himod;

namespace
{

constexpr double mm = 1e-3;
const double wr90_a = 22.86 * mm, wr90_b = 10.16 * mm;
const cplx jay(0.0, 1.0);

ModeId te_mode(int p, int q) { return {ModeKind::TE, p, q}; }
ModeId tm_mode(int p, int q) { return {ModeKind::TM, p, q}; }

double omega(double f) { return 2.0 * constants::pi * f; }

TaperProfile width_taper()
{
  return TaperProfile::linear(0.570 * mm, 0.570 * mm, 0.285 * mm, 0.570 * mm, 1.1 * mm);
}

}  // namespace

TEST(Ports, Wr90Te10At10GHz)
{
  const TaperProfile p = TaperProfile::constant(wr90_a, wr90_b, 50 * mm);
  const ModeBasis b = build_mode_table(wr90_a, wr90_b, AutoSelection{2});
  const PortModeSet s = port_mode_set(b, p, 1, 10e9);
  EXPECT_NEAR(s.k(), 209.585, 1e-3);
  const PortMode &m = s.modes[0];
  EXPECT_NEAR(m.k_cut, 137.4275, 1e-3);
  EXPECT_EQ(m.gamma.real(), 0.0);
  EXPECT_NEAR(m.gamma.imag(), 158.24, 0.01);
  EXPECT_NEAR(m.gamma.imag(), std::sqrt(s.k() * s.k() - m.k_cut * m.k_cut), 1e-12);
  EXPECT_NEAR(m.Y.real(), 2.004e-3, 1e-6);
  EXPECT_NEAR(m.Y.real(), m.gamma.imag() / (omega(10e9) * constants::mu0), 1e-15);
  EXPECT_NEAR(m.Y.imag(), 0.0, 1e-18);
  EXPECT_TRUE(m.propagating);
  EXPECT_NEAR(std::abs(m.A - 1.0 / m.sqrtY), 0.0, 1e-12);
}

TEST(Ports, Wr90Te20EvanescentAt10GHz)
{
  const TaperProfile p = TaperProfile::constant(wr90_a, wr90_b, 50 * mm);
  const ModeBasis b = build_mode_table(wr90_a, wr90_b, AutoSelection{2});
  const PortModeSet s = port_mode_set(b, p, 1, 10e9);
  const PortMode &m = s.modes[1];
  ASSERT_EQ(m.id, te_mode(2, 0));
  EXPECT_FALSE(m.propagating);
  EXPECT_EQ(m.gamma.imag(), 0.0);
  EXPECT_NEAR(m.gamma.real(), 177.819, 1e-3);
  EXPECT_NEAR(m.Y.real(), 0.0, 1e-18);
  EXPECT_LT(m.Y.imag(), 0.0);
  EXPECT_NEAR(m.Y.imag(), -m.gamma.real() / (omega(10e9) * constants::mu0), 1e-15);
  EXPECT_EQ(s.n_propagating(), 1u);
}

TEST(Ports, TmAdmittance)
{
  const TaperProfile p = TaperProfile::constant(wr90_a, wr90_b, 50 * mm);
  const ModeBasis b = build_mode_table(wr90_a, wr90_b, std::vector<ModeId>{tm_mode(1, 1)});
  const double f = 20e9, eps_r = 2.2;
  const PortModeSet s = port_mode_set(b, p, 1, f, eps_r);
  const PortMode &m = s.modes[0];
  EXPECT_TRUE(m.propagating);
  const cplx expect = jay * omega(f) * constants::eps0 * eps_r / m.gamma;
  EXPECT_NEAR(std::abs(m.Y - expect), 0.0, 1e-15 * std::abs(expect));
  EXPECT_GT(m.Y.real(), 0.0);
  EXPECT_NEAR(s.k(), omega(f) * std::sqrt(eps_r) / constants::c0, 1e-9);
}

TEST(Ports, BranchOverSweep)
{
  const TaperProfile p = width_taper();
  const ModeBasis b = build_mode_table(p.a0(), p.b0(), AutoSelection{10});
  for (double f = 100e9; f <= 900e9; f += 7.3e9)
  {
    for (int port : {1, 2})
    {
      const PortModeSet s = port_mode_set(b, p, port, f);
      for (const PortMode &m : s.modes)
      {
        EXPECT_GE(m.gamma.real(), 0.0);
        EXPECT_GE(m.gamma.imag(), 0.0);
        EXPECT_EQ(m.propagating, m.k_cut < s.k());
      }
    }
  }
  EXPECT_EQ(propagation_constant(3.0, 5.0), cplx(0.0, 4.0));
  EXPECT_EQ(propagation_constant(5.0, 3.0), cplx(4.0, 0.0));
}

TEST(Ports, PortTwoUsesOutputSection)
{
  const TaperProfile p = width_taper();
  const ModeBasis b = build_mode_table(p.a0(), p.b0(), std::vector<ModeId>{te_mode(1, 0), te_mode(0, 1)});
  const PortModeSet s2 = port_mode_set(b, p, 2, 375e9);
  EXPECT_DOUBLE_EQ(s2.a, 0.285 * mm);
  EXPECT_DOUBLE_EQ(s2.b, 0.570 * mm);
  EXPECT_NEAR(s2.modes[0].k_cut, constants::pi / (0.285 * mm), 1e-9);
  EXPECT_NEAR(s2.modes[1].k_cut, constants::pi / (0.570 * mm), 1e-9);
  EXPECT_FALSE(s2.modes[0].propagating);
  EXPECT_TRUE(s2.modes[1].propagating);
}

TEST(Ports, CutoffCollisionRejected)
{
  const TaperProfile p = TaperProfile::constant(wr90_a, wr90_b, 50 * mm);
  const ModeBasis b = build_mode_table(wr90_a, wr90_b, AutoSelection{1});
  const double fc = cutoff_frequency(b.modes[0]);
  EXPECT_THROW(port_mode_set(b, p, 1, fc), NumericalError);
  try
  {
    port_mode_set(b, p, 1, fc);
  }
  catch (const NumericalError &e)
  {
    ASSERT_TRUE(e.frequency().has_value());
    EXPECT_EQ(*e.frequency(), fc);
  }
  EXPECT_NO_THROW(port_mode_set(b, p, 1, fc * 1.001));
  EXPECT_THROW(port_mode_set(b, p, 1, -1.0), ConfigError);
  EXPECT_THROW(port_mode_set(b, p, 3, 1e9), std::invalid_argument);
}

TEST(Ports, UniformDevicePortsAgree)
{
  const TaperProfile p = TaperProfile::constant(wr90_a, wr90_b, 50 * mm);
  const ModeBasis b = build_mode_table(wr90_a, wr90_b, AutoSelection{8});
  const PortModeSet s1 = port_mode_set(b, p, 1, 11e9), s2 = port_mode_set(b, p, 2, 11e9);
  for (std::size_t n = 0; n < b.size(); n++)
  {
    EXPECT_EQ(s1.modes[n].gamma, s2.modes[n].gamma);
    EXPECT_EQ(s1.modes[n].Y, s2.modes[n].Y);
    EXPECT_NEAR(std::abs(s2.modes[n].A - 1.0 / s2.modes[n].sqrtY), 0.0,
                1e-12 * std::abs(s2.modes[n].A));
  }
}

TEST(Ports, PowerNormalization)
{
  // Unequal width and height scaling, with both propagating and evanescent modes.
  for (const TaperProfile &p :
       {width_taper(), TaperProfile::linear(22.86 * mm, 11.43 * mm, 28.448 * mm, 14.224 * mm, 20 * mm)})
  {
    const ModeBasis b = build_mode_table(p.a0(), p.b0(), AutoSelection{8});
    const double f = p.a0() < 1 * mm ? 375e9 : 10e9;
    for (Port2Model model : {Port2Model::covariant, Port2Model::scaled})
    {
      const std::size_t M = b.size();
      const auto P1 = power_normalization(port_mode_set(b, p, 1, f), model);
      const auto P2 = power_normalization(port_mode_set(b, p, 2, f), model);
      EXPECT_LE((P1 - Eigen::MatrixXcd::Identity(M, M)).cwiseAbs().maxCoeff(), 1e-10)
          << to_string(model);
      EXPECT_LE((P2 + Eigen::MatrixXcd::Identity(M, M)).cwiseAbs().maxCoeff(), 1e-10)
          << to_string(model);
    }
  }
}

TEST(Ports, ModelsCoincideForUniformScaling)
{
  const TaperProfile p = TaperProfile::linear(10 * mm, 5 * mm, 15 * mm, 7.5 * mm, 30 * mm);
  const ModeBasis b = build_mode_table(p.a0(), p.b0(), AutoSelection{10});
  const PortModeSet s2 = port_mode_set(b, p, 2, 25e9);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 0; n < b.size(); n++)
  {
    for (int k = 0; k < 10; k++)
    {
      const double x = u(rng) * p.a0(), y = u(rng) * p.b0();
      const PortTrace c = port_trace(s2, n, x, y, Port2Model::covariant);
      const PortTrace s = port_trace(s2, n, x, y, Port2Model::scaled);
      const double scale = std::abs(c.ex) + std::abs(c.ey) + std::abs(c.hx) + std::abs(c.hy);
      EXPECT_LE(std::abs(c.ex - s.ex) + std::abs(c.ey - s.ey), 1e-12 * scale);
      EXPECT_LE(std::abs(c.hx - s.hx) + std::abs(c.hy - s.hy), 1e-12 * scale);
    }
  }
}

TEST(Ports, PortOneCouplingIsDiagonalOnUniformGuide)
{
  const TaperProfile p = TaperProfile::constant(wr90_a, wr90_b, 30 * mm);
  const ModeBasis b = build_mode_table(wr90_a, wr90_b, AutoSelection{10});
  const Discretization1D d = build_discretization(p.length(), 6, 2);
  const PortCoupling pc = assemble_port_coupling(b, d, p, 10e9);
  const GlobalIndexing g = make_indexing(b, d);
  const std::size_t M = b.size();
  ASSERT_EQ(static_cast<std::size_t>(pc.C.rows()), g.size());
  ASSERT_EQ(static_cast<std::size_t>(pc.C.cols()), 2 * M);
  const std::size_t last = d.n_lt() - 1;
  for (std::size_t i = 0; i < g.size(); i++)
  {
    const auto e = g.decode(i);
    const bool port1_row = !e.longitudinal && e.dof == 0;
    const bool port2_row = !e.longitudinal && e.dof == last;
    for (std::size_t m = 0; m < M; m++)
    {
      const cplx c1 = pc.C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
      const cplx c2 = pc.C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(M + m));
      if (!port1_row)
      {
        EXPECT_EQ(c1, cplx(0.0));
      }
      if (!port2_row)
      {
        EXPECT_EQ(c2, cplx(0.0));
      }
      const cplx expect = e.mode == m ? -pc.port1.modes[m].sqrtY : cplx(0.0);
      const double scale = std::abs(pc.port1.modes[m].sqrtY);
      if (port1_row)
      {
        EXPECT_LE(std::abs(c1 - expect), 1e-12 * scale) << i << ", " << m;
      }
      if (port2_row)
      {
        // Same magnitude at the far port of a uniform guide.
        EXPECT_LE(std::abs(std::abs(c2) - std::abs(expect)), 1e-12 * scale) << i << ", " << m;
      }
    }
  }
}

TEST(Ports, CouplingRecordsFrequencyAndModel)
{
  const TaperProfile p = width_taper();
  const ModeBasis b = build_mode_table(p.a0(), p.b0(), AutoSelection{4});
  const Discretization1D d = build_discretization(p.length(), 5, 2);
  const PortCoupling pc = assemble_port_coupling(b, d, p, 350e9, 1.0, 1.0, Port2Model::scaled);
  EXPECT_EQ(pc.frequency, 350e9);
  EXPECT_EQ(pc.model, Port2Model::scaled);
  EXPECT_EQ(pc.port1.port, 1);
  EXPECT_EQ(pc.port2.port, 2);
  EXPECT_STREQ(to_string(Port2Model::covariant), "covariant");
}
