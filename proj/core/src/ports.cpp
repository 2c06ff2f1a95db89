// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/ports.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "himod/constants.hpp"
#include "himod/error.hpp"
#include "himod/quadrature.hpp"

namespace himod
{

namespace
{

constexpr cplx j1{0.0, 1.0};

int port_quadrature_order(int max_index)
{
  return 3 * max_index + 16;
}

// Mode of the physical port section with the same labels as basis mode n.
Mode physical_mode(const PortModeSet &set, std::size_t n)
{
  const ModeId &id = set.modes[n].id;
  return make_mode(id.kind, id.p, id.q, set.a, set.b);
}

}  // namespace

const char *to_string(Port2Model model)
{
  return model == Port2Model::covariant ? "covariant" : "scaled";
}

double PortModeSet::k() const
{
  return 2.0 * constants::pi * frequency * std::sqrt(eps * mu);
}

std::size_t PortModeSet::n_propagating() const
{
  std::size_t n = 0;
  for (const auto &m : modes)
  {
    n += m.propagating ? 1 : 0;
  }
  return n;
}

cplx propagation_constant(double k_cut, double k)
{
  const double d = k_cut * k_cut - k * k;
  if (d >= 0.0)
  {
    return {std::sqrt(d), 0.0};
  }
  return {0.0, std::sqrt(-d)};
}

PortModeSet port_mode_set(const ModeBasis &basis, const TaperProfile &profile, int port,
                          double frequency, double eps_r, double mu_r)
{
  if (port != 1 && port != 2)
  {
    throw std::invalid_argument("port index must be 1 or 2");
  }
  if (!(frequency > 0.0))
  {
    throw ConfigError("frequency must be positive");
  }
  PortModeSet set;
  set.port = port;
  set.frequency = frequency;
  set.a0 = basis.a0;
  set.b0 = basis.b0;
  set.a = port == 1 ? profile.a0() : profile.aL();
  set.b = port == 1 ? profile.b0() : profile.bL();
  set.eps = constants::eps0 * eps_r;
  set.mu = constants::mu0 * mu_r;
  const double omega = 2.0 * constants::pi * frequency;
  const double k = set.k();
  for (const Mode &bm : basis.modes)
  {
    const Mode m = make_mode(bm.kind, bm.p, bm.q, set.a, set.b);
    PortMode pm;
    pm.id = m.id();
    pm.k_cut = m.kc;
    pm.gamma = propagation_constant(m.kc, k);
    if (std::abs(m.kc - k) <= 1e-8 * k)
    {
      std::ostringstream msg;
      msg.precision(12);
      msg << "cutoff collision: mode " << to_string(pm.id) << " at port " << port
          << " is at cutoff for f = " << frequency << " Hz";
      throw NumericalError(msg.str(), frequency);
    }
    pm.propagating = pm.gamma.imag() > 0.0;
    pm.Y = m.kind == ModeKind::TE ? pm.gamma / (j1 * omega * set.mu)
                                  : j1 * omega * set.eps / pm.gamma;
    pm.sqrtY = std::sqrt(pm.Y);
    pm.A = port == 1 ? 1.0 / pm.sqrtY
                     : std::sqrt(basis.a0 * basis.b0 / (pm.Y * set.a * set.b));
    set.modes.push_back(pm);
  }
  return set;
}

PortTrace port_trace(const PortModeSet &set, std::size_t n, double x, double y,
                     Port2Model model)
{
  const PortMode &pm = set.modes.at(n);
  const Mode ref = make_mode(pm.id.kind, pm.id.p, pm.id.q, set.a0, set.b0);
  if (set.port == 1)
  {
    const auto e = eval_transverse(ref, x, y);
    return {e.ex / pm.sqrtY, e.ey / pm.sqrtY, -pm.sqrtY * e.ey, pm.sqrtY * e.ex};
  }
  // Transverse components pull back with j_L^{-1} = diag(a/a0, b/b0).
  const double jx = set.a / set.a0, jy = set.b / set.b0;
  if (model == Port2Model::covariant)
  {
    const Mode phys = physical_mode(set, n);
    const double xp = std::min(x * jx, set.a), yp = std::min(y * jy, set.b);
    const auto e = eval_transverse(phys, xp, yp);
    return {jx * e.ex / pm.sqrtY, jy * e.ey / pm.sqrtY, jx * pm.sqrtY * e.ey,
            -jy * pm.sqrtY * e.ex};
  }
  const auto e = eval_transverse(ref, x, y);
  return {pm.A * jx * e.ex, pm.A * jy * e.ey, pm.A * pm.Y * jx * e.ey,
          -pm.A * pm.Y * jy * e.ex};
}

Eigen::MatrixXcd power_normalization(const PortModeSet &set, Port2Model model)
{
  int pmax = 0, qmax = 0;
  for (const auto &m : set.modes)
  {
    pmax = std::max(pmax, m.id.p);
    qmax = std::max(qmax, m.id.q);
  }
  const MappedRule rx = map_rule(gauss_nodes(port_quadrature_order(pmax)), 0.0, set.a0);
  const MappedRule ry = map_rule(gauss_nodes(port_quadrature_order(qmax)), 0.0, set.b0);
  const std::size_t M = set.modes.size();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M, M);
  std::vector<PortTrace> tr(M);
  for (std::size_t j = 0; j < ry.x.size(); j++)
  {
    for (std::size_t i = 0; i < rx.x.size(); i++)
    {
      for (std::size_t n = 0; n < M; n++)
      {
        tr[n] = port_trace(set, n, rx.x[i], ry.x[j], model);
      }
      const double w = rx.w[i] * ry.w[j];
      for (std::size_t n = 0; n < M; n++)
      {
        for (std::size_t m = 0; m < M; m++)
        {
          P(n, m) += w * (tr[n].ex * tr[m].hy - tr[n].ey * tr[m].hx);
        }
      }
    }
  }
  return P;
}

PortCoupling assemble_port_coupling(const ModeBasis &basis, const Discretization1D &disc,
                                    const TaperProfile &profile, double frequency,
                                    double eps_r, double mu_r, Port2Model model)
{
  PortCoupling pc;
  pc.frequency = frequency;
  pc.model = model;
  pc.port1 = port_mode_set(basis, profile, 1, frequency, eps_r, mu_r);
  pc.port2 = port_mode_set(basis, profile, 2, frequency, eps_r, mu_r);

  const GlobalIndexing idx = make_indexing(basis, disc);
  const std::size_t M = basis.size();
  pc.C = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(idx.size()),
                                static_cast<Eigen::Index>(2 * M));

  const MappedRule rx =
      map_rule(gauss_nodes(port_quadrature_order(basis.max_p())), 0.0, basis.a0);
  const MappedRule ry =
      map_rule(gauss_nodes(port_quadrature_order(basis.max_q())), 0.0, basis.b0);
  Eigen::MatrixXcd c1 = Eigen::MatrixXcd::Zero(M, M), c2 = Eigen::MatrixXcd::Zero(M, M);
  std::vector<TransverseField> et(M);
  std::vector<PortTrace> t1(M), t2(M);
  for (std::size_t j = 0; j < ry.x.size(); j++)
  {
    for (std::size_t i = 0; i < rx.x.size(); i++)
    {
      const double x = rx.x[i], y = ry.x[j], w = rx.w[i] * ry.w[j];
      for (std::size_t n = 0; n < M; n++)
      {
        et[n] = eval_transverse(basis.modes[n], x, y);
        t1[n] = port_trace(pc.port1, n, x, y, model);
        t2[n] = port_trace(pc.port2, n, x, y, model);
      }
      for (std::size_t m = 0; m < M; m++)
      {
        for (std::size_t n = 0; n < M; n++)
        {
          // h x (-z) = (-h_y, h_x) at port 1, h x z = (h_y, -h_x) at port 2.
          c1(m, n) += w * (-et[m].ex * t1[n].hy + et[m].ey * t1[n].hx);
          c2(m, n) += w * (et[m].ex * t2[n].hy - et[m].ey * t2[n].hx);
        }
      }
    }
  }
  // Lagrange nodes include the element ends, so only the end functions are nonzero there.
  const std::size_t l_end = disc.n_lt() - 1;
  for (std::size_t m = 0; m < M; m++)
  {
    for (std::size_t n = 0; n < M; n++)
    {
      pc.C(static_cast<Eigen::Index>(idx.transverse(m, 0)), static_cast<Eigen::Index>(n)) =
          c1(m, n);
      pc.C(static_cast<Eigen::Index>(idx.transverse(m, l_end)),
           static_cast<Eigen::Index>(M + n)) = c2(m, n);
    }
  }
  return pc;
}

}  // namespace himod
