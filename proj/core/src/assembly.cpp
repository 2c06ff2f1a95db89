// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/assembly.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "himod/error.hpp"
#include "himod/transform.hpp"

namespace himod
{

namespace
{

std::vector<double> lagrange_nodes(int degree)
{
  if (degree <= 2)
  {
    std::vector<double> x(degree + 1);
    for (int i = 0; i <= degree; i++)
    {
      x[i] = -1.0 + 2.0 * i / degree;
    }
    return x;
  }
  return gauss_lobatto_points(degree + 1);
}

void eval_lagrange(const std::vector<double> &nodes, double xi, std::span<double> value,
                   std::span<double> dvalue)
{
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; i++)
  {
    double v = 1.0, d = 0.0;
    for (std::size_t j = 0; j < n; j++)
    {
      if (j == i)
      {
        continue;
      }
      const double inv = 1.0 / (nodes[i] - nodes[j]);
      // product rule: d(v * (xi - x_j) inv) = d * (xi - x_j) inv + v inv
      d = d * (xi - nodes[j]) * inv + v * inv;
      v *= (xi - nodes[j]) * inv;
    }
    value[i] = v;
    if (!dvalue.empty())
    {
      dvalue[i] = d;
    }
  }
}

// Modal values at the tensor-product cross-section points of one (nx, ny) rule.
struct TransverseTable
{
  std::size_t npts = 0;
  std::vector<double> w, xc, yc;
  std::vector<double> ex, ey, cz;  // [pt * M + n]
  std::vector<double> ez, gx, gy;  // [pt * T + m]
};

TransverseTable build_table(const ModeBasis &basis, int nx, int ny)
{
  const MappedRule rx = map_rule(gauss_nodes(nx), 0.0, basis.a0);
  const MappedRule ry = map_rule(gauss_nodes(ny), 0.0, basis.b0);
  const std::size_t M = basis.size(), T = basis.n_tm;
  TransverseTable t;
  t.npts = rx.x.size() * ry.x.size();
  t.w.resize(t.npts);
  t.xc.resize(t.npts);
  t.yc.resize(t.npts);
  t.ex.resize(t.npts * M);
  t.ey.resize(t.npts * M);
  t.cz.resize(t.npts * M);
  t.ez.resize(t.npts * T);
  t.gx.resize(t.npts * T);
  t.gy.resize(t.npts * T);
  std::size_t pt = 0;
  for (std::size_t j = 0; j < ry.x.size(); j++)
  {
    for (std::size_t i = 0; i < rx.x.size(); i++, pt++)
    {
      const double x = rx.x[i], y = ry.x[j];
      t.w[pt] = rx.w[i] * ry.w[j];
      t.xc[pt] = x - 0.5 * basis.a0;
      t.yc[pt] = y - 0.5 * basis.b0;
      for (std::size_t n = 0; n < M; n++)
      {
        const Mode &m = basis.modes[n];
        const auto e = eval_transverse(m, x, y);
        const auto c = eval_curls(m, x, y);
        t.ex[pt * M + n] = e.ex;
        t.ey[pt * M + n] = e.ey;
        t.cz[pt * M + n] = c.curl_t_et;
        if (m.kind == ModeKind::TM)
        {
          const std::size_t k = n - basis.n_te;
          t.ez[pt * T + k] = eval_longitudinal(m, x, y);
          t.gx[pt * T + k] = c.curl_gz_x;
          t.gy[pt * T + k] = c.curl_gz_y;
        }
      }
    }
  }
  return t;
}

// Cross-section integrals of the modal products at one axial point.
struct ModalBlocks
{
  Eigen::MatrixXd PP, PQ, QQ, PR, QR, RR, VV, VZ, ZZ;

  ModalBlocks(std::size_t M, std::size_t T)
    : PP(Eigen::MatrixXd::Zero(M, M)), PQ(Eigen::MatrixXd::Zero(M, M)),
      QQ(Eigen::MatrixXd::Zero(M, M)), PR(Eigen::MatrixXd::Zero(M, T)),
      QR(Eigen::MatrixXd::Zero(M, T)), RR(Eigen::MatrixXd::Zero(T, T)),
      VV(Eigen::MatrixXd::Zero(M, M)), VZ(Eigen::MatrixXd::Zero(M, T)),
      ZZ(Eigen::MatrixXd::Zero(T, T))
  {
  }
};

//
// For a transverse unknown with 1D shape phi the curl is phi' P_n + phi Q_n with
// P_n = z x e_t = (-e_y, e_x, 0) and Q_n = (0, 0, curl_t e_t); for a longitudinal
// unknown with shape psi the curl is psi R_m with R_m = (d e_z/dy, -d e_z/dx, 0).
// Values are phi V_n with V_n = (e_x, e_y, 0) and psi (0, 0, e_z).
//
void accumulate_blocks(const TransverseTable &t, const ProfileSample &ps, double a0,
                       double b0, double eps_r, double mu_r, std::size_t M, std::size_t T,
                       ModalBlocks &blk)
{
  const double s = a0 / ps.a, tt = b0 / ps.b;
  const double ka = -ps.da_dz / ps.a, kb = -ps.db_dz / ps.b;
  std::vector<double> Pm(2 * M), Rm(2 * T);
  for (std::size_t pt = 0; pt < t.npts; pt++)
  {
    const StretchMap jm{s, tt, ka * t.xc[pt], kb * t.yc[pt]};
    const SymmetricPair sp = lambda_pair(jm);
    const double w = t.w[pt];
    // inverse permeability (00, 11, 22, 01, 02, 12); the 01 entry vanishes identically.
    const double m00 = w * sp.inv[0] / mu_r, m11 = w * sp.inv[1] / mu_r;
    const double m22 = w * sp.inv[2] / mu_r, m02 = w * sp.inv[4] / mu_r;
    const double m12 = w * sp.inv[5] / mu_r;
    const double e00 = w * eps_r * sp.lam[0], e11 = w * eps_r * sp.lam[1];
    const double e22 = w * eps_r * sp.lam[2], e01 = w * eps_r * sp.lam[3];
    const double e02 = w * eps_r * sp.lam[4], e12 = w * eps_r * sp.lam[5];

    const double *ex = &t.ex[pt * M];
    const double *ey = &t.ey[pt * M];
    const double *cz = &t.cz[pt * M];
    const double *ez = T ? &t.ez[pt * T] : nullptr;
    const double *gx = T ? &t.gx[pt * T] : nullptr;
    const double *gy = T ? &t.gy[pt * T] : nullptr;

    // Products with the material tensor, reused across the row index.
    for (std::size_t n = 0; n < M; n++)
    {
      // M * P_n with P_n = (-ey, ex, 0)
      Pm[2 * n] = -m00 * ey[n];
      Pm[2 * n + 1] = m11 * ex[n];
    }
    for (std::size_t k = 0; k < T; k++)
    {
      Rm[2 * k] = m00 * gx[k];
      Rm[2 * k + 1] = m11 * gy[k];
    }
    for (std::size_t n = 0; n < M; n++)
    {
      const double pnx = -ey[n], pny = ex[n];
      // z component of M P_n, needed against Q_m
      const double mpz = m02 * pnx + m12 * pny;
      for (std::size_t m = 0; m < M; m++)
      {
        blk.PP(n, m) += pnx * Pm[2 * m] + pny * Pm[2 * m + 1];
        blk.PQ(n, m) += mpz * cz[m];
        blk.QQ(n, m) += m22 * cz[n] * cz[m];
        const double vx = e00 * ex[m] + e01 * ey[m];
        const double vy = e01 * ex[m] + e11 * ey[m];
        blk.VV(n, m) += ex[n] * vx + ey[n] * vy;
      }
      for (std::size_t k = 0; k < T; k++)
      {
        blk.PR(n, k) += pnx * Rm[2 * k] + pny * Rm[2 * k + 1];
        blk.QR(n, k) += cz[n] * (m02 * gx[k] + m12 * gy[k]);
        blk.VZ(n, k) += (e02 * ex[n] + e12 * ey[n]) * ez[k];
      }
    }
    for (std::size_t k = 0; k < T; k++)
    {
      for (std::size_t l = 0; l < T; l++)
      {
        blk.RR(k, l) += gx[k] * Rm[2 * l] + gy[k] * Rm[2 * l + 1];
        blk.ZZ(k, l) += e22 * ez[k] * ez[l];
      }
    }
  }
}

struct ElementMatrices
{
  Eigen::MatrixXd A, B;
};

class ElementAssembler
{
public:
  ElementAssembler(const TaperProfile &profile, const ModeBasis &basis,
                   const Discretization1D &disc, const AssemblyOptions &opt)
    : profile_(profile), basis_(basis), disc_(disc), opt_(opt),
      breaks_(profile.breakpoints())
  {
  }

  std::size_t local_size() const
  {
    const std::size_t p = static_cast<std::size_t>(disc_.p_phi());
    return basis_.size() * (p + 1) + basis_.n_tm * p;
  }

  // Cross-section table for an (nx, ny) pair; built once and shared by all workers.
  const TransverseTable &table(int nx, int ny)
  {
    std::lock_guard lock(mutex_);
    auto it = tables_.find({nx, ny});
    if (it == tables_.end())
    {
      it = tables_.emplace(std::make_pair(nx, ny), build_table(basis_, nx, ny)).first;
    }
    return it->second;
  }

  ElementMatrices compute(std::size_t e, int nx, int ny, int nz)
  {
    const TransverseTable &tab = table(nx, ny);
    const std::size_t M = basis_.size(), T = basis_.n_tm;
    const std::size_t p = static_cast<std::size_t>(disc_.p_phi());
    const std::size_t nloc = local_size();
    const std::size_t off_z = M * (p + 1);
    ElementMatrices out{Eigen::MatrixXd::Zero(nloc, nloc), Eigen::MatrixXd::Zero(nloc, nloc)};

    const double z0 = disc_.breakpoints()[e], z1 = disc_.breakpoints()[e + 1];
    const double h = z1 - z0;
    std::vector<double> cuts{z0};
    for (double zb : breaks_)
    {
      if (zb > z0 + 1e-12 * h && zb < z1 - 1e-12 * h)
      {
        cuts.push_back(zb);
      }
    }
    cuts.push_back(z1);

    std::vector<double> phi(p + 1), dphi(p + 1), psi(p), dpsi(p);
    ModalBlocks blk(M, T);
    for (std::size_t c = 0; c + 1 < cuts.size(); c++)
    {
      const MappedRule rz = map_rule(gauss_nodes(nz), cuts[c], cuts[c + 1]);
      for (std::size_t k = 0; k < rz.x.size(); k++)
      {
        const double z = rz.x[k];
        const double xi = 2.0 * (z - z0) / h - 1.0;
        disc_.eval_phi(xi, phi, dphi);
        disc_.eval_psi(xi, psi, dpsi);
        for (auto &d : dphi)
        {
          d *= 2.0 / h;
        }
        const ProfileSample ps = profile_.eval(z);
        blk.PP.setZero();
        blk.PQ.setZero();
        blk.QQ.setZero();
        blk.PR.setZero();
        blk.QR.setZero();
        blk.RR.setZero();
        blk.VV.setZero();
        blk.VZ.setZero();
        blk.ZZ.setZero();
        accumulate_blocks(tab, ps, basis_.a0, basis_.b0, opt_.eps_r, opt_.mu_r, M, T, blk);
        const double wz = rz.w[k];

        for (std::size_t a = 0; a <= p; a++)
        {
          for (std::size_t b = 0; b <= p; b++)
          {
            const double cpp = wz * dphi[a] * dphi[b];
            const double cpq = wz * dphi[a] * phi[b];
            const double cqp = wz * phi[a] * dphi[b];
            const double cqq = wz * phi[a] * phi[b];
            auto Ablk = out.A.block(a * M, b * M, M, M);
            Ablk.noalias() += cpp * blk.PP + cpq * blk.PQ + cqp * blk.PQ.transpose() +
                              cqq * blk.QQ;
            out.B.block(a * M, b * M, M, M).noalias() += cqq * blk.VV;
          }
          for (std::size_t c2 = 0; c2 < p && T > 0; c2++)
          {
            const double cpr = wz * dphi[a] * psi[c2];
            const double cqr = wz * phi[a] * psi[c2];
            out.A.block(a * M, off_z + c2 * T, M, T).noalias() += cpr * blk.PR + cqr * blk.QR;
            out.B.block(a * M, off_z + c2 * T, M, T).noalias() += cqr * blk.VZ;
          }
        }
        for (std::size_t c1 = 0; c1 < p && T > 0; c1++)
        {
          for (std::size_t c2 = 0; c2 < p; c2++)
          {
            const double crr = wz * psi[c1] * psi[c2];
            out.A.block(off_z + c1 * T, off_z + c2 * T, T, T).noalias() += crr * blk.RR;
            out.B.block(off_z + c1 * T, off_z + c2 * T, T, T).noalias() += crr * blk.ZZ;
          }
        }
      }
    }
    // Lower-left blocks mirror the upper-right ones.
    if (T > 0)
    {
      out.A.block(off_z, 0, T * p, off_z) = out.A.block(0, off_z, off_z, T * p).transpose();
      out.B.block(off_z, 0, T * p, off_z) = out.B.block(0, off_z, off_z, T * p).transpose();
    }
    return out;
  }

  // Escalates (nx, ny, nz) until two successive local matrices agree to rel_tol.
  ElementMatrices adaptive(std::size_t e, int &nx, int &ny, int &nz, std::size_t &escalations)
  {
    const BoxQuadSpec &q = opt_.quadrature;
    ElementMatrices prev = compute(e, nx, ny, nz);
    if (!q.adaptive)
    {
      return prev;
    }
    const int cap = std::min(q.max_order, max_gauss_order);
    while (true)
    {
      const int nx2 = escalate_order(nx), ny2 = escalate_order(ny), nz2 = escalate_order(nz);
      if (std::max({nx2, ny2, nz2}) > cap)
      {
        std::ostringstream msg;
        msg << "element " << e << ": quadrature did not reach rel_tol " << q.rel_tol
            << " below order " << q.max_order;
        throw NumericalError(msg.str());
      }
      ElementMatrices next = compute(e, nx2, ny2, nz2);
      nx = nx2;
      ny = ny2;
      nz = nz2;
      const double da = (next.A - prev.A).cwiseAbs().maxCoeff();
      const double db = (next.B - prev.B).cwiseAbs().maxCoeff();
      const double sa = next.A.cwiseAbs().maxCoeff();
      const double sb = next.B.cwiseAbs().maxCoeff();
      if (da <= q.rel_tol * sa && db <= q.rel_tol * sb)
      {
        return next;
      }
      escalations++;
      prev = std::move(next);
    }
  }

  void scatter(std::size_t e, const ElementMatrices &em, const GlobalIndexing &idx,
               std::vector<Eigen::Triplet<double>> &ta,
               std::vector<Eigen::Triplet<double>> &tb) const
  {
    const std::size_t M = basis_.size(), T = basis_.n_tm;
    const std::size_t p = static_cast<std::size_t>(disc_.p_phi());
    const std::size_t nloc = local_size();
    std::vector<std::size_t> g(nloc);
    for (std::size_t a = 0; a <= p; a++)
    {
      for (std::size_t n = 0; n < M; n++)
      {
        g[a * M + n] = idx.transverse(n, disc_.phi_global(e, a));
      }
    }
    for (std::size_t c = 0; c < p; c++)
    {
      for (std::size_t m = 0; m < T; m++)
      {
        g[M * (p + 1) + c * T + m] = idx.longitudinal(m, disc_.psi_global(e, c));
      }
    }
    for (std::size_t i = 0; i < nloc; i++)
    {
      for (std::size_t j = 0; j < nloc; j++)
      {
        // Upper triangle mirrored, so each local matrix is exactly symmetric.
        const double va = i <= j ? em.A(i, j) : em.A(j, i);
        const double vb = i <= j ? em.B(i, j) : em.B(j, i);
        if (va != 0.0)
        {
          ta.emplace_back(static_cast<int>(g[i]), static_cast<int>(g[j]), va);
        }
        if (vb != 0.0)
        {
          tb.emplace_back(static_cast<int>(g[i]), static_cast<int>(g[j]), vb);
        }
      }
    }
  }

private:
  const TaperProfile &profile_;
  const ModeBasis &basis_;
  const Discretization1D &disc_;
  const AssemblyOptions &opt_;
  std::vector<double> breaks_;
  std::mutex mutex_;
  std::map<std::pair<int, int>, TransverseTable> tables_;
};

// Accumulated triplets may sum the same (i, j) and (j, i) in different orders; average
// the two so that the stored matrix is bitwise symmetric.
Eigen::SparseMatrix<double> symmetrize(const Eigen::SparseMatrix<double> &m)
{
  Eigen::SparseMatrix<double> t = m.transpose();
  Eigen::SparseMatrix<double> out = 0.5 * (m + t);
  out.prune(0.0);
  return out;
}

}  // namespace

Discretization1D::Discretization1D(std::vector<double> breakpoints, int p_phi)
  : breakpoints_(std::move(breakpoints)), p_phi_(p_phi)
{
  if (p_phi_ < 2)
  {
    throw ConfigError("transverse polynomial degree must be at least 2 (the longitudinal "
                      "degree is one less), got " +
                      std::to_string(p_phi_));
  }
  if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0)
  {
    throw ConfigError("mesh breakpoints must start at 0 and contain at least one element");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); k++)
  {
    if (!(breakpoints_[k] > breakpoints_[k - 1]))
    {
      throw ConfigError("mesh breakpoints must be strictly increasing");
    }
  }
  phi_nodes_ = lagrange_nodes(p_phi_);
  psi_nodes_ = lagrange_nodes(p_phi_ - 1);
}

void Discretization1D::eval_phi(double xi, std::span<double> value,
                                std::span<double> dvalue) const
{
  eval_lagrange(phi_nodes_, xi, value, dvalue);
}

void Discretization1D::eval_psi(double xi, std::span<double> value,
                                std::span<double> dvalue) const
{
  eval_lagrange(psi_nodes_, xi, value, dvalue);
}

std::pair<std::size_t, double> Discretization1D::locate(double z) const
{
  const double L = length();
  if (!(z >= -1e-14 * L && z <= L * (1.0 + 1e-14)))
  {
    throw std::out_of_range("axial position outside the mesh");
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), z);
  std::size_t e = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
  e = std::clamp<std::size_t>(e, 1, n_elems()) - 1;
  const double z0 = breakpoints_[e], z1 = breakpoints_[e + 1];
  return {e, std::clamp(2.0 * (z - z0) / (z1 - z0) - 1.0, -1.0, 1.0)};
}

Discretization1D build_discretization(double length, std::size_t n_elems, int p_phi)
{
  if (!(length > 0.0))
  {
    throw ConfigError("mesh length must be positive");
  }
  if (n_elems < 1)
  {
    throw ConfigError("mesh needs at least one element");
  }
  std::vector<double> z(n_elems + 1);
  for (std::size_t k = 0; k <= n_elems; k++)
  {
    z[k] = length * static_cast<double>(k) / static_cast<double>(n_elems);
  }
  z.back() = length;
  return Discretization1D(std::move(z), p_phi);
}

Discretization1D build_discretization(std::vector<double> breakpoints, int p_phi)
{
  return Discretization1D(std::move(breakpoints), p_phi);
}

GlobalIndexing::Entry GlobalIndexing::decode(std::size_t index) const
{
  if (index >= size())
  {
    throw std::out_of_range("global index out of range");
  }
  if (index < n_transverse())
  {
    return {false, index % n_modes, index / n_modes};
  }
  const std::size_t r = index - n_transverse();
  return {true, r % n_tm, r / n_tm};
}

GlobalIndexing make_indexing(const ModeBasis &basis, const Discretization1D &disc)
{
  return {basis.size(), basis.n_tm, disc.n_lt(), disc.n_lz()};
}

std::size_t dof_count(const ModeBasis &basis, const Discretization1D &disc)
{
  return basis.size() * disc.n_lt() + basis.n_tm * disc.n_lz();
}

BoxQuadSpec default_quadrature(const ModeBasis &basis, const Discretization1D &disc)
{
  BoxQuadSpec q;
  // Products of two modal factors oscillate up to 2 p_max half-periods across the guide.
  q.nx = static_cast<int>(std::ceil(4.5 * basis.max_p())) + 6;
  q.ny = static_cast<int>(std::ceil(4.5 * basis.max_q())) + 6;
  q.nz = disc.p_phi() + 4;
  return q;
}

AssembledSystem assemble_AB(const TaperProfile &profile, const ModeBasis &basis,
                            const Discretization1D &disc, const AssemblyOptions &options)
{
  const auto t_start = std::chrono::steady_clock::now();
  const double rel = 1e-9;
  if (std::abs(profile.a0() - basis.a0) > rel * basis.a0 ||
      std::abs(profile.b0() - basis.b0) > rel * basis.b0)
  {
    throw ConfigError("mode basis cross-section does not match the profile at z = 0");
  }
  if (std::abs(profile.length() - disc.length()) > rel * profile.length())
  {
    throw ConfigError("mesh length does not match the profile length");
  }
  if (!(options.eps_r > 0.0) || !(options.mu_r > 0.0))
  {
    throw ConfigError("background eps_r and mu_r must be positive");
  }

  AssembledSystem sys;
  sys.index = make_indexing(basis, disc);
  sys.eps_r = options.eps_r;
  sys.mu_r = options.mu_r;

  ElementAssembler asmb(profile, basis, disc, options);
  const std::size_t ne = disc.n_elems();
  std::vector<std::vector<Eigen::Triplet<double>>> ta(ne), tb(ne);
  std::vector<std::array<int, 3>> orders(ne);
  std::vector<std::size_t> esc(ne, 0);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;

  auto worker = [&]()
  {
    while (true)
    {
      const std::size_t e = next.fetch_add(1);
      if (e >= ne)
      {
        return;
      }
      try
      {
        int nx = options.quadrature.nx, ny = options.quadrature.ny,
            nz = options.quadrature.nz;
        const ElementMatrices em = asmb.adaptive(e, nx, ny, nz, esc[e]);
        orders[e] = {nx, ny, nz};
        asmb.scatter(e, em, sys.index, ta[e], tb[e]);
      }
      catch (...)
      {
        std::lock_guard lock(err_mutex);
        if (!error)
        {
          error = std::current_exception();
        }
        next.store(ne);
        return;
      }
    }
  };

  const unsigned nthreads = std::max(1u, std::min<unsigned>(options.threads,
                                                            static_cast<unsigned>(ne)));
  if (nthreads == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nthreads; k++)
    {
      pool.emplace_back(worker);
    }
    for (auto &t : pool)
    {
      t.join();
    }
  }
  if (error)
  {
    std::rethrow_exception(error);
  }

  // Merge in element order so the result does not depend on the thread count.
  std::vector<Eigen::Triplet<double>> all_a, all_b;
  for (std::size_t e = 0; e < ne; e++)
  {
    all_a.insert(all_a.end(), ta[e].begin(), ta[e].end());
    all_b.insert(all_b.end(), tb[e].begin(), tb[e].end());
    sys.stats.max_nx = std::max(sys.stats.max_nx, orders[e][0]);
    sys.stats.max_ny = std::max(sys.stats.max_ny, orders[e][1]);
    sys.stats.max_nz = std::max(sys.stats.max_nz, orders[e][2]);
    sys.stats.escalations += esc[e];
  }
  const auto n = static_cast<Eigen::Index>(sys.size());
  Eigen::SparseMatrix<double> A(n, n), B(n, n);
  A.setFromTriplets(all_a.begin(), all_a.end());
  B.setFromTriplets(all_b.begin(), all_b.end());
  sys.A = symmetrize(A);
  sys.B = symmetrize(B);
  sys.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sys;
}

}  // namespace himod
