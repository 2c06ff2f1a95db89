// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/scattering.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "himod/constants.hpp"
#include "himod/error.hpp"
#include "himod/transform.hpp"

namespace himod
{

namespace
{

using SpMat = Eigen::SparseMatrix<double>;

double norm1(const SpMat &K)
{
  double best = 0.0;
  for (Eigen::Index c = 0; c < K.outerSize(); c++)
  {
    double s = 0.0;
    for (SpMat::InnerIterator it(K, c); it; ++it)
    {
      s += std::abs(it.value());
    }
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

struct FrequencySolver::Impl
{
  const AssembledSystem *system;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;

  // Hager's estimate of ||K^{-1}||_1; K is symmetric so no transposed solves are needed.
  double inverse_norm1()
  {
    const Eigen::Index n = system->A.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    Eigen::Index last = -1;
    for (int it = 0; it < 5; it++)
    {
      const Eigen::VectorXd y = lu.solve(x);
      est = y.lpNorm<1>();
      const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
      const Eigen::VectorXd z = lu.solve(xi);
      Eigen::Index j = 0;
      const double zmax = z.cwiseAbs().maxCoeff(&j);
      if (zmax <= z.dot(x) || j == last)
      {
        break;
      }
      x.setZero();
      x(j) = 1.0;
      last = j;
    }
    return est;
  }
};

FrequencySolver::FrequencySolver(const AssembledSystem &system)
  : impl_(std::make_unique<Impl>())
{
  impl_->system = &system;
}

FrequencySolver::~FrequencySolver() = default;
FrequencySolver::FrequencySolver(FrequencySolver &&) noexcept = default;
FrequencySolver &FrequencySolver::operator=(FrequencySolver &&) noexcept = default;

FrequencySolution FrequencySolver::solve(const PortCoupling &coupling, double frequency,
                                         const SolveOptions &options)
{
  const auto t0 = std::chrono::steady_clock::now();
  const AssembledSystem &sys = *impl_->system;
  if (std::abs(coupling.frequency - frequency) > 1e-12 * frequency)
  {
    throw std::invalid_argument("port coupling was assembled at a different frequency");
  }
  if (coupling.C.rows() != static_cast<Eigen::Index>(sys.size()))
  {
    throw std::invalid_argument("port coupling size does not match the assembled system");
  }
  const double omega = 2.0 * constants::pi * frequency;
  const double k0 = omega / constants::c0;
  const SpMat K = sys.A - (k0 * k0) * sys.B;

  auto &lu = impl_->lu;
  if (!impl_->analyzed)
  {
    lu.analyzePattern(K);
    impl_->analyzed = true;
  }
  lu.factorize(K);
  if (lu.info() != Eigen::Success)
  {
    std::ostringstream msg;
    msg.precision(12);
    msg << "singular system matrix at f = " << frequency
        << " Hz (interior resonance of the closed structure?)";
    throw NumericalError(msg.str(), frequency);
  }

  FrequencySolution out;
  out.frequency = frequency;
  if (options.estimate_condition)
  {
    out.rcond = 1.0 / (norm1(K) * impl_->inverse_norm1());
    if (!(out.rcond >= options.rcond_min))
    {
      std::ostringstream msg;
      msg.precision(12);
      msg << "system matrix numerically singular at f = " << frequency
          << " Hz (reciprocal condition estimate " << out.rcond
          << "); likely an interior resonance of the closed structure";
      throw NumericalError(msg.str(), frequency);
    }
  }

  const Eigen::MatrixXd Cr = coupling.C.real(), Ci = coupling.C.imag();
  const Eigen::MatrixXd Xr = lu.solve(Cr), Xi = lu.solve(Ci);
  const Eigen::MatrixXd Rr = K * Xr - Cr, Ri = K * Xi - Ci;
  for (Eigen::Index j = 0; j < Cr.cols(); j++)
  {
    const double cn = std::hypot(Cr.col(j).norm(), Ci.col(j).norm());
    const double rn = std::hypot(Rr.col(j).norm(), Ri.col(j).norm());
    out.residual = std::max(out.residual, cn > 0.0 ? rn / cn : rn);
  }
  Eigen::MatrixXcd X(Xr.rows(), Xr.cols());
  X.real() = Xr;
  X.imag() = Xi;

  // Field per unit port current v = -j omega mu0 K^{-1} C; port voltages Z = -C^T v.
  const std::complex<double> jwm{0.0, omega * constants::mu0};
  out.Z = jwm * (coupling.C.transpose() * X);
  out.S = impedance_to_scattering(out.Z);
  if (!out.S.allFinite())
  {
    throw NumericalError("non-finite scattering matrix", frequency);
  }
  if (options.keep_fields)
  {
    out.V = -jwm * X;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

FrequencySolution solve_at_frequency(const AssembledSystem &system,
                                     const PortCoupling &coupling, double frequency,
                                     const SolveOptions &options)
{
  FrequencySolver solver(system);
  return solver.solve(coupling, frequency, options);
}

Eigen::MatrixXcd impedance_to_scattering(const Eigen::MatrixXcd &Z)
{
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(Z.rows(), Z.cols());
  return (Z + I).partialPivLu().solve(Z - I);
}

Eigen::VectorXcd excitation_coefficients(const FrequencySolution &solution,
                                         const Eigen::VectorXcd &incident)
{
  if (!solution.V)
  {
    throw std::invalid_argument("solution was computed without field coefficients");
  }
  const Eigen::Index n = solution.S.rows();
  if (incident.size() != n)
  {
    throw std::invalid_argument("incident wave vector has the wrong length");
  }
  const Eigen::VectorXcd current = (Eigen::MatrixXcd::Identity(n, n) - solution.S) * incident;
  return *solution.V * current;
}

std::vector<Eigen::Vector3cd> reconstruct_field(const Eigen::VectorXcd &coefficients,
                                                const ModeBasis &basis,
                                                const Discretization1D &disc,
                                                const TaperProfile &profile,
                                                const std::vector<Eigen::Vector3d> &points)
{
  const GlobalIndexing idx = make_indexing(basis, disc);
  if (coefficients.size() != static_cast<Eigen::Index>(idx.size()))
  {
    throw std::invalid_argument("coefficient vector does not match the discretization");
  }
  const std::size_t M = basis.size(), T = basis.n_tm;
  const std::size_t p = static_cast<std::size_t>(disc.p_phi());
  std::vector<double> phi(p + 1), psi(p);
  std::vector<Eigen::Vector3cd> out;
  out.reserve(points.size());
  for (const Eigen::Vector3d &pt : points)
  {
    const double z = pt.z();
    if (!(z >= 0.0 && z <= profile.length() * (1.0 + 1e-14)))
    {
      throw std::out_of_range("field point outside the device (z)");
    }
    const ProfileSample ps = profile.eval(std::min(z, profile.length()));
    const double slack = 1.0 + 1e-12;
    if (std::abs(pt.x()) > 0.5 * ps.a * slack || std::abs(pt.y()) > 0.5 * ps.b * slack)
    {
      std::ostringstream msg;
      msg << "field point (" << pt.x() << ", " << pt.y() << ", " << z
          << ") lies outside the device section";
      throw std::out_of_range(msg.str());
    }
    // Transformed centered coordinates, clamped onto the reference section.
    const double xc =
        std::clamp(pt.x() * basis.a0 / ps.a, -0.5 * basis.a0, 0.5 * basis.a0);
    const double yc =
        std::clamp(pt.y() * basis.b0 / ps.b, -0.5 * basis.b0, 0.5 * basis.b0);
    const auto [e, xi] = disc.locate(std::min(z, disc.length()));
    disc.eval_phi(xi, phi, {});
    disc.eval_psi(xi, psi, {});
    Eigen::Vector3cd E = Eigen::Vector3cd::Zero();
    for (std::size_t n = 0; n < M; n++)
    {
      const Mode &m = basis.modes[n];
      const TransverseField et = eval_transverse(m, xc + 0.5 * basis.a0, yc + 0.5 * basis.b0);
      std::complex<double> c = 0.0;
      for (std::size_t a = 0; a <= p; a++)
      {
        c += phi[a] * coefficients(static_cast<Eigen::Index>(
                          idx.transverse(n, disc.phi_global(e, a))));
      }
      E.x() += c * et.ex;
      E.y() += c * et.ey;
      if (m.kind == ModeKind::TM)
      {
        const std::size_t k = n - basis.n_te;
        const double ez = eval_longitudinal(m, xc + 0.5 * basis.a0, yc + 0.5 * basis.b0);
        std::complex<double> d = 0.0;
        for (std::size_t c2 = 0; c2 < p && T > 0; c2++)
        {
          d += psi[c2] * coefficients(static_cast<Eigen::Index>(
                             idx.longitudinal(k, disc.psi_global(e, c2))));
        }
        E.z() += d * ez;
      }
    }
    const Jacobian3 jac = jacobian_at(profile, xc, yc, std::min(z, profile.length()));
    out.push_back(map_field_to_physical(jac, E));
  }
  return out;
}

std::size_t ScatteringResult::n_failed() const
{
  std::size_t n = 0;
  for (const auto &e : errors)
  {
    n += e.empty() ? 0 : 1;
  }
  return n;
}

std::vector<PortLabel> port_labels(const ModeBasis &basis)
{
  std::vector<PortLabel> labels;
  for (int port = 1; port <= 2; port++)
  {
    for (const Mode &m : basis.modes)
    {
      labels.push_back({port, m.id()});
    }
  }
  return labels;
}

ScatteringResult sweep(const AssembledSystem &system, const ModeBasis &basis,
                       const Discretization1D &disc, const TaperProfile &profile,
                       const std::vector<double> &frequencies, const SweepOptions &options)
{
  ScatteringResult res;
  res.ports = port_labels(basis);
  res.frequencies = frequencies;
  res.samples.resize(frequencies.size());
  res.errors.resize(frequencies.size());
  res.n_dofs = system.size();

  std::atomic<std::size_t> next{0};
  auto worker = [&]()
  {
    FrequencySolver solver(system);
    while (true)
    {
      const std::size_t k = next.fetch_add(1);
      if (k >= frequencies.size())
      {
        return;
      }
      const double f = frequencies[k];
      try
      {
        const PortCoupling pc = assemble_port_coupling(basis, disc, profile, f, options.eps_r,
                                                       options.mu_r, options.port2_model);
        res.samples[k] = solver.solve(pc, f, options.solve);
      }
      catch (const std::exception &ex)
      {
        res.samples[k].frequency = f;
        res.errors[k] = ex.what();
      }
    }
  };
  const unsigned nthreads = std::max(
      1u, std::min<unsigned>(options.threads, static_cast<unsigned>(frequencies.size())));
  if (nthreads == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; t++)
    {
      pool.emplace_back(worker);
    }
    for (auto &t : pool)
    {
      t.join();
    }
  }
  return res;
}

double unitarity_defect(const FrequencySolution &solution, const PortCoupling &coupling)
{
  std::vector<Eigen::Index> prop;
  const std::size_t M = coupling.port1.modes.size();
  for (std::size_t n = 0; n < M; n++)
  {
    if (coupling.port1.modes[n].propagating)
    {
      prop.push_back(static_cast<Eigen::Index>(n));
    }
  }
  for (std::size_t n = 0; n < M; n++)
  {
    if (coupling.port2.modes[n].propagating)
    {
      prop.push_back(static_cast<Eigen::Index>(M + n));
    }
  }
  const Eigen::Index np = static_cast<Eigen::Index>(prop.size());
  Eigen::MatrixXcd Sp(np, np);
  for (Eigen::Index i = 0; i < np; i++)
  {
    for (Eigen::Index j = 0; j < np; j++)
    {
      Sp(i, j) = solution.S(prop[i], prop[j]);
    }
  }
  const Eigen::MatrixXcd D = Sp.adjoint() * Sp - Eigen::MatrixXcd::Identity(np, np);
  return np == 0 ? 0.0 : D.cwiseAbs().maxCoeff();
}

double reciprocity_defect(const Eigen::MatrixXcd &S)
{
  const double num = (S - S.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  const double den = S.cwiseAbs().rowwise().sum().maxCoeff();
  return den > 0.0 ? num / den : num;
}

}  // namespace himod
