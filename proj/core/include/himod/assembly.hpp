// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_ASSEMBLY_HPP
#define HIMOD_ASSEMBLY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "himod/modes.hpp"
#include "himod/profiles.hpp"
#include "himod/quadrature.hpp"

namespace himod
{

//
// Continuous Lagrange elements along z. The transverse coefficients use degree p_phi,
// the longitudinal ones degree p_psi = p_phi - 1, so that both families produce
// transverse curl components of the same polynomial degree.
//
class Discretization1D
{
public:
  Discretization1D(std::vector<double> breakpoints, int p_phi);

  int p_phi() const { return p_phi_; }
  int p_psi() const { return p_phi_ - 1; }
  std::size_t n_elems() const { return breakpoints_.size() - 1; }
  std::size_t n_lt() const { return n_elems() * p_phi_ + 1; }
  std::size_t n_lz() const { return n_elems() * (p_phi_ - 1) + 1; }
  double length() const { return breakpoints_.back(); }
  const std::vector<double> &breakpoints() const { return breakpoints_; }

  // Reference nodes on [-1, 1]: equispaced up to degree 2, Gauss-Lobatto above.
  const std::vector<double> &phi_nodes() const { return phi_nodes_; }
  const std::vector<double> &psi_nodes() const { return psi_nodes_; }

  // Local shape values and d/dxi at reference coordinate xi.
  void eval_phi(double xi, std::span<double> value, std::span<double> dvalue) const;
  void eval_psi(double xi, std::span<double> value, std::span<double> dvalue) const;

  std::size_t phi_global(std::size_t elem, std::size_t local) const
  {
    return elem * static_cast<std::size_t>(p_phi_) + local;
  }
  std::size_t psi_global(std::size_t elem, std::size_t local) const
  {
    return elem * static_cast<std::size_t>(p_phi_ - 1) + local;
  }

  // Element containing z (right-most element at breakpoints) and its reference coord.
  std::pair<std::size_t, double> locate(double z) const;

private:
  std::vector<double> breakpoints_;
  int p_phi_;
  std::vector<double> phi_nodes_;
  std::vector<double> psi_nodes_;
};

// Uniform mesh of n_elems elements on [0, L]. Throws ConfigError for p_phi < 2.
Discretization1D build_discretization(double length, std::size_t n_elems, int p_phi);

// Explicit, strictly increasing breakpoints 0 = z_0 < ... < z_K = L.
Discretization1D build_discretization(std::vector<double> breakpoints, int p_phi);

//
// Global numbering. Transverse unknown (mode n, 1D dof l) -> l * N_M + n; longitudinal
// unknown (TM mode m, 1D dof l) -> N_M * N_lt + l * N_TM + m. Modes cycle fastest.
//
struct GlobalIndexing
{
  std::size_t n_modes = 0;
  std::size_t n_tm = 0;
  std::size_t n_lt = 0;
  std::size_t n_lz = 0;

  std::size_t transverse(std::size_t mode, std::size_t dof) const
  {
    return dof * n_modes + mode;
  }
  std::size_t longitudinal(std::size_t tm_mode, std::size_t dof) const
  {
    return n_modes * n_lt + dof * n_tm + tm_mode;
  }
  std::size_t n_transverse() const { return n_modes * n_lt; }
  std::size_t size() const { return n_modes * n_lt + n_tm * n_lz; }

  struct Entry
  {
    bool longitudinal;
    std::size_t mode;  // basis index for transverse, TM index for longitudinal
    std::size_t dof;
  };
  Entry decode(std::size_t index) const;
};

GlobalIndexing make_indexing(const ModeBasis &basis, const Discretization1D &disc);

// N_tot = N_M N_lt + N_TM N_lz.
std::size_t dof_count(const ModeBasis &basis, const Discretization1D &disc);

// Starting orders derived from the modal and polynomial content.
BoxQuadSpec default_quadrature(const ModeBasis &basis, const Discretization1D &disc);

struct AssemblyOptions
{
  BoxQuadSpec quadrature;
  double eps_r = 1.0;
  double mu_r = 1.0;
  unsigned threads = 1;
};

struct AssemblyStats
{
  int max_nx = 0, max_ny = 0, max_nz = 0;
  std::size_t escalations = 0;
  double seconds = 0.0;
};

// Frequency-independent curl-curl (A) and mass (B) matrices. Both are exactly symmetric.
struct AssembledSystem
{
  GlobalIndexing index;
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> B;
  double eps_r = 1.0;
  double mu_r = 1.0;
  AssemblyStats stats;

  std::size_t size() const { return index.size(); }
};

//
// Assembles A(i,j) = int curl(b_i) . mu_r^{-1} curl(b_j) and B(i,j) = int b_i . eps_r b_j
// over the transformed prism, element by element, with the material tensors sampled at
// the quadrature points. Element z-ranges are split at profile breakpoints.
//
AssembledSystem assemble_AB(const TaperProfile &profile, const ModeBasis &basis,
                            const Discretization1D &disc, const AssemblyOptions &options);

}  // namespace himod

#endif  // HIMOD_ASSEMBLY_HPP
