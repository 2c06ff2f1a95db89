// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_SCATTERING_HPP
#define HIMOD_SCATTERING_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "himod/assembly.hpp"
#include "himod/ports.hpp"

namespace himod
{

struct FrequencySolution
{
  double frequency = 0.0;
  Eigen::MatrixXcd Z;  // 2 N_M x 2 N_M generalized impedance matrix
  Eigen::MatrixXcd S;  // 2 N_M x 2 N_M generalized scattering matrix
  // N_tot x 2 N_M field coefficients per unit port current; kept on request.
  std::optional<Eigen::MatrixXcd> V;
  double residual = 0.0;  // max_j |K x_j - c_j| / |c_j|
  double rcond = 0.0;     // 1-norm reciprocal condition estimate of K
  double seconds = 0.0;
};

struct SolveOptions
{
  bool keep_fields = false;
  bool estimate_condition = true;
  // K is reported singular below this reciprocal condition estimate.
  double rcond_min = 1e-14;
};

//
// Factors K = A - k0^2 B (real, sparse) and evaluates Z and S from the port coupling.
// The sparsity pattern is analyzed once per solver; one solver per thread.
//
class FrequencySolver
{
public:
  explicit FrequencySolver(const AssembledSystem &system);
  ~FrequencySolver();
  FrequencySolver(FrequencySolver &&) noexcept;
  FrequencySolver &operator=(FrequencySolver &&) noexcept;

  FrequencySolution solve(const PortCoupling &coupling, double frequency,
                          const SolveOptions &options = {});

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FrequencySolution solve_at_frequency(const AssembledSystem &system,
                                     const PortCoupling &coupling, double frequency,
                                     const SolveOptions &options = {});

// S = (Z + I)^{-1} (Z - I).
Eigen::MatrixXcd impedance_to_scattering(const Eigen::MatrixXcd &Z);

// Field coefficients for incident power-wave amplitudes a (length 2 N_M): V (I - S) a.
Eigen::VectorXcd excitation_coefficients(const FrequencySolution &solution,
                                         const Eigen::VectorXcd &incident);

//
// Physical electric field E' at physical points (x', y', z) with x', y' centered
// (|x'| <= a(z)/2, |y'| <= b(z)/2). Throws std::out_of_range outside the device.
//
std::vector<Eigen::Vector3cd> reconstruct_field(const Eigen::VectorXcd &coefficients,
                                                const ModeBasis &basis,
                                                const Discretization1D &disc,
                                                const TaperProfile &profile,
                                                const std::vector<Eigen::Vector3d> &points);

struct PortLabel
{
  int port;
  ModeId mode;
};

struct SweepOptions
{
  unsigned threads = 1;
  double eps_r = 1.0;
  double mu_r = 1.0;
  Port2Model port2_model = Port2Model::covariant;
  SolveOptions solve;
};

struct ScatteringResult
{
  std::vector<PortLabel> ports;  // port-1 modes then port-2 modes, basis order
  std::vector<double> frequencies;
  std::vector<FrequencySolution> samples;
  std::vector<std::string> errors;  // empty string for successful samples
  std::size_t n_dofs = 0;

  std::size_t size() const { return frequencies.size(); }
  bool ok(std::size_t k) const { return errors[k].empty(); }
  std::size_t n_failed() const;
};

std::vector<PortLabel> port_labels(const ModeBasis &basis);

// Solves every frequency against one assembled system. Per-sample failures are recorded
// in errors without aborting. Results follow the order of the frequency list.
ScatteringResult sweep(const AssembledSystem &system, const ModeBasis &basis,
                       const Discretization1D &disc, const TaperProfile &profile,
                       const std::vector<double> &frequencies, const SweepOptions &options);

// Largest |(S^H S - I)_{ij}| over the propagating port modes of a sample.
double unitarity_defect(const FrequencySolution &solution, const PortCoupling &coupling);

// ||S - S^T||_inf / ||S||_inf.
double reciprocity_defect(const Eigen::MatrixXcd &S);

}  // namespace himod

#endif  // HIMOD_SCATTERING_HPP
