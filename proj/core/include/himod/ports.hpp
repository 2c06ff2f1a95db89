// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_PORTS_HPP
#define HIMOD_PORTS_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "himod/assembly.hpp"
#include "himod/modes.hpp"
#include "himod/profiles.hpp"

namespace himod
{

using cplx = std::complex<double>;

//
// Transverse magnetic mode function used at port 2 (z = L), where the physical section
// is aL x bL while the basis lives on a0 x b0.
//   covariant: the aL x bL mode with the same (kind, p, q), pulled back to the
//              transformed frame with j_L^{-1} = diag(aL/a0, bL/b0)
//   scaled:    the a0 x b0 mode mapped by j_L^{-1} and renormalized by
//              A_n = sqrt(a0 b0 / (Y aL bL))
// Both satisfy the power-wave normalization; they coincide when aL/a0 = bL/b0.
//
enum class Port2Model
{
  covariant,
  scaled
};

const char *to_string(Port2Model model);

struct PortMode
{
  ModeId id;
  double k_cut;  // cutoff wavenumber of the physical port section [rad/m]
  cplx gamma;    // principal sqrt(k_cut^2 - k^2) [1/m]
  cplx Y;        // modal wave admittance [S]
  cplx sqrtY;
  cplx A;        // port-2 normalization constant (1/sqrtY at port 1)
  bool propagating;
};

struct PortModeSet
{
  int port = 1;
  double frequency = 0.0;
  double a = 0.0, b = 0.0;    // physical port section [m]
  double a0 = 0.0, b0 = 0.0;  // reference section [m]
  double eps = 0.0, mu = 0.0;  // absolute material constants at the port
  std::vector<PortMode> modes;

  double k() const;
  std::size_t n_propagating() const;
};

// Principal-branch propagation constant, Re >= 0 and Im >= 0.
cplx propagation_constant(double k_cut, double k);

//
// Port modal data for every basis mode at port 1 (z = 0) or port 2 (z = L). eps_r, mu_r
// are relative to vacuum. Throws NumericalError when f is within 1e-8 relative of a
// selected mode's cutoff at that port.
//
PortModeSet port_mode_set(const ModeBasis &basis, const TaperProfile &profile, int port,
                          double frequency, double eps_r = 1.0, double mu_r = 1.0);

// Power-wave port mode functions (e_n, h_n) in the transformed frame at corner
// coordinates 0 <= x <= a0, 0 <= y <= b0 of the reference section.
struct PortTrace
{
  cplx ex, ey, hx, hy;
};

PortTrace port_trace(const PortModeSet &set, std::size_t n, double x, double y,
                     Port2Model model = Port2Model::covariant);

// int (e_n x h_m) . z dS over the port by quadrature; +delta at port 1, -delta at port 2.
Eigen::MatrixXcd power_normalization(const PortModeSet &set,
                                     Port2Model model = Port2Model::covariant);

struct PortCoupling
{
  double frequency = 0.0;
  Port2Model model = Port2Model::covariant;
  PortModeSet port1, port2;
  Eigen::MatrixXcd C;  // N_tot x 2 N_M, port-1 columns then port-2 columns
};

//
// C(i, n) = int_{S_P} f_i . (h_n x nhat) dS with nhat = -z at port 1 and +z at port 2.
// Only transverse rows whose 1D function is nonzero at the port endpoint are filled.
//
PortCoupling assemble_port_coupling(const ModeBasis &basis, const Discretization1D &disc,
                                    const TaperProfile &profile, double frequency,
                                    double eps_r = 1.0, double mu_r = 1.0,
                                    Port2Model model = Port2Model::covariant);

}  // namespace himod

#endif  // HIMOD_PORTS_HPP
