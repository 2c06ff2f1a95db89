// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/transform.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "himod/error.hpp"

namespace himod
{

namespace
{

Eigen::Matrix3d unpack(const double e[6])
{
  Eigen::Matrix3d m;
  m << e[0], e[3], e[4],  //
      e[3], e[1], e[5],   //
      e[4], e[5], e[2];
  return m;
}

}  // namespace

StretchMap stretch_at(const TaperProfile &profile, double x, double y, double z)
{
  const double a0 = profile.a0(), b0 = profile.b0();
  const double slack = 1e-12;
  if (std::abs(x) > 0.5 * a0 * (1.0 + slack) || std::abs(y) > 0.5 * b0 * (1.0 + slack))
  {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") lies outside the transformed cross-section";
    throw std::out_of_range(msg.str());
  }
  const ProfileSample ps = profile.eval(z);
  return {a0 / ps.a, b0 / ps.b, -(x / ps.a) * ps.da_dz, -(y / ps.b) * ps.db_dz};
}

Jacobian3 jacobian_at(const TaperProfile &profile, double x, double y, double z)
{
  const StretchMap j = stretch_at(profile, x, y, z);
  Jacobian3 out;
  out.m << j.s, 0.0, j.u,  //
      0.0, j.t, j.v,       //
      0.0, 0.0, 1.0;
  out.det = j.s * j.t;
  return out;
}

MaterialTensors material_at(const TaperProfile &profile, double x, double y, double z,
                            double eps_r_scalar, double mu_r_scalar)
{
  if (!(eps_r_scalar > 0.0) || !(mu_r_scalar > 0.0))
  {
    throw std::invalid_argument("background eps_r and mu_r must be positive");
  }
  const StretchMap j = stretch_at(profile, x, y, z);
  if (!(j.s * j.t > 0.0) || !std::isfinite(j.s * j.t))
  {
    throw NumericalError("singular coordinate transformation");
  }
  const SymmetricPair pair = lambda_pair(j);
  MaterialTensors out;
  out.lambda = unpack(pair.lam);
  out.eps_r = eps_r_scalar * out.lambda;
  out.inv_mu_r = unpack(pair.inv) / mu_r_scalar;
  out.eps_r_scalar = eps_r_scalar;
  out.mu_r_scalar = mu_r_scalar;
  return out;
}

Eigen::Vector3cd map_field_to_physical(const Jacobian3 &jac, const Eigen::Vector3cd &e)
{
  if (!(std::abs(jac.det) > 0.0))
  {
    throw NumericalError("singular Jacobian in field mapping");
  }
  return jac.m.transpose().cast<std::complex<double>>() * e;
}

Eigen::Vector3cd map_field_to_transformed(const Jacobian3 &jac, const Eigen::Vector3cd &e)
{
  if (!(std::abs(jac.det) > 0.0))
  {
    throw NumericalError("singular Jacobian in field mapping");
  }
  // J^T is lower triangular with unit (2,2) entry; solve J^T E = E'.
  const Eigen::Matrix3d jt = jac.m.transpose();
  return jt.cast<std::complex<double>>().triangularView<Eigen::Lower>().solve(e);
}

}  // namespace himod
