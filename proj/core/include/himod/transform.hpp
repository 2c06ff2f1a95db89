// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_TRANSFORM_HPP
#define HIMOD_TRANSFORM_HPP

#include <Eigen/Core>

#include "himod/profiles.hpp"

namespace himod
{

//
// Jacobian d(x, y, z)/d(x', y', z') of the stretch map x = x' a0/a(z'), y = y' b0/b(z'),
// z = z' that takes the physical device onto the uniform a0 x b0 prism. With
// s = a0/a, t = b0/b, u = -(x/a) da/dz, v = -(y/b) db/dz (x, y centered, transformed):
//
//       | s  0  u |
//   J = | 0  t  v |,   det J = s t.
//       | 0  0  1 |
//
struct Jacobian3
{
  Eigen::Matrix3d m;
  double det;
};

// Stretch parameters of the map at one point; the compact form used by assembly.
struct StretchMap
{
  double s, t, u, v;
};

// x, y are centered coordinates of the transformed cross-section
// (|x| <= a0/2, |y| <= b0/2). Throws std::out_of_range outside the prism.
StretchMap stretch_at(const TaperProfile &profile, double x, double y, double z);

Jacobian3 jacobian_at(const TaperProfile &profile, double x, double y, double z);

//
// Artificial material of the transformed problem:
//   lambda   = J J^T / det J
//   eps_r    = eps'_r lambda
//   inv_mu_r = lambda^{-1} / mu'_r
//
struct MaterialTensors
{
  Eigen::Matrix3d lambda;
  Eigen::Matrix3d eps_r;
  Eigen::Matrix3d inv_mu_r;
  double eps_r_scalar = 1.0;
  double mu_r_scalar = 1.0;
};

MaterialTensors material_at(const TaperProfile &profile, double x, double y, double z,
                            double eps_r_scalar = 1.0, double mu_r_scalar = 1.0);

// Unique entries (00, 11, 22, 01, 02, 12) of the symmetric tensors lambda and
// lambda^{-1} in closed form. Innermost assembly kernel.
struct SymmetricPair
{
  double lam[6];
  double inv[6];
};

inline SymmetricPair lambda_pair(const StretchMap &j)
{
  const double det = j.s * j.t;
  const double r = 1.0 / det;
  SymmetricPair out{};
  out.lam[0] = (j.s * j.s + j.u * j.u) * r;
  out.lam[1] = (j.t * j.t + j.v * j.v) * r;
  out.lam[2] = r;
  out.lam[3] = j.u * j.v * r;
  out.lam[4] = j.u * r;
  out.lam[5] = j.v * r;
  // (J J^T)^{-1} = J^{-T} J^{-1}, scaled by det J.
  const double ts = j.t / j.s, st = j.s / j.t;
  out.inv[0] = ts;
  out.inv[1] = st;
  out.inv[2] = det + j.u * j.u * ts + j.v * j.v * st;
  out.inv[3] = 0.0;
  out.inv[4] = -j.u * ts;
  out.inv[5] = -j.v * st;
  return out;
}

// Physical field E' from the transformed-frame field E. The map is covariant,
// E' = J^T E, so tangential components are preserved on the mapped walls.
Eigen::Vector3cd map_field_to_physical(const Jacobian3 &jac, const Eigen::Vector3cd &e);

// Inverse of map_field_to_physical: E = J^{-T} E'.
Eigen::Vector3cd map_field_to_transformed(const Jacobian3 &jac, const Eigen::Vector3cd &e);

}  // namespace himod

#endif  // HIMOD_TRANSFORM_HPP
