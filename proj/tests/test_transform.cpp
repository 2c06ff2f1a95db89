// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "himod/transform.hpp"

using namespace himod;

namespace
{

constexpr double mm = 1e-3;

TaperProfile width_taper()
{
  return TaperProfile::linear(0.570 * mm, 0.570 * mm, 0.285 * mm, 0.570 * mm, 1.1 * mm);
}

// Both dimensions vary, with nonzero slopes almost everywhere.
TaperProfile both_axes()
{
  return TaperProfile::sinusoidal(22.86 * mm, 11.43 * mm, 28.448 * mm, 14.224 * mm, 20 * mm);
}

struct Point
{
  double x, y, z;
};

std::vector<Point> random_points(const TaperProfile &p, int n, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5), w(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < n; i++)
  {
    pts.push_back({u(rng) * p.a0(), u(rng) * p.b0(), w(rng) * p.length()});
  }
  return pts;
}

}  // namespace

TEST(Transform, UniformProfileIsIdentity)
{
  const TaperProfile p = TaperProfile::constant(22.86 * mm, 10.16 * mm, 50 * mm);
  const Jacobian3 j = jacobian_at(p, 3 * mm, -2 * mm, 12 * mm);
  EXPECT_TRUE(j.m.isApprox(Eigen::Matrix3d::Identity(), 0.0));
  EXPECT_EQ(j.det, 1.0);
  const MaterialTensors t = material_at(p, 3 * mm, -2 * mm, 12 * mm);
  EXPECT_EQ((t.lambda - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((t.eps_r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((t.inv_mu_r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Transform, WidthTaperJacobianAtOutput)
{
  const TaperProfile p = width_taper();
  const Jacobian3 j = jacobian_at(p, 0.1 * mm, 0.0, p.length());
  EXPECT_NEAR(j.m(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(j.m(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(j.m(0, 2), 0.090909, 1e-6);
  EXPECT_NEAR(j.m(0, 2), -(0.1 / 0.285) * (-0.285 / 1.1), 1e-14);
  EXPECT_EQ(j.m(1, 2), 0.0);
  EXPECT_EQ(j.m(2, 0), 0.0);
  EXPECT_EQ(j.m(2, 1), 0.0);
  EXPECT_EQ(j.m(2, 2), 1.0);
  EXPECT_NEAR(j.det, 2.0, 1e-12);
}

TEST(Transform, WidthTaperMaterialAtOutput)
{
  const TaperProfile p = width_taper();
  const MaterialTensors t = material_at(p, 0.1 * mm, 0.0, p.length());
  EXPECT_NEAR(t.lambda(0, 0), 2.004132, 1e-6);
  EXPECT_NEAR(t.lambda(2, 2), 0.5, 1e-12);
  EXPECT_NEAR(t.lambda(0, 2), 0.045455, 1e-6);
  EXPECT_NEAR(t.lambda(1, 1), 0.5, 1e-12);
}

TEST(Transform, AxisCarriesNoShear)
{
  const TaperProfile p = both_axes();
  for (double z : {0.0, 3 * mm, 11 * mm})
  {
    const Jacobian3 j = jacobian_at(p, 0.0, 0.0, z);
    EXPECT_EQ(j.m(0, 2), 0.0);
    EXPECT_EQ(j.m(1, 2), 0.0);
  }
}

TEST(Transform, ShearVanishesWhereSlopesVanish)
{
  const TaperProfile p = both_axes();
  const MaterialTensors t = material_at(p, 5 * mm, 4 * mm, p.length());
  EXPECT_NEAR(t.lambda(0, 2), 0.0, 1e-15);
  EXPECT_NEAR(t.lambda(1, 2), 0.0, 1e-15);
  EXPECT_NEAR(t.lambda(0, 1), 0.0, 1e-15);
}

TEST(Transform, LambdaMatchesMatrixProductAndClosedFormInverse)
{
  const TaperProfile p = both_axes();
  for (const Point &q : random_points(p, 200, 5))
  {
    const Jacobian3 j = jacobian_at(p, q.x, q.y, q.z);
    const MaterialTensors t = material_at(p, q.x, q.y, q.z);
    const Eigen::Matrix3d ref = j.m * j.m.transpose() / j.det;
    EXPECT_LE((t.lambda - ref).cwiseAbs().maxCoeff(), 1e-13 * ref.cwiseAbs().maxCoeff());
    const Eigen::Matrix3d inv = ref.inverse();
    EXPECT_LE((t.inv_mu_r - inv).cwiseAbs().maxCoeff(), 1e-12 * inv.cwiseAbs().maxCoeff());
    EXPECT_EQ((t.lambda - t.lambda.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((t.inv_mu_r - t.inv_mu_r.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(t.lambda.determinant(), 1.0 / j.det, 1e-12);
  }
}

TEST(Transform, LambdaPositiveDefinite)
{
  for (const TaperProfile &p : {width_taper(), both_axes()})
  {
    for (const Point &q : random_points(p, 1000, 9))
    {
      const MaterialTensors t = material_at(p, q.x, q.y, q.z);
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.lambda);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(Transform, BackgroundMaterialScales)
{
  const TaperProfile p = both_axes();
  const MaterialTensors t1 = material_at(p, 1 * mm, 2 * mm, 7 * mm);
  const MaterialTensors t2 = material_at(p, 1 * mm, 2 * mm, 7 * mm, 2.5, 4.0);
  EXPECT_TRUE(t2.eps_r.isApprox(2.5 * t1.lambda, 1e-15));
  EXPECT_TRUE(t2.inv_mu_r.isApprox(t1.inv_mu_r / 4.0, 1e-15));
  EXPECT_THROW(material_at(p, 0.0, 0.0, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST(Transform, OutsidePrismThrows)
{
  const TaperProfile p = width_taper();
  EXPECT_THROW(jacobian_at(p, 0.3 * mm, 0.0, 0.0), std::out_of_range);
  EXPECT_THROW(jacobian_at(p, 0.0, 0.0, 2 * mm), std::out_of_range);
}

TEST(Transform, FieldMapIdentityAndDiagonal)
{
  Jacobian3 id{Eigen::Matrix3d::Identity(), 1.0};
  const Eigen::Vector3cd e(std::complex<double>(1, 2), 3.0, std::complex<double>(0, -1));
  EXPECT_EQ(map_field_to_physical(id, e), e);
  Jacobian3 d{Eigen::Vector3d(2.0, 1.0, 1.0).asDiagonal(), 2.0};
  const Eigen::Vector3cd e2(2.0, 0.0, 0.0);
  // Covariant map E' = J^T E and its inverse.
  EXPECT_EQ(map_field_to_physical(d, e2), Eigen::Vector3cd(4.0, 0.0, 0.0));
  EXPECT_EQ(map_field_to_transformed(d, e2), Eigen::Vector3cd(1.0, 0.0, 0.0));
}

TEST(Transform, FieldMapRoundTrip)
{
  const TaperProfile p = both_axes();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (const Point &q : random_points(p, 100, 2))
  {
    const Jacobian3 j = jacobian_at(p, q.x, q.y, q.z);
    const Eigen::Vector3cd e({g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)});
    const Eigen::Vector3cd back = map_field_to_transformed(j, map_field_to_physical(j, e));
    EXPECT_LE((back - e).norm(), 1e-14 * e.norm());
  }
}

TEST(Transform, NormalFieldOnWallStaysNormal)
{
  // A field normal to the prism wall x = a0/2 maps to a field normal to the physical
  // wall x' = a(z)/2, whose normal is (1, 0, -a'/2). Zero tangential E is preserved.
  const TaperProfile p = both_axes();
  for (double z : {1 * mm, 9 * mm, 17 * mm})
  {
    const Jacobian3 j = jacobian_at(p, 0.5 * p.a0(), 0.2 * p.b0(), z);
    const ProfileSample s = p.eval(z);
    const Eigen::Vector3d normal(1.0, 0.0, -0.5 * s.da_dz);
    const Eigen::Vector3cd phys = map_field_to_physical(j, Eigen::Vector3cd(1.0, 0.0, 0.0));
    const Eigen::Vector3d re = phys.real();
    EXPECT_LE(re.cross(normal).norm(), 1e-14 * re.norm());
    EXPECT_EQ(phys.imag().norm(), 0.0);
  }
}
