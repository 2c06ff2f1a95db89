// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_QUADRATURE_HPP
#define HIMOD_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <type_traits>
#include <vector>

#include "himod/error.hpp"

namespace himod
{

// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule1D
{
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int max_gauss_order = 512;

// Cached rule of the given order, 1 <= n <= max_gauss_order. Thread safe; the returned
// reference stays valid for the lifetime of the program.
const QuadratureRule1D &gauss_nodes(int n);

// Gauss-Lobatto-Legendre points on [-1, 1] (n >= 2), endpoints included.
std::vector<double> gauss_lobatto_points(int n);

struct BoxQuadSpec
{
  int nx = 8;
  int ny = 8;
  int nz = 4;
  double rel_tol = 1.5e-5;
  int max_order = 256;
  bool adaptive = true;
};

struct Box
{
  double x0, x1, y0, y1, z0, z1;
};

// Next order of the adaptive escalation, ceil(1.5 n).
inline int escalate_order(int n)
{
  return std::max(n + 1, static_cast<int>(std::ceil(1.5 * n)));
}

// Tensor-product rule mapped to [lo, hi].
struct MappedRule
{
  std::vector<double> x;
  std::vector<double> w;
};

MappedRule map_rule(const QuadratureRule1D &rule, double lo, double hi);

// Fixed-order iterated tensor-product sum of f(x, y, z) over the box.
template <typename F>
auto integrate_box_fixed(F &&f, const Box &box, int nx, int ny, int nz)
{
  using R = std::decay_t<decltype(f(0.0, 0.0, 0.0))>;
  const MappedRule rx = map_rule(gauss_nodes(nx), box.x0, box.x1);
  const MappedRule ry = map_rule(gauss_nodes(ny), box.y0, box.y1);
  const MappedRule rz = map_rule(gauss_nodes(nz), box.z0, box.z1);
  R total{};
  for (std::size_t k = 0; k < rz.x.size(); k++)
  {
    R plane{};
    for (std::size_t j = 0; j < ry.x.size(); j++)
    {
      R line{};
      for (std::size_t i = 0; i < rx.x.size(); i++)
      {
        line += rx.w[i] * f(rx.x[i], ry.x[j], rz.x[k]);
      }
      plane += ry.w[j] * line;
    }
    total += rz.w[k] * plane;
  }
  return total;
}

//
// Integrates f over the box. With spec.adaptive, all orders are escalated
// (n -> ceil(1.5 n)) until two successive estimates agree to spec.rel_tol relative, and
// the finer estimate is returned. Throws NumericalError when max_order is exceeded.
//
template <typename F>
auto integrate_box(F &&f, const Box &box, const BoxQuadSpec &spec)
{
  int nx = spec.nx, ny = spec.ny, nz = spec.nz;
  auto prev = integrate_box_fixed(f, box, nx, ny, nz);
  if (!spec.adaptive)
  {
    return prev;
  }
  while (true)
  {
    nx = escalate_order(nx);
    ny = escalate_order(ny);
    nz = escalate_order(nz);
    if (std::max({nx, ny, nz}) > std::min(spec.max_order, max_gauss_order))
    {
      std::ostringstream msg;
      msg.precision(17);
      msg << "quadrature did not converge to rel_tol " << spec.rel_tol
          << " below order " << spec.max_order << "; last estimate " << prev;
      throw NumericalError(msg.str());
    }
    auto next = integrate_box_fixed(f, box, nx, ny, nz);
    const double diff = std::abs(next - prev);
    const double scale = std::max(std::abs(next), std::abs(prev));
    if (diff <= spec.rel_tol * scale || scale == 0.0)
    {
      return next;
    }
    prev = next;
  }
}

}  // namespace himod

#endif  // HIMOD_QUADRATURE_HPP
