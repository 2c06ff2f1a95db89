// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/quadrature.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "himod/constants.hpp"

namespace himod
{

namespace
{

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  if (n == 0)
  {
    return {1.0, 0.0};
  }
  for (int k = 2; k <= n; k++)
  {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

QuadratureRule1D compute_rule(int n)
{
  QuadratureRule1D rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; i++)
  {
    // Tricomi initial guess, refined by Newton.
    double x = std::cos(constants::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; it++)
    {
      const auto [p, d] = legendre(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
  {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

struct RuleCache
{
  std::mutex mutex;
  std::array<std::unique_ptr<QuadratureRule1D>, max_gauss_order + 1> rules;
};

RuleCache &cache()
{
  static RuleCache c;
  return c;
}

}  // namespace

const QuadratureRule1D &gauss_nodes(int n)
{
  if (n < 1 || n > max_gauss_order)
  {
    throw std::out_of_range("Gauss-Legendre order out of range: " + std::to_string(n));
  }
  auto &c = cache();
  std::lock_guard lock(c.mutex);
  auto &slot = c.rules[static_cast<std::size_t>(n)];
  if (!slot)
  {
    slot = std::make_unique<QuadratureRule1D>(compute_rule(n));
  }
  return *slot;
}

std::vector<double> gauss_lobatto_points(int n)
{
  if (n < 2)
  {
    throw std::invalid_argument("Gauss-Lobatto rule needs at least two points");
  }
  // Interior points are the roots of P'_{n-1}.
  std::vector<double> x(n);
  x.front() = -1.0;
  x.back() = 1.0;
  const int m = n - 1;
  for (int i = 1; i < m; i++)
  {
    double r = -std::cos(constants::pi * i / m);
    for (int it = 0; it < 100; it++)
    {
      // d/dx P_m and d2/dx2 P_m from the Legendre equation.
      const auto [p, dp] = legendre(m, r);
      const double d2p = (2.0 * r * dp - m * (m + 1.0) * p) / (1.0 - r * r);
      const double dx = dp / d2p;
      r -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    x[i] = r;
  }
  return x;
}

MappedRule map_rule(const QuadratureRule1D &rule, double lo, double hi)
{
  MappedRule out;
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  out.x.resize(rule.nodes.size());
  out.w.resize(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); i++)
  {
    out.x[i] = mid + half * rule.nodes[i];
    out.w[i] = half * rule.weights[i];
  }
  return out;
}

}  // namespace himod
