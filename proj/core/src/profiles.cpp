// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "himod/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "himod/constants.hpp"
#include "himod/error.hpp"

namespace himod
{

namespace
{

constexpr double endpoint_rel_tol = 1e-12;
constexpr double continuity_rel_tol = 1e-9;

bool close_rel(double x, double y, double tol)
{
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

// Fritsch-Carlson slopes with the three-point, shape-preserving end conditions.
std::vector<double> pchip_slopes(const std::vector<double> &z, const std::vector<double> &y)
{
  const std::size_t n = z.size();
  std::vector<double> d(n, 0.0);
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; k++)
  {
    h[k] = z[k + 1] - z[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  if (n == 2)
  {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; k++)
  {
    if (delta[k - 1] * delta[k] <= 0.0)
    {
      d[k] = 0.0;
      continue;
    }
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1)
  {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (std::signbit(s) != std::signbit(d0) || d0 == 0.0)
    {
      s = 0.0;
    }
    else if (std::signbit(d0) != std::signbit(d1) && std::abs(s) > 3.0 * std::abs(d0))
    {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

// Cubic Hermite value and derivative on [z0, z1].
std::pair<double, double> hermite(double z, double z0, double z1, double y0, double y1,
                                  double d0, double d1)
{
  const double h = z1 - z0;
  const double t = (z - z0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  const double dh00 = 6 * t2 - 6 * t, dh10 = 3 * t2 - 4 * t + 1;
  const double dh01 = -6 * t2 + 6 * t, dh11 = 3 * t2 - 2 * t;
  const double slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
  return {value, slope};
}

void require_positive_length(double value, const char *name)
{
  if (!(value > 0.0) || !std::isfinite(value))
  {
    std::ostringstream msg;
    msg << "profile dimension " << name << " must be positive and finite (got " << value
        << ")";
    throw ConfigError(msg.str());
  }
}

}  // namespace

const char *to_string(ProfileKind kind)
{
  switch (kind)
  {
    case ProfileKind::constant:
      return "constant";
    case ProfileKind::linear:
      return "linear";
    case ProfileKind::sinusoidal:
      return "sinusoidal";
    case ProfileKind::tabulated:
      return "tabulated";
    case ProfileKind::piecewise:
      return "piecewise";
  }
  return "unknown";
}

TaperProfile TaperProfile::constant(double a0, double b0, double length)
{
  require_positive_length(a0, "a0");
  require_positive_length(b0, "b0");
  require_positive_length(length, "L");
  TaperProfile p;
  p.kind_ = ProfileKind::constant;
  p.a0_ = p.aL_ = a0;
  p.b0_ = p.bL_ = b0;
  p.length_ = length;
  return p;
}

TaperProfile TaperProfile::linear(double a0, double b0, double aL, double bL, double length)
{
  require_positive_length(a0, "a0");
  require_positive_length(b0, "b0");
  require_positive_length(aL, "aL");
  require_positive_length(bL, "bL");
  require_positive_length(length, "L");
  TaperProfile p;
  p.kind_ = ProfileKind::linear;
  p.a0_ = a0;
  p.b0_ = b0;
  p.aL_ = aL;
  p.bL_ = bL;
  p.length_ = length;
  return p;
}

TaperProfile TaperProfile::sinusoidal(double a0, double b0, double aL, double bL,
                                      double length)
{
  TaperProfile p = linear(a0, b0, aL, bL, length);
  p.kind_ = ProfileKind::sinusoidal;
  // a0 + (aL - a0) sin(.) lies between a0 and aL, so positivity follows from the ends.
  return p;
}

TaperProfile TaperProfile::tabulated(std::vector<TabulatedPoint> samples)
{
  if (samples.size() < 2)
  {
    throw ConfigError("tabulated profile needs at least two samples");
  }
  if (samples.front().z != 0.0)
  {
    throw ConfigError("tabulated profile must start at z = 0");
  }
  for (std::size_t k = 0; k < samples.size(); k++)
  {
    if (k > 0 && !(samples[k].z > samples[k - 1].z))
    {
      std::ostringstream msg;
      msg << "tabulated profile z values must be strictly increasing (sample " << k
          << ")";
      throw ConfigError(msg.str());
    }
    if (!(samples[k].a > 0.0) || !(samples[k].b > 0.0))
    {
      std::ostringstream msg;
      msg << "tabulated profile sample " << k << " has non-positive dimension";
      throw ConfigError(msg.str());
    }
  }
  TaperProfile p;
  p.kind_ = ProfileKind::tabulated;
  std::vector<double> z(samples.size()), a(samples.size()), b(samples.size());
  for (std::size_t k = 0; k < samples.size(); k++)
  {
    z[k] = samples[k].z;
    a[k] = samples[k].a;
    b[k] = samples[k].b;
  }
  p.slope_a_ = pchip_slopes(z, a);
  p.slope_b_ = pchip_slopes(z, b);
  p.a0_ = a.front();
  p.b0_ = b.front();
  p.aL_ = a.back();
  p.bL_ = b.back();
  p.length_ = z.back();
  p.samples_ = std::move(samples);
  // PCHIP preserves monotonicity between knots, so the interpolant stays within the
  // range of neighbouring samples and remains positive.
  return p;
}

TaperProfile TaperProfile::piecewise(std::vector<TaperProfile> segments)
{
  if (segments.empty())
  {
    throw ConfigError("piecewise profile needs at least one segment");
  }
  TaperProfile p;
  p.kind_ = ProfileKind::piecewise;
  double offset = 0.0;
  for (std::size_t k = 0; k < segments.size(); k++)
  {
    if (k > 0)
    {
      const auto &prev = segments[k - 1];
      const auto &next = segments[k];
      if (!close_rel(prev.aL(), next.a0(), continuity_rel_tol) ||
          !close_rel(prev.bL(), next.b0(), continuity_rel_tol))
      {
        std::ostringstream msg;
        msg << "piecewise profile is discontinuous at junction " << k << ": (" << prev.aL()
            << ", " << prev.bL() << ") -> (" << next.a0() << ", " << next.b0() << ")";
        throw ConfigError(msg.str());
      }
    }
    p.offsets_.push_back(offset);
    offset += segments[k].length();
  }
  p.a0_ = segments.front().a0();
  p.b0_ = segments.front().b0();
  p.aL_ = segments.back().aL();
  p.bL_ = segments.back().bL();
  p.length_ = offset;
  p.segments_ = std::move(segments);
  return p;
}

ProfileSample TaperProfile::eval(double z) const
{
  const double slack = 1e-14 * length_;
  if (!(z >= -slack && z <= length_ + slack))
  {
    std::ostringstream msg;
    msg << "profile evaluated outside [0, L]: z = " << z << ", L = " << length_;
    throw std::out_of_range(msg.str());
  }
  z = std::clamp(z, 0.0, length_);

  switch (kind_)
  {
    case ProfileKind::constant:
      return {a0_, b0_, 0.0, 0.0};
    case ProfileKind::linear:
    {
      const double t = z / length_;
      return {a0_ + (aL_ - a0_) * t, b0_ + (bL_ - b0_) * t, (aL_ - a0_) / length_,
              (bL_ - b0_) / length_};
    }
    case ProfileKind::sinusoidal:
    {
      const double arg = constants::pi * z / (2.0 * length_);
      const double s = std::sin(arg);
      const double ds = std::cos(arg) * constants::pi / (2.0 * length_);
      // Endpoint values are returned verbatim so that a(L) = aL holds exactly.
      if (z == length_)
      {
        return {aL_, bL_, 0.0, 0.0};
      }
      return {a0_ + (aL_ - a0_) * s, b0_ + (bL_ - b0_) * s, (aL_ - a0_) * ds,
              (bL_ - b0_) * ds};
    }
    case ProfileKind::tabulated:
    {
      auto it = std::upper_bound(samples_.begin(), samples_.end(), z,
                                 [](double v, const TabulatedPoint &s) { return v < s.z; });
      std::size_t k = static_cast<std::size_t>(std::distance(samples_.begin(), it));
      k = std::clamp<std::size_t>(k, 1, samples_.size() - 1) - 1;
      const auto &s0 = samples_[k];
      const auto &s1 = samples_[k + 1];
      const auto [a, da] = hermite(z, s0.z, s1.z, s0.a, s1.a, slope_a_[k], slope_a_[k + 1]);
      const auto [b, db] = hermite(z, s0.z, s1.z, s0.b, s1.b, slope_b_[k], slope_b_[k + 1]);
      return {a, b, da, db};
    }
    case ProfileKind::piecewise:
    {
      auto it = std::upper_bound(offsets_.begin(), offsets_.end(), z);
      std::size_t k = static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
      const auto &seg = segments_[k];
      return seg.eval(std::min(z - offsets_[k], seg.length()));
    }
  }
  throw std::logic_error("unhandled profile kind");
}

std::vector<double> TaperProfile::breakpoints() const
{
  std::vector<double> out;
  if (kind_ == ProfileKind::tabulated)
  {
    for (std::size_t k = 1; k + 1 < samples_.size(); k++)
    {
      out.push_back(samples_[k].z);
    }
  }
  else if (kind_ == ProfileKind::piecewise)
  {
    for (std::size_t k = 0; k < segments_.size(); k++)
    {
      if (k > 0)
      {
        out.push_back(offsets_[k]);
      }
      for (double zb : segments_[k].breakpoints())
      {
        out.push_back(offsets_[k] + zb);
      }
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

double TaperProfile::min_dimension() const
{
  double m = std::min(std::min(a0_, b0_), std::min(aL_, bL_));
  constexpr int n = 2048;
  for (int k = 0; k <= n; k++)
  {
    const auto s = eval(length_ * k / n);
    m = std::min(m, std::min(s.a, s.b));
  }
  for (double zb : breakpoints())
  {
    const auto s = eval(zb);
    m = std::min(m, std::min(s.a, s.b));
  }
  return m;
}

TaperProfile make_profile(const ProfileDescription &d)
{
  auto need = [&](const std::optional<double> &v, const char *name)
  {
    if (!v)
    {
      std::ostringstream msg;
      msg << to_string(d.kind) << " profile requires dimension " << name;
      throw ConfigError(msg.str());
    }
    return *v;
  };

  TaperProfile p = [&]()
  {
    switch (d.kind)
    {
      case ProfileKind::constant:
      {
        const double a0 = need(d.a0, "a0"), b0 = need(d.b0, "b0");
        if ((d.aL && !close_rel(*d.aL, a0, endpoint_rel_tol)) ||
            (d.bL && !close_rel(*d.bL, b0, endpoint_rel_tol)))
        {
          throw ConfigError("constant profile requires aL = a0 and bL = b0");
        }
        return TaperProfile::constant(a0, b0, need(d.length, "L"));
      }
      case ProfileKind::linear:
        return TaperProfile::linear(need(d.a0, "a0"), need(d.b0, "b0"), need(d.aL, "aL"),
                                    need(d.bL, "bL"), need(d.length, "L"));
      case ProfileKind::sinusoidal:
        return TaperProfile::sinusoidal(need(d.a0, "a0"), need(d.b0, "b0"),
                                        need(d.aL, "aL"), need(d.bL, "bL"),
                                        need(d.length, "L"));
      case ProfileKind::tabulated:
        return TaperProfile::tabulated(d.samples);
      case ProfileKind::piecewise:
      {
        std::vector<TaperProfile> segs;
        segs.reserve(d.segments.size());
        for (const auto &s : d.segments)
        {
          segs.push_back(make_profile(s));
        }
        return TaperProfile::piecewise(std::move(segs));
      }
    }
    throw ConfigError("unknown profile kind");
  }();

  // Declared dimensions must agree with the represented profile.
  auto check = [&](const std::optional<double> &declared, double actual, const char *name)
  {
    if (declared && !close_rel(*declared, actual, endpoint_rel_tol))
    {
      std::ostringstream msg;
      msg.precision(12);
      msg << "endpoint mismatch: declared " << name << " = " << *declared
          << " m but the profile evaluates to " << actual << " m";
      throw ConfigError(msg.str());
    }
  };
  check(d.a0, p.eval(0.0).a, "a0");
  check(d.b0, p.eval(0.0).b, "b0");
  check(d.aL, p.eval(p.length()).a, "aL");
  check(d.bL, p.eval(p.length()).b, "bL");
  check(d.length, p.length(), "L");
  if (!(p.min_dimension() > 0.0))
  {
    throw ConfigError("profile dimensions must stay positive on [0, L]");
  }
  return p;
}

}  // namespace himod
