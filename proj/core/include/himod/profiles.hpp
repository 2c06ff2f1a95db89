// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_PROFILES_HPP
#define HIMOD_PROFILES_HPP

#include <optional>
#include <vector>

namespace himod
{

enum class ProfileKind
{
  constant,
  linear,
  sinusoidal,
  tabulated,
  piecewise
};

const char *to_string(ProfileKind kind);

// Cross-section of the physical device at one axial position. Lengths in meters.
struct ProfileSample
{
  double a;
  double b;
  double da_dz;
  double db_dz;
};

struct TabulatedPoint
{
  double z;
  double a;
  double b;
};

//
// Width a(z) and height b(z) of a rectangular guide with smoothly varying section on
// [0, L]. Immutable after construction. All lengths are in meters.
//
//   linear:     a(z) = a0 + (aL - a0) z / L
//   sinusoidal: a(z) = a0 + (aL - a0) sin(pi z / (2 L))
//   tabulated:  monotone piecewise-cubic Hermite (PCHIP) interpolant through samples
//   piecewise:  concatenation of sub-profiles, value continuous at the junctions
//
// The same rule is applied to b(z).
//
class TaperProfile
{
public:
  static TaperProfile constant(double a0, double b0, double length);
  static TaperProfile linear(double a0, double b0, double aL, double bL, double length);
  static TaperProfile sinusoidal(double a0, double b0, double aL, double bL, double length);
  static TaperProfile tabulated(std::vector<TabulatedPoint> samples);
  static TaperProfile piecewise(std::vector<TaperProfile> segments);

  ProfileKind kind() const { return kind_; }
  double a0() const { return a0_; }
  double b0() const { return b0_; }
  double aL() const { return aL_; }
  double bL() const { return bL_; }
  double length() const { return length_; }

  // a, b and their exact derivatives at 0 <= z <= L. Throws std::out_of_range otherwise.
  ProfileSample eval(double z) const;

  // Interior positions where a(z) or b(z) loses smoothness (tabulated knots, segment
  // junctions). Sorted, strictly inside (0, L).
  std::vector<double> breakpoints() const;

  // Lower bound on a(z) and b(z) over the device, from a dense scan (used for domain
  // checks, not for numerics).
  double min_dimension() const;

  const std::vector<TabulatedPoint> &samples() const { return samples_; }
  const std::vector<TaperProfile> &segments() const { return segments_; }

private:
  TaperProfile() = default;

  ProfileKind kind_ = ProfileKind::constant;
  double a0_ = 0.0, b0_ = 0.0, aL_ = 0.0, bL_ = 0.0, length_ = 0.0;

  // tabulated: knots and Hermite slopes.
  std::vector<TabulatedPoint> samples_;
  std::vector<double> slope_a_, slope_b_;

  // piecewise: sub-profiles and their starting offsets.
  std::vector<TaperProfile> segments_;
  std::vector<double> offsets_;
};

// Parsed, unit-normalized description of a profile. Declared endpoint values are
// optional for the tabulated and piecewise kinds; when present they must agree with the
// represented profile.
struct ProfileDescription
{
  ProfileKind kind = ProfileKind::constant;
  std::optional<double> a0, b0, aL, bL, length;
  std::vector<TabulatedPoint> samples;
  std::vector<ProfileDescription> segments;
};

// Builds and validates a profile. Throws ConfigError on missing dimensions, endpoint
// mismatch or malformed samples.
TaperProfile make_profile(const ProfileDescription &description);

inline ProfileSample eval_profile(const TaperProfile &profile, double z)
{
  return profile.eval(z);
}

}  // namespace himod

#endif  // HIMOD_PROFILES_HPP
