// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_CONSTANTS_HPP
#define HIMOD_CONSTANTS_HPP

#include <numbers>

namespace himod::constants
{

inline constexpr double pi = std::numbers::pi;

// Speed of light in vacuum [m/s] (exact, SI).
inline constexpr double c0 = 299792458.0;

// Vacuum permeability [H/m], CODATA 2018.
inline constexpr double mu0 = 1.25663706212e-6;

// Vacuum permittivity [F/m], consistent with c0 and mu0.
inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);

}  // namespace himod::constants

#endif  // HIMOD_CONSTANTS_HPP
