// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_ERROR_HPP
#define HIMOD_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace himod
{

// Invalid or inconsistent user input (schema, units, geometry consistency).
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Failure of a numerical procedure: quadrature non-convergence, singular system,
// cutoff collision at a port.
class NumericalError : public std::runtime_error
{
public:
  explicit NumericalError(const std::string &what,
                          std::optional<double> frequency = std::nullopt)
    : std::runtime_error(what), frequency_(frequency)
  {
  }

  // Frequency [Hz] of the failing sample, when the failure is frequency specific.
  std::optional<double> frequency() const { return frequency_; }

private:
  std::optional<double> frequency_;
};

// File could not be read or written.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace himod

#endif  // HIMOD_ERROR_HPP
