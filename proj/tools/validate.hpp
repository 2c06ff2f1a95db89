// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_TOOLS_VALIDATE_HPP
#define HIMOD_TOOLS_VALIDATE_HPP

#include <ostream>

#include "himod/config.hpp"

namespace himod::tools
{

// Runs the basis, assembly, port and uniform-guide checks on the configured geometry and
// prints one line per check. Returns true when every check passes.
bool run_validation(const SimulationConfig &config, unsigned threads, std::ostream &out);

}  // namespace himod::tools

#endif  // HIMOD_TOOLS_VALIDATE_HPP
