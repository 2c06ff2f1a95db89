// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_CONFIG_HPP
#define HIMOD_CONFIG_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "himod/assembly.hpp"
#include "himod/modes.hpp"
#include "himod/ports.hpp"
#include "himod/profiles.hpp"
#include "himod/quadrature.hpp"
#include "himod/scattering.hpp"

namespace himod
{

struct MeshConfig
{
  std::size_t elements = 0;           // uniform mesh when breakpoints is empty
  std::vector<double> breakpoints;    // [m]
  int degree = 2;                     // p_phi
};

// Overrides of the automatic quadrature orders; unset fields keep the defaults.
struct QuadratureConfig
{
  std::optional<int> nx, ny, nz, max_order;
  std::optional<double> rel_tol;
  std::optional<bool> adaptive;
};

struct OutputConfig
{
  std::string directory = ".";
  std::string basename = "himod";
  bool csv = true;
  bool touchstone = true;
  bool manifest = true;
};

//
// Validated run description, all quantities in SI units. The JSON schema:
//
//   units        "m" | "mm" | "um"   (lengths of profile and mesh; default "m")
//   profile      { kind, a0, b0, aL, bL, length, samples | samples_file, segments }
//   modes        { auto: N } | { list: ["TE10", ...] }
//   mesh         { elements, degree } | { breakpoints: [...], degree }
//   frequency    { start, stop, count, unit } | { list: [...], unit }  (Hz/kHz/MHz/GHz)
//   material     { eps_r, mu_r }
//   quadrature   { nx, ny, nz, rel_tol, max_order, adaptive }
//   port2_model  "covariant" | "scaled"
//   solver       { rcond_min }
//   output       { directory, basename, csv, touchstone, manifest }
//
struct SimulationConfig
{
  ProfileDescription profile_description;
  TaperProfile profile = TaperProfile::constant(1.0, 1.0, 1.0);
  ModeSelection modes = AutoSelection{1};
  MeshConfig mesh;
  std::vector<double> frequencies;  // [Hz], strictly increasing
  double eps_r = 1.0;
  double mu_r = 1.0;
  QuadratureConfig quadrature;
  Port2Model port2_model = Port2Model::covariant;
  double rcond_min = 1e-14;
  OutputConfig output;
  double length_unit = 1.0;  // meters per document length unit
  std::string echo;          // normalized JSON of the input document
};

// Parses and validates a JSON document. Relative sample-file paths resolve against
// base_dir. Throws ConfigError with the path of the offending key.
SimulationConfig parse_config(const std::string &text,
                              const std::filesystem::path &base_dir = ".");

// Reads and parses a file. Throws IoError if unreadable, ConfigError if invalid.
SimulationConfig load_config(const std::filesystem::path &path);

// Objects derived from a configuration, ready to assemble and sweep.
struct SimulationSetup
{
  TaperProfile profile;
  ModeBasis basis;
  Discretization1D disc;
  AssemblyOptions assembly;
  SweepOptions sweep;
  std::vector<double> frequencies;
};

SimulationSetup make_setup(const SimulationConfig &config, unsigned threads = 1);

struct SimulationRun
{
  SimulationSetup setup;
  AssemblyStats assembly;
  ScatteringResult result;
  double seconds = 0.0;
};

// Assembles once and sweeps the configured frequencies.
SimulationRun run_simulation(const SimulationConfig &config, unsigned threads = 1);

}  // namespace himod

#endif  // HIMOD_CONFIG_HPP
