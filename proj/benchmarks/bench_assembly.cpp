// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include <benchmark/benchmark.h>

#include "himod/config.hpp"

using namespace himod;

namespace
{

SimulationSetup setup_for(const char *name, std::size_t elements = 0)
{
  SimulationConfig c = load_config(std::filesystem::path(HIMOD_CONFIG_DIR) / name);
  if (elements > 0)
  {
    c.mesh.elements = elements;
  }
  return make_setup(c);
}

void BM_AssembleLinearTaper(benchmark::State &state)
{
  const SimulationSetup s = setup_for("linear_taper.json", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(assemble_AB(s.profile, s.basis, s.disc, s.assembly));
  }
  state.counters["dofs"] = static_cast<double>(dof_count(s.basis, s.disc));
}
BENCHMARK(BM_AssembleLinearTaper)->Arg(14)->Arg(28)->Arg(56)->Unit(benchmark::kMillisecond);

void BM_AssembleWidthTaper(benchmark::State &state)
{
  const SimulationSetup s = setup_for("width_taper.json");
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(assemble_AB(s.profile, s.basis, s.disc, s.assembly));
  }
}
BENCHMARK(BM_AssembleWidthTaper)->Unit(benchmark::kMillisecond);

void BM_AssembleFilter(benchmark::State &state)
{
  const SimulationSetup s = setup_for("eplane_filter.json");
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(assemble_AB(s.profile, s.basis, s.disc, s.assembly));
  }
  state.counters["dofs"] = static_cast<double>(dof_count(s.basis, s.disc));
}
BENCHMARK(BM_AssembleFilter)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
