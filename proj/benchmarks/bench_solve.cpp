// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <benchmark/benchmark.h>

#include "himod/config.hpp"

using namespace himod;

namespace
{

struct Prepared
{
  SimulationSetup setup;
  AssembledSystem system;
};

const Prepared &prepared(const char *name)
{
  static std::map<std::string, std::unique_ptr<Prepared>> cache;
  auto &slot = cache[name];
  if (!slot)
  {
    SimulationSetup s = make_setup(load_config(std::filesystem::path(HIMOD_CONFIG_DIR) / name));
    AssembledSystem sys = assemble_AB(s.profile, s.basis, s.disc, s.assembly);
    slot = std::make_unique<Prepared>(Prepared{std::move(s), std::move(sys)});
  }
  return *slot;
}

void solve_bench(benchmark::State &state, const char *name)
{
  const Prepared &p = prepared(name);
  const double f = p.setup.frequencies[p.setup.frequencies.size() / 2];
  FrequencySolver solver(p.system);
  for (auto _ : state)
  {
    const PortCoupling pc = assemble_port_coupling(p.setup.basis, p.setup.disc, p.setup.profile, f);
    benchmark::DoNotOptimize(solver.solve(pc, f));
  }
  state.counters["dofs"] = static_cast<double>(p.system.A.rows());
}

void BM_SolveLinearTaper(benchmark::State &state) { solve_bench(state, "linear_taper.json"); }
BENCHMARK(BM_SolveLinearTaper)->Unit(benchmark::kMicrosecond);

void BM_SolveFilter(benchmark::State &state) { solve_bench(state, "eplane_filter.json"); }
BENCHMARK(BM_SolveFilter)->Unit(benchmark::kMillisecond);

void BM_PortCouplingFilter(benchmark::State &state)
{
  const Prepared &p = prepared("eplane_filter.json");
  const double f = p.setup.frequencies.front();
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(
        assemble_port_coupling(p.setup.basis, p.setup.disc, p.setup.profile, f));
  }
}
BENCHMARK(BM_PortCouplingFilter)->Unit(benchmark::kMillisecond);

}  // namespace
