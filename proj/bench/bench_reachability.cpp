// Parallel vs serial truth-table enumeration. The corpus policies have at
// most three sites, so a synthetic chain of n independent comparisons is
// used to get 2^n rows.

#include <benchmark/benchmark.h>

#include <string>

#include "prism/analyze.hpp"
#include "prism/contexts.hpp"

namespace {

const char* kContext = R"(----context
context Bench extends Core1

type Action extends Tool
external act : Number - Action
idle : Action
)";

prism::EnvPtr benchEnv() {
  static prism::EnvPtr env = [] {
    prism::Workspace ws;
    ws.addSource("bench.prism", kContext);
    return ws.env("Bench");
  }();
  return env;
}

// (gt 1 0)[Action] (act 1) ((gt 2 0)[Action] (act 2) (... idle))
std::string chain(int n) {
  std::string src = "idle";
  for (int i = n; i >= 1; --i) {
    std::string k = std::to_string(i);
    src = "(gt " + k + " 0)[Action] (act " + k + ") (" + src + ")";
  }
  return src;
}

template <bool Parallel>
void enumerate(benchmark::State& state) {
  auto env = benchEnv();
  int n = static_cast<int>(state.range(0));
  auto policy = prism::parseAndElaborateTerm(*env, chain(n));
  for (auto _ : state) {
    auto report = Parallel ? prism::enumerateReachable(*env, policy, 24)
                           : prism::enumerateReachableSerial(*env, policy, 24);
    benchmark::DoNotOptimize(report.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}

}  // namespace

BENCHMARK(enumerate<false>)->Name("serial")->Arg(6)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(enumerate<true>)->Name("openmp")->Arg(6)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
