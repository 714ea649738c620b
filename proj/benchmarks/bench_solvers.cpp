#include "budgetmech/analysis.hpp"
#include "budgetmech/families.hpp"
#include "budgetmech/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace budgetmech;

namespace {

FamilyParams prop7(int k) {
    FamilyParams p;
    p.name = FamilyName::Prop7;
    p.k = k;
    return p;
}

void BM_CashBondLp(benchmark::State& state) {
    const auto d = make_family(prop7(static_cast<int>(state.range(0)))).distribution;
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimal_lp_class(d, ClassSpec::CB()).value);
    }
}
BENCHMARK(BM_CashBondLp)->Arg(3)->Arg(6)->Arg(10);

void BM_FullClassBranch(benchmark::State& state) {
    FamilyParams p;
    p.name = FamilyName::Prop9;
    p.B = 5;
    p.eps = Rat(1, 2);
    const auto d = make_family(p).distribution;
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimal_full(d).value);
    }
}
BENCHMARK(BM_FullClassBranch);

void BM_DiscretizedPublicValuation(benchmark::State& state) {
    const auto d = example1_discretized(Rat(2), static_cast<int>(state.range(0)));
    SolveOptions opts;
    opts.indicator_cap = 4000;
    opts.node_budget = 200000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimal_full(d, opts).value);
    }
}
BENCHMARK(BM_DiscretizedPublicValuation)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
    FamilyParams p;
    p.name = FamilyName::Prop9;
    p.B = 5;
    p.eps = Rat(1, 2);
    const auto d = make_family(p).distribution;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            brute_force_oracle(d, ClassSpec::M(), static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_GridOracle)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
