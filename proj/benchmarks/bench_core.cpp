#include <cstddef>
#include <memory>

#include <benchmark/benchmark.h>

#include "msl/analysis.hpp"
#include "msl/campaign.hpp"
#include "msl/propagator.hpp"

namespace {

std::shared_ptr<const msl::Problem> instance_problem(std::size_t atoms) {
    msl::InstanceConfig cfg;
    cfg.max_atoms = atoms;
    cfg.max_breakpoints = atoms;
    return msl::random_instance(7, cfg, msl::CampaignMode::isolation).problem;
}

void BM_SolveIvp(benchmark::State& state) {
    const auto p = instance_problem(static_cast<std::size_t>(state.range(0)));
    const double x0 = 0.5 * (p->interval().a + p->interval().b);
    for (auto _ : state) {
        benchmark::DoNotOptimize(msl::solve_ivp(p, x0, 0.3, 1.0));
    }
}
BENCHMARK(BM_SolveIvp)->Arg(0)->Arg(4)->Arg(10);

void BM_Evaluate(benchmark::State& state) {
    const auto p = instance_problem(4);
    const msl::Interval iv = p->interval();
    const msl::Solution u = msl::solve_ivp(p, 0.5 * (iv.a + iv.b), 0.3, 1.0);
    double x = iv.a;
    const double step = iv.length() / 1021.0;
    for (auto _ : state) {
        x += step;
        if (x >= iv.b) x = iv.a + step;
        benchmark::DoNotOptimize(u.evaluate(x));
    }
}
BENCHMARK(BM_Evaluate);

void BM_FindSignChanges(benchmark::State& state) {
    const auto p = instance_problem(static_cast<std::size_t>(state.range(0)));
    const msl::Solution u = msl::solve_ivp(p, 0.5 * (p->interval().a + p->interval().b), 0.3, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(msl::find_sign_changes(u));
    }
}
BENCHMARK(BM_FindSignChanges)->Arg(0)->Arg(4)->Arg(10);

void BM_SeparationCampaign(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(msl::run_campaign(msl::CampaignMode::separation, 20, 42));
    }
}
BENCHMARK(BM_SeparationCampaign)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
