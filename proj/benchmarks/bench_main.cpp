#include "ato/demand.hpp"
#include "ato/fosva.hpp"
#include "ato/instance.hpp"
#include "ato/models.hpp"
#include "ato/scenario.hpp"
#include "ato/simulate.hpp"

#include <benchmark/benchmark.h>

using namespace ato;

namespace {

struct Fixture {
    Instance inst;
    DemandModel model;
    History history;
    std::vector<int> root;

    Fixture() {
        InstanceConfig cfg;
        cfg.num_components = 18;
        cfg.num_end_items = 10;
        cfg.num_machines = 2;
        cfg.family_sizes = {4, 3, 2};
        cfg.family_component_counts = {6, 5, 4};
        cfg.num_outcast_items = 1;
        inst = generate_instance(cfg, 1);
        model = canonical_demand_model(CorrelationMode::family, {4, 3, 2, 1}, 1);
        RngStream mean_rng = RngStream::from_key(1, {1});
        auto mean = estimate_mean_demand(model, 2000, mean_rng);
        compute_capacities(inst, 1.3, mean);
        inst.initial_inventory = default_initial_inventory(inst, mean);
        RngStream hist_rng = RngStream::from_key(1, {2});
        history = generate_history(model, 10, hist_rng);
        RngStream rng = RngStream::from_key(1, {3});
        root = sample_month(model, 6, rng);
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

} // namespace

static void BM_SampleMonth(benchmark::State& state) {
    const Fixture& f = fixture();
    RngStream rng(9);
    for (auto _ : state) {
        auto d = sample_month(f.model, 6, rng);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_SampleMonth);

static void BM_GenerateHistory10y(benchmark::State& state) {
    const Fixture& f = fixture();
    RngStream rng(10);
    for (auto _ : state) {
        History h = generate_history(f.model, 10, rng);
        benchmark::DoNotOptimize(h);
    }
}
BENCHMARK(BM_GenerateHistory10y);

static void BM_BuildTree(benchmark::State& state) {
    const Fixture& f = fixture();
    const TreeKind kind = static_cast<TreeKind>(state.range(0));
    const int tail = kind == TreeKind::MS3_N ? 4 : (kind == TreeKind::DET ? 12 : 0);
    for (auto _ : state) {
        ScenarioTree tree = build_tree(kind, f.history, 6, f.root, tail);
        benchmark::DoNotOptimize(tree);
    }
}
BENCHMARK(BM_BuildTree)
    ->Arg(static_cast<int>(TreeKind::TS))
    ->Arg(static_cast<int>(TreeKind::MS3))
    ->Arg(static_cast<int>(TreeKind::MS3_N))
    ->Arg(static_cast<int>(TreeKind::DET));

static void BM_BuildModelTS(benchmark::State& state) {
    const Fixture& f = fixture();
    ScenarioTree tree = build_tree(TreeKind::TS, f.history, 6, f.root);
    for (auto _ : state) {
        PlanningModel pm = build_multistage(f.inst, tree);
        benchmark::DoNotOptimize(pm);
    }
}
BENCHMARK(BM_BuildModelTS);

static void BM_SolveTS(benchmark::State& state) {
    const Fixture& f = fixture();
    ScenarioTree tree = build_tree(TreeKind::TS, f.history, 6, f.root);
    SolverConfig cfg;
    cfg.relative_gap = 1e-4;
    cfg.time_limit_s = 30.0;
    for (auto _ : state) {
        PlanningModel pm = build_multistage(f.inst, tree);
        PlanSolution sol = solve_plan(pm, cfg);
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(BM_SolveTS)->Unit(benchmark::kMillisecond);

static void BM_SolveRelaxationTS(benchmark::State& state) {
    const Fixture& f = fixture();
    ScenarioTree tree = build_tree(TreeKind::TS, f.history, 6, f.root);
    SolverConfig cfg;
    for (auto _ : state) {
        PlanningModel pm = build_multistage(f.inst, tree);
        double v = solve_relaxation_value(pm, cfg);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_SolveRelaxationTS)->Unit(benchmark::kMillisecond);

static void BM_UpdateApprox(benchmark::State& state) {
    RngStream rng(3);
    PiecewiseValue pv;
    for (auto _ : state) {
        update_approx(pv, rng.uniform(0.0, 1000.0), rng.uniform(-5.0, 5.0),
                      rng.uniform(-5.0, 5.0), 0.5);
        benchmark::DoNotOptimize(pv);
    }
}
BENCHMARK(BM_UpdateApprox);

BENCHMARK_MAIN();
