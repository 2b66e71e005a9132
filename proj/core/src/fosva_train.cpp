#include "ato/fosva_train.hpp"

#include "ato/parallel.hpp"

#include <mutex>

namespace ato {

std::vector<double> default_inventory_cap(const Instance& inst,
                                          const std::vector<double>& mean_demand) {
    std::vector<double> cap = average_component_requirement(inst, mean_demand);
    for (double& c : cap) c = std::max(3.0 * c, 1.0);
    return cap;
}

namespace {

/// Objective of the two-stage model as a function of initial inventory.
/// Training uses the LP relaxation: its value function is the exact concave
/// envelope in the inventory right-hand sides, so finite differences carry
/// no branch-and-bound noise.
InventoryValueFn make_ts_value_fn(const Instance& inst, const ScenarioTree& tree,
                                  const SolverConfig& solver_cfg, bool relaxed) {
    return [&inst, &tree, solver_cfg, relaxed](const std::vector<double>& inventory) {
        Instance probe = inst;
        for (std::size_t i = 0; i < inventory.size(); ++i)
            probe.initial_inventory[i] = to_piece_count(inventory[i]);
        PlanningModel model = build_multistage(probe, tree);
        if (relaxed) return solve_relaxation_value(model, solver_cfg);
        MilpSolution sol = solve_milp(model.milp, solver_cfg);
        require(sol.status != SolveStatus::infeasible,
                "fosva training: two-stage solve came back infeasible");
        return sol.objective;
    };
}

} // namespace

SeasonalValueApprox train_fosva(const Instance& inst, const History& history,
                                const FosvaConfig& cfg, const SolverConfig& solver_cfg,
                                int threads, TrainStats* stats) {
    cfg.validate();
    require(history.num_items() == inst.num_end_items(),
            "fosva training: history does not match instance");

    SolverConfig training_cfg = solver_cfg;
    training_cfg.relative_gap = cfg.training_gap;

    SeasonalValueApprox out;
    out.monthly = cfg.monthly;
    const int slots = cfg.monthly ? 12 : 1;
    out.approx.resize(slots);

    const MonthObservations by_month = group_history_by_month(history);

    std::mutex stats_mutex;
    parallel_for(
        slots, threads,
        [&](int slot) {
            // The training root carries zero demand: the approximation
            // measures the worth of stock entering the future, and the
            // attach point has already served the current month. A demand-
            // bearing root would re-sell a month of stock and inflate every
            // slope to lost-sale magnitudes.
            const std::vector<int> no_demand(history.num_items(), 0);
            ScenarioTree tree = cfg.monthly
                                    ? build_tree(TreeKind::TS, history, slot, no_demand)
                                    : build_tree(TreeKind::TS_NOS, history, 0, no_demand);

            InventoryValueFn value_fn =
                make_ts_value_fn(inst, tree, training_cfg, cfg.train_on_relaxation);
            RngStream rng = RngStream::from_key(cfg.seed, {0xf05aULL, static_cast<std::uint64_t>(slot)});
            TrainStats local;
            out.approx[slot] =
                train_value_approx(value_fn, inst.num_components(), cfg, rng, &local);
            if (stats) {
                std::lock_guard<std::mutex> lock(stats_mutex);
                stats->ts_solves += local.ts_solves;
            }
        },
        solver_release_thread_state);

    out.validate();
    return out;
}

} // namespace ato
