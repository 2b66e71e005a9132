#include "ato/simulate.hpp"

#include <cmath>
#include <numeric>

namespace ato {

std::string Policy::name() const {
    switch (kind) {
    case PolicyKind::FOSVA: return "FOSVA";
    case PolicyKind::TS: return "TS";
    case PolicyKind::TS_NOS: return "TS_noS";
    case PolicyKind::MP_N: return "MP_" + std::to_string(tail);
    case PolicyKind::MS3: return "MS3";
    case PolicyKind::MS3_N: return "MS3_" + std::to_string(tail);
    case PolicyKind::SS: {
        // Integral alphas print without a decimal point: "SS(10)".
        double r = std::round(alpha);
        if (std::abs(alpha - r) < 1e-12) return "SS(" + std::to_string(static_cast<int>(r)) + ")";
        return "SS(" + std::to_string(alpha) + ")";
    }
    case PolicyKind::DET: return "DET";
    }
    return "?";
}

void Policy::validate() const {
    switch (kind) {
    case PolicyKind::MP_N:
        require(tail >= 2, "policy: MP_n needs tail >= 2");
        break;
    case PolicyKind::MS3_N:
        require(tail >= 3, "policy: MS3_n needs tail >= 3");
        break;
    case PolicyKind::FOSVA:
        require(value != nullptr, "policy: FOSVA needs a trained value approximation");
        break;
    case PolicyKind::SS:
        require(alpha >= 0.0 && alpha <= 100.0, "policy: SS alpha must be in [0,100]");
        require(det_horizon >= 1, "policy: SS needs a positive chain horizon");
        break;
    case PolicyKind::DET:
        require(det_horizon >= 1, "policy: DET needs a positive chain horizon");
        break;
    default: break;
    }
}

void Policy::prepare(const Instance& inst, const History& history) {
    validate();
    if (kind == PolicyKind::SS)
        ss_levels = std::make_shared<const std::vector<int>>(
            compute_ss_levels(history, alpha, inst.gozinto));
}

Policy make_policy(PolicyKind kind, int tail, double alpha) {
    Policy p;
    p.kind = kind;
    p.tail = tail;
    p.alpha = alpha;
    return p;
}

void SimulationConfig::validate() const {
    require(horizon_months >= 1, "simulation: horizon must be >= 1");
    require(replications >= 1, "simulation: need at least one replication");
    require(start_month >= 0 && start_month < 12, "simulation: bad start month");
}

double SimulationRecord::total_profit() const {
    double p = 0.0;
    for (const PeriodRecord& r : periods) p += r.profit();
    return p;
}

double SimulationRecord::total_inventory(int period) const {
    const auto& inv = periods.at(period).inventory;
    return static_cast<double>(std::accumulate(inv.begin(), inv.end(), 0LL));
}

double SimulationRecord::average_inventory() const {
    if (periods.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t t = 0; t < periods.size(); ++t) total += total_inventory(static_cast<int>(t));
    return total / static_cast<double>(periods.size());
}

long SimulationRecord::total_lost_sales() const {
    long total = 0;
    for (const PeriodRecord& r : periods)
        total += std::accumulate(r.lost_sales.begin(), r.lost_sales.end(), 0L);
    return total;
}

void SimulationRecord::validate_accounting(const Instance& inst) const {
    const int I = inst.num_components();
    const int J = inst.num_end_items();
    std::vector<long> available(initial_inventory.begin(), initial_inventory.end());

    for (std::size_t t = 0; t < periods.size(); ++t) {
        const PeriodRecord& r = periods[t];
        for (int j = 0; j < J; ++j)
            require(r.assembly[j] + r.lost_sales[j] == r.demand[j],
                    "record: assembly + lost sales != demand at period " + std::to_string(t));
        for (int i = 0; i < I; ++i) {
            long used = 0;
            for (int j = 0; j < J; ++j)
                used += static_cast<long>(inst.gozinto[i][j]) * r.assembly[j];
            require(r.inventory[i] >= 0, "record: negative inventory");
            require(available[i] - used == r.inventory[i],
                    "record: inventory recursion broken at period " + std::to_string(t));
            available[i] = r.inventory[i] + static_cast<long>(r.production[i]);
        }
        double revenue = 0.0, penalty = 0.0, holding = 0.0, production_cost = 0.0;
        for (int j = 0; j < J; ++j) {
            revenue += inst.price[j] * r.assembly[j];
            penalty += inst.lost_sale_penalty[j] * r.lost_sales[j];
        }
        for (int i = 0; i < I; ++i) {
            holding += inst.holding_cost[i] * r.inventory[i];
            production_cost += inst.component_cost[i] * r.production[i];
        }
        require(revenue == r.revenue && penalty == r.penalty && holding == r.holding &&
                    production_cost == r.production_cost,
                "record: money flows do not replay at period " + std::to_string(t));
    }
}

std::vector<int> default_initial_inventory(const Instance& inst,
                                           const std::vector<double>& mean_demand) {
    std::vector<double> req = average_component_requirement(inst, mean_demand);
    std::vector<int> inv(req.size());
    for (std::size_t i = 0; i < req.size(); ++i) inv[i] = to_piece_count(req[i]);
    return inv;
}

std::vector<std::vector<int>> sample_demand_path(const DemandModel& model, int start_month,
                                                 int horizon, RngStream& rng) {
    require(horizon >= 1, "demand path: horizon must be >= 1");
    std::vector<std::vector<int>> path;
    path.reserve(horizon);
    for (int t = 0; t < horizon; ++t) path.push_back(sample_month(model, (start_month + t) % 12, rng));
    return path;
}

namespace {

PlanningModel build_policy_model(const Instance& inst, const Policy& policy,
                                 const History& history, int month,
                                 const std::vector<int>& realized_demand) {
    switch (policy.kind) {
    case PolicyKind::FOSVA: {
        ScenarioTree tree = build_tree(TreeKind::TS, history, month, realized_demand);
        return build_fosva(inst, tree, policy.value->for_month(month));
    }
    case PolicyKind::TS:
        return build_multistage(inst, build_tree(TreeKind::TS, history, month, realized_demand));
    case PolicyKind::TS_NOS:
        return build_multistage(inst,
                                build_tree(TreeKind::TS_NOS, history, month, realized_demand));
    case PolicyKind::MP_N:
        return build_multistage(
            inst, build_tree(TreeKind::MP_N, history, month, realized_demand, policy.tail));
    case PolicyKind::MS3:
        return build_multistage(inst, build_tree(TreeKind::MS3, history, month, realized_demand));
    case PolicyKind::MS3_N:
        return build_multistage(
            inst, build_tree(TreeKind::MS3_N, history, month, realized_demand, policy.tail));
    case PolicyKind::SS: {
        ScenarioTree chain =
            build_tree(TreeKind::DET, history, month, realized_demand, policy.det_horizon);
        require(policy.ss_levels != nullptr, "policy: SS levels not prepared");
        return build_safety_stock(inst, chain, *policy.ss_levels);
    }
    case PolicyKind::DET:
        return build_multistage(
            inst, build_tree(TreeKind::DET, history, month, realized_demand, policy.det_horizon));
    }
    throw Error("policy: unknown kind");
}

PeriodRecord record_period(const Instance& inst, int month, const std::vector<int>& demand,
                           const PlanSolution& sol) {
    PeriodRecord r;
    r.month = month;
    r.demand = demand;
    r.assembly = sol.root_assembly;
    r.lost_sales = sol.root_lost_sales;
    r.production = sol.root_production;
    r.inventory = sol.root_inventory;
    for (int j = 0; j < inst.num_end_items(); ++j) {
        r.revenue += inst.price[j] * r.assembly[j];
        r.penalty += inst.lost_sale_penalty[j] * r.lost_sales[j];
    }
    for (int i = 0; i < inst.num_components(); ++i) {
        r.holding += inst.holding_cost[i] * r.inventory[i];
        r.production_cost += inst.component_cost[i] * r.production[i];
    }
    return r;
}

} // namespace

SimulationRecord run_rolling_horizon(const Instance& inst, const Policy& policy,
                                     const History& history,
                                     const std::vector<std::vector<int>>& demand_path,
                                     const std::vector<int>& initial_inventory, int start_month,
                                     const SolverConfig& solver_cfg) {
    policy.validate();
    require(!demand_path.empty(), "simulation: empty demand path");
    require(static_cast<int>(initial_inventory.size()) == inst.num_components(),
            "simulation: initial inventory dimension mismatch");

    SimulationRecord record;
    record.initial_inventory = initial_inventory;
    record.periods.reserve(demand_path.size());

    Instance current = inst;
    current.initial_inventory = initial_inventory;

    for (std::size_t t = 0; t < demand_path.size(); ++t) {
        const int month = (start_month + static_cast<int>(t)) % 12;
        const std::vector<int>& demand = demand_path[t];

        PlanningModel model = build_policy_model(current, policy, history, month, demand);
        PlanSolution sol = solve_plan(model, solver_cfg);
        if (sol.status == SolveStatus::infeasible)
            throw Error("simulation: " + policy.name() + " infeasible at period " +
                        std::to_string(t) + " (month " + std::to_string(month) + ")");

        record.periods.push_back(record_period(current, month, demand, sol));

        // Next month's opening stock: post-assembly inventory plus what was
        // just produced.
        for (int i = 0; i < current.num_components(); ++i)
            current.initial_inventory[i] = sol.root_inventory[i] + sol.root_production[i];
    }

    record.validate_accounting(inst);
    return record;
}

SimulationRecord run_rolling_horizon(const Instance& inst, const Policy& policy,
                                     const DemandModel& model, const History& history,
                                     const SimulationConfig& cfg, RngStream& path_rng,
                                     const SolverConfig& solver_cfg) {
    cfg.validate();
    auto path = sample_demand_path(model, cfg.start_month, cfg.horizon_months, path_rng);
    std::vector<int> init =
        inst.initial_inventory.empty()
            ? std::vector<int>(inst.num_components(), 0)
            : inst.initial_inventory;
    return run_rolling_horizon(inst, policy, history, path, init, cfg.start_month, solver_cfg);
}

SimulationRecord perfect_information(const Instance& inst,
                                     const std::vector<std::vector<int>>& demand_path,
                                     const std::vector<int>& initial_inventory, int start_month,
                                     const SolverConfig& solver_cfg) {
    require(!demand_path.empty(), "perfect information: empty demand path");
    Instance pi = inst;
    pi.initial_inventory = initial_inventory;

    ScenarioTree chain = build_chain_from_path(demand_path);
    PlanningModel model = build_multistage(pi, chain);
    PlanSolution sol = solve_plan(model, solver_cfg);
    require(sol.status != SolveStatus::infeasible, "perfect information: model infeasible");

    SimulationRecord record;
    record.initial_inventory = initial_inventory;
    record.periods.reserve(demand_path.size());
    for (std::size_t t = 0; t < demand_path.size(); ++t) {
        NodeFlows f = extract_flows(model, sol, static_cast<int>(t));
        PlanSolution node_view;
        node_view.root_production = std::move(f.production);
        node_view.root_assembly = std::move(f.assembly);
        node_view.root_lost_sales = std::move(f.lost_sales);
        node_view.root_inventory = std::move(f.inventory);
        record.periods.push_back(record_period(
            pi, (start_month + static_cast<int>(t)) % 12, demand_path[t], node_view));
    }
    record.validate_accounting(inst);
    return record;
}

} // namespace ato
