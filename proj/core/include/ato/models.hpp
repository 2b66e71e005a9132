#pragma once

#include "ato/fosva.hpp"
#include "ato/instance.hpp"
#include "ato/milp.hpp"
#include "ato/scenario.hpp"
#include "ato/solver.hpp"

#include <vector>

namespace ato {

/// A lowered planning MILP plus the index maps that tie columns back to
/// production/inventory/assembly/lost-sales roles per tree node. Variables
/// are created role-major (x, I, y, l, then value segments), node-major
/// within each role, so LP/MPS exports have a stable documented order.
class PlanningModel {
public:
    MilpModel milp;

    int num_nodes = 0;
    int num_components = 0;
    int num_items = 0;

    int x_var(int node, int component) const;   // production
    int inv_var(int node, int component) const; // post-assembly inventory
    int y_var(int node, int item) const;        // assembly
    int l_var(int node, int item) const;        // lost sales

    bool has_value_terms() const { return !segment_offset_.empty(); }
    int m_var(int scenario, int component, int segment) const; // value segments, FOSVA only
    int segment_count(int component) const { return segment_count_.at(component); }

    /// Rounds an LP-relaxation point to a feasible integer plan: production
    /// floors, then top-down assembly repair guided by the LP targets with
    /// a value-ordered top-up. Used as the solver's starting incumbent; the
    /// tight LP bound of these models does the rest.
    std::vector<double> lp_guided_incumbent(const std::vector<double>& lp_values) const;

    /// lp_guided_incumbent with the leaf assemblies re-solved exactly as
    /// independent small integer programs (production stays at the LP
    /// floors). Worth the extra solves on large models where branch and
    /// bound struggles to improve incumbents.
    std::vector<double> lp_guided_incumbent_exact_leaves(const std::vector<double>& lp_values,
                                                         const SolverConfig& cfg) const;

    // populated by builders
    std::vector<double> node_prob;
    std::vector<int> node_parent;

private:
    friend PlanningModel build_multistage(const Instance&, const ScenarioTree&);
    friend PlanningModel build_fosva(const Instance&, const ScenarioTree&, const ValueApprox&);
    friend PlanningModel build_safety_stock(const Instance&, const ScenarioTree&,
                                            const std::vector<int>&);

    /// Shared lowering: variable blocks, capacity/balance/demand rows, and
    /// the expected-profit objective over any tree.
    static PlanningModel lower_tree(const Instance& inst, const ScenarioTree& tree);

    int m_base_ = -1;
    int num_scenarios_ = 0;
    int total_segments_ = 0;
    std::vector<int> segment_offset_; // per component, prefix sums of segment counts
    std::vector<int> segment_count_;

    // retained for the incumbent heuristic
    Instance instance_;
    std::vector<std::vector<int>> node_demand_;
    std::vector<int> min_inventory_; // safety-stock floors; empty otherwise
};

/// Deterministic-equivalent MILP over any scenario tree: expected profit
/// objective, per-node capacity, inventory balance, and demand-link rows.
/// Covers the plain two-stage model as the depth-1 special case and
/// deterministic chains as branching-1 trees.
PlanningModel build_multistage(const Instance& inst, const ScenarioTree& tree);

/// Two-stage model augmented with the piecewise-linear terminal-inventory
/// value: per scenario and component, the terminal inventory is decomposed
/// into bounded segments whose slopes enter the objective. Inventory beyond
/// the last breakpoint earns the final slope, unbounded.
PlanningModel build_fosva(const Instance& inst, const ScenarioTree& ts_tree,
                          const ValueApprox& value);

/// Safety-stock levels: per item, the empirical alpha-quantile of all
/// history rows (midpoint-interpolated); per component, the bill-of-
/// materials requirement of those quantiles. alpha is in percent; alpha = 0
/// yields all-zero levels.
std::vector<int> compute_ss_levels(const History& history, double alpha_percent,
                                   const std::vector<std::vector<int>>& gozinto);

/// Deterministic chain model with minimum-inventory rows at every node
/// except the root (whose inventory is fixed by initial conditions).
/// Throws when a level provably exceeds what cumulative capacity can reach
/// at some node, naming node and component.
PlanningModel build_safety_stock(const Instance& inst, const ScenarioTree& chain,
                                 const std::vector<int>& levels);

struct PlanSolution {
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    double gap = 0.0;
    std::vector<int> root_production;
    std::vector<int> root_assembly;
    std::vector<int> root_lost_sales;
    std::vector<int> root_inventory; // post-assembly
    std::vector<double> values;      // all columns, integers already rounded
};

/// Solves the planning model, rounds integer columns, and replays every
/// constraint at 1e-6 before returning. Infeasibility is a status; replay
/// failures throw.
PlanSolution solve_plan(const PlanningModel& model, const SolverConfig& cfg);

/// Optimal value of the model's LP relaxation (exact, no branching). As a
/// function of the initial inventory this is the concave envelope the value
/// approximation trains against.
double solve_relaxation_value(const PlanningModel& model, const SolverConfig& cfg);

struct NodeFlows {
    std::vector<int> production;
    std::vector<int> assembly;
    std::vector<int> lost_sales;
    std::vector<int> inventory;
};

NodeFlows extract_flows(const PlanningModel& model, const PlanSolution& solution, int node);

} // namespace ato
