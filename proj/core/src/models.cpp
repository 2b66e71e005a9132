#include "ato/models.hpp"

#include <algorithm>
#include <cmath>

namespace ato {

namespace {

std::string tag(const char* role, int node, int entity) {
    return std::string(role) + "_n" + std::to_string(node) + "_" + std::to_string(entity);
}

void check_dims(const Instance& inst, const ScenarioTree& tree) {
    require(inst.capacities_set(), "model: instance capacities not set");
    require(tree.num_items() == inst.num_end_items(),
            "model: tree demand dimension does not match instance");
}

} // namespace

PlanningModel PlanningModel::lower_tree(const Instance& inst, const ScenarioTree& tree) {
    check_dims(inst, tree);
    tree.validate();
    inst.validate();

    PlanningModel pm;
    const int N = pm.num_nodes = tree.num_nodes();
    const int I = pm.num_components = inst.num_components();
    const int J = pm.num_items = inst.num_end_items();
    const int M = inst.num_machines();

    pm.node_prob.resize(N);
    pm.node_parent.resize(N);
    pm.node_demand_.resize(N);
    for (int n = 0; n < N; ++n) {
        pm.node_prob[n] = tree.nodes[n].prob;
        pm.node_parent[n] = tree.nodes[n].parent;
        pm.node_demand_[n] = tree.nodes[n].demand;
    }
    pm.instance_ = inst;

    // Role-major column blocks; the accessors assume this exact layout.
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < I; ++i)
            pm.milp.add_var(tag("x", n, i), VarKind::integer_nonneg,
                            -tree.nodes[n].prob * inst.component_cost[i]);
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < I; ++i)
            pm.milp.add_var(tag("I", n, i), VarKind::integer_nonneg,
                            -tree.nodes[n].prob * inst.holding_cost[i]);
    for (int n = 0; n < N; ++n)
        for (int j = 0; j < J; ++j)
            pm.milp.add_var(tag("y", n, j), VarKind::integer_nonneg,
                            tree.nodes[n].prob * inst.price[j]);
    for (int n = 0; n < N; ++n)
        for (int j = 0; j < J; ++j)
            pm.milp.add_var(tag("l", n, j), VarKind::integer_nonneg,
                            -tree.nodes[n].prob * inst.lost_sale_penalty[j]);

    // Capacity per node and machine.
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            std::vector<MilpTerm> terms;
            terms.reserve(I);
            for (int i = 0; i < I; ++i)
                terms.push_back({pm.x_var(n, i), inst.machine_time[i][m]});
            pm.milp.add_row("cap_n" + std::to_string(n) + "_" + std::to_string(m), RowSense::le,
                            inst.capacity[m], std::move(terms));
        }

    // Inventory balance: root ties to initial stock, children to parents.
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < I; ++i) {
            std::vector<MilpTerm> terms;
            terms.reserve(J + 3);
            terms.push_back({pm.inv_var(n, i), 1.0});
            for (int j = 0; j < J; ++j)
                if (inst.gozinto[i][j] != 0)
                    terms.push_back({pm.y_var(n, j), static_cast<double>(inst.gozinto[i][j])});
            double rhs;
            if (n == 0) {
                rhs = static_cast<double>(inst.initial_inventory[i]);
            } else {
                const int p = tree.nodes[n].parent;
                terms.push_back({pm.inv_var(p, i), -1.0});
                terms.push_back({pm.x_var(p, i), -1.0});
                rhs = 0.0;
            }
            pm.milp.add_row("inv_n" + std::to_string(n) + "_" + std::to_string(i), RowSense::eq,
                            rhs, std::move(terms));
        }

    // Assembly plus lost sales meet demand at every node.
    for (int n = 0; n < N; ++n)
        for (int j = 0; j < J; ++j)
            pm.milp.add_row("dem_n" + std::to_string(n) + "_" + std::to_string(j), RowSense::eq,
                            static_cast<double>(tree.nodes[n].demand[j]),
                            {{pm.y_var(n, j), 1.0}, {pm.l_var(n, j), 1.0}});

    return pm;
}

int PlanningModel::x_var(int node, int component) const {
    return node * num_components + component;
}
int PlanningModel::inv_var(int node, int component) const {
    return num_nodes * num_components + node * num_components + component;
}
int PlanningModel::y_var(int node, int item) const {
    return 2 * num_nodes * num_components + node * num_items + item;
}
int PlanningModel::l_var(int node, int item) const {
    return 2 * num_nodes * num_components + num_nodes * num_items + node * num_items + item;
}
int PlanningModel::m_var(int scenario, int component, int segment) const {
    require(has_value_terms(), "model: no value segments in this model");
    require(scenario >= 0 && scenario < num_scenarios_, "model: scenario index out of range");
    require(segment >= 0 && segment < segment_count_[component],
            "model: segment index out of range");
    return m_base_ + scenario * total_segments_ + segment_offset_[component] + segment;
}

PlanningModel build_multistage(const Instance& inst, const ScenarioTree& tree) {
    return PlanningModel::lower_tree(inst, tree);
}

PlanningModel build_fosva(const Instance& inst, const ScenarioTree& ts_tree,
                          const ValueApprox& value) {
    require(ts_tree.num_stages() == 2, "fosva model: tree must be two-stage");
    value.validate();
    require(value.num_components() == inst.num_components(),
            "fosva model: value approximation dimension mismatch");

    PlanningModel pm = PlanningModel::lower_tree(inst, ts_tree);
    const int I = pm.num_components;
    const int S = pm.num_nodes - 1; // scenarios are nodes 1..S

    pm.num_scenarios_ = S;
    pm.segment_count_.resize(I);
    pm.segment_offset_.resize(I);
    for (int i = 0; i < I; ++i) {
        pm.segment_count_[i] = value.components[i].num_segments();
        pm.segment_offset_[i] = i == 0 ? 0 : pm.segment_offset_[i - 1] + pm.segment_count_[i - 1];
    }
    pm.total_segments_ = pm.segment_offset_[I - 1] + pm.segment_count_[I - 1];
    pm.m_base_ = pm.milp.num_vars();

    // Segment variables: bounded by breakpoint spacing except the last,
    // which extends the final slope to infinity. The value term is added to
    // the objective with the scenario's probability.
    for (int s = 0; s < S; ++s)
        for (int i = 0; i < I; ++i) {
            const PiecewiseValue& pv = value.components[i];
            const int K = pv.num_segments();
            for (int k = 0; k < K; ++k) {
                double width = k + 1 < K ? pv.breakpoints[k + 1] - pv.breakpoints[k] : kInfinity;
                pm.milp.add_var("m_s" + std::to_string(s) + "_" + std::to_string(i) + "_" +
                                    std::to_string(k),
                                VarKind::continuous_nonneg,
                                ts_tree.nodes[s + 1].prob * pv.slopes[k], 0.0, width);
            }
        }

    // Terminal inventory decomposes over the segments.
    for (int s = 0; s < S; ++s)
        for (int i = 0; i < I; ++i) {
            std::vector<MilpTerm> terms;
            terms.push_back({pm.inv_var(s + 1, i), 1.0});
            for (int k = 0; k < pm.segment_count_[i]; ++k)
                terms.push_back({pm.m_var(s, i, k), -1.0});
            pm.milp.add_row("seg_s" + std::to_string(s) + "_" + std::to_string(i), RowSense::eq,
                            0.0, std::move(terms));
        }

    return pm;
}

std::vector<int> compute_ss_levels(const History& history, double alpha_percent,
                                   const std::vector<std::vector<int>>& gozinto) {
    require(alpha_percent >= 0.0 && alpha_percent <= 100.0,
            "safety stock: alpha must be in [0,100]");
    history.validate();
    const int J = history.num_items();
    require(!gozinto.empty() && static_cast<int>(gozinto[0].size()) == J,
            "safety stock: gozinto dimension mismatch");
    const int I = static_cast<int>(gozinto.size());

    std::vector<int> levels(I, 0);
    if (alpha_percent == 0.0) return levels;
    require(history.months() > 0, "safety stock: empty history");

    // Empirical quantile with midpoint interpolation, pooled over all rows.
    std::vector<double> quantile(J);
    const int n = history.months();
    for (int j = 0; j < J; ++j) {
        std::vector<int> sorted(n);
        for (int t = 0; t < n; ++t) sorted[t] = history.observations[t][j];
        std::sort(sorted.begin(), sorted.end());
        double h = alpha_percent / 100.0 * n + 0.5;
        h = std::clamp(h, 1.0, static_cast<double>(n));
        int lo = static_cast<int>(std::floor(h));
        double frac = h - lo;
        quantile[j] = lo >= n ? sorted[n - 1]
                              : sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
    }
    for (int i = 0; i < I; ++i) {
        double level = 0.0;
        for (int j = 0; j < J; ++j) level += gozinto[i][j] * quantile[j];
        levels[i] = static_cast<int>(round_half_away(level));
    }
    return levels;
}

PlanningModel build_safety_stock(const Instance& inst, const ScenarioTree& chain,
                                 const std::vector<int>& levels) {
    for (std::size_t n = 1; n < chain.nodes.size(); ++n)
        require(chain.nodes[n].parent == static_cast<int>(n) - 1 &&
                    std::abs(chain.nodes[n].prob - 1.0) <= 1e-12,
                "safety stock: tree must be a branching-1 chain");
    require(static_cast<int>(levels.size()) == inst.num_components(),
            "safety stock: level vector dimension mismatch");
    check_dims(inst, chain);

    // Necessary-condition screen: even producing one component exclusively,
    // cumulative capacity by stage t caps reachable inventory.
    const int I = inst.num_components();
    for (int i = 0; i < I; ++i) {
        if (levels[i] <= 0) continue;
        double per_period = kInfinity;
        for (int m = 0; m < inst.num_machines(); ++m)
            per_period = std::min(per_period, inst.capacity[m] / inst.machine_time[i][m]);
        for (std::size_t n = 1; n < chain.nodes.size(); ++n) {
            double reachable = inst.initial_inventory[i] +
                               per_period * static_cast<double>(chain.nodes[n].stage);
            if (levels[i] > reachable + 1e-9)
                throw Error("safety stock: level " + std::to_string(levels[i]) +
                            " for component " + std::to_string(i) +
                            " is unreachable at node " + std::to_string(n) +
                            " (cumulative capacity bound " + std::to_string(reachable) + ")");
        }
    }

    PlanningModel pm = PlanningModel::lower_tree(inst, chain);
    pm.min_inventory_ = levels;
    for (int n = 1; n < pm.num_nodes; ++n)
        for (int i = 0; i < I; ++i)
            if (levels[i] > 0)
                pm.milp.add_row("ss_n" + std::to_string(n) + "_" + std::to_string(i),
                                RowSense::ge, static_cast<double>(levels[i]),
                                {{pm.inv_var(n, i), 1.0}});
    return pm;
}

namespace {
enum class TopUp { none, leaves, everywhere };
}

std::vector<double> PlanningModel::lp_guided_incumbent(const std::vector<double>& lp) const {
    const int N = num_nodes, I = num_components, J = num_items;
    const Instance& inst = instance_;

    // Items in descending per-unit value of assembling one more piece.
    std::vector<int> order(J);
    for (int j = 0; j < J; ++j) order[j] = j;
    std::vector<double> unit_value(J);
    for (int j = 0; j < J; ++j) {
        unit_value[j] = inst.price[j] + inst.lost_sale_penalty[j];
        for (int i = 0; i < I; ++i)
            unit_value[j] += inst.gozinto[i][j] * inst.holding_cost[i];
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return unit_value[a] > unit_value[b]; });

    std::vector<bool> leaf(N, true);
    for (int n = 1; n < N; ++n) leaf[node_parent[n]] = false;

    auto build = [&](TopUp mode) {
        std::vector<double> vals(milp.num_vars(), 0.0);
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < I; ++i)
                vals[x_var(n, i)] = std::max(0.0, std::floor(lp[x_var(n, i)] + 1e-9));

        std::vector<long> avail(I), headroom(I);
        std::vector<int> assembled(J);
        for (int n = 0; n < N; ++n) {
            for (int i = 0; i < I; ++i) {
                avail[i] = n == 0 ? inst.initial_inventory[i]
                                  : static_cast<long>(vals[inv_var(node_parent[n], i)]) +
                                        static_cast<long>(vals[x_var(node_parent[n], i)]);
                long floor_i = (n > 0 && !min_inventory_.empty()) ? min_inventory_[i] : 0;
                headroom[i] = std::max(0L, avail[i] - floor_i);
            }

            std::fill(assembled.begin(), assembled.end(), 0);
            auto assemble_up_to = [&](int j, long want) {
                long can = want;
                for (int i = 0; i < I && can > 0; ++i)
                    if (inst.gozinto[i][j] > 0)
                        can = std::min(can, headroom[i] / inst.gozinto[i][j]);
                if (can <= 0) return;
                for (int i = 0; i < I; ++i)
                    headroom[i] -= static_cast<long>(inst.gozinto[i][j]) * can;
                assembled[j] += static_cast<int>(can);
            };
            for (int j : order) {
                long target = static_cast<long>(std::floor(lp[y_var(n, j)] + 1e-9));
                assemble_up_to(j, std::clamp<long>(target, 0, node_demand_[n][j]));
            }
            // Assembling beyond the LP plan consumes what descendants may
            // need, so it is gated per variant.
            if (mode == TopUp::everywhere || (mode == TopUp::leaves && leaf[n]))
                for (int j : order) assemble_up_to(j, node_demand_[n][j] - assembled[j]);

            for (int j = 0; j < J; ++j) {
                vals[y_var(n, j)] = assembled[j];
                vals[l_var(n, j)] = node_demand_[n][j] - assembled[j];
            }
            for (int i = 0; i < I; ++i) {
                long used = 0;
                for (int j = 0; j < J; ++j)
                    used += static_cast<long>(inst.gozinto[i][j]) * assembled[j];
                vals[inv_var(n, i)] = static_cast<double>(avail[i] - used);
            }
        }

        if (has_value_terms()) {
            for (int s = 0; s < N - 1; ++s)
                for (int i = 0; i < I; ++i) {
                    double remaining = vals[inv_var(s + 1, i)];
                    for (int k = 0; k < segment_count_[i]; ++k) {
                        const int mv = m_var(s, i, k);
                        double take = std::min(remaining, milp.vars()[mv].upper);
                        vals[mv] = take;
                        remaining -= take;
                    }
                }
        }
        return vals;
    };

    // All three variants are feasible by construction; keep the best.
    std::vector<double> best = build(TopUp::none);
    double best_value = milp.objective_value(best);
    for (TopUp mode : {TopUp::leaves, TopUp::everywhere}) {
        std::vector<double> candidate = build(mode);
        double value = milp.objective_value(candidate);
        if (value > best_value) {
            best_value = value;
            best = std::move(candidate);
        }
    }
    return best;
}

std::vector<double> PlanningModel::lp_guided_incumbent_exact_leaves(
    const std::vector<double>& lp, const SolverConfig& cfg) const {
    std::vector<double> vals = lp_guided_incumbent(lp);
    const Instance& inst = instance_;
    const int I = num_components, J = num_items;

    std::vector<bool> is_leaf(num_nodes, true);
    for (int n = 1; n < num_nodes; ++n) is_leaf[node_parent[n]] = false;

    SolverConfig leaf_cfg = cfg;
    leaf_cfg.relative_gap = 1e-9;
    leaf_cfg.time_limit_s = std::max(1.0, cfg.time_limit_s / 20.0);

    for (int n = 1; n < num_nodes; ++n) {
        if (!is_leaf[n]) continue;
        std::vector<long> avail(I);
        for (int i = 0; i < I; ++i)
            avail[i] = static_cast<long>(vals[inv_var(node_parent[n], i)]) +
                       static_cast<long>(vals[x_var(node_parent[n], i)]);

        // max (P + K + G'H) y + value(avail - G y)  s.t.  G y <= avail, y <= d
        MilpModel leaf;
        leaf.maximize = true;
        for (int j = 0; j < J; ++j) {
            double coef = inst.price[j] + inst.lost_sale_penalty[j];
            for (int i = 0; i < I; ++i) coef += inst.gozinto[i][j] * inst.holding_cost[i];
            leaf.add_var("y" + std::to_string(j), VarKind::integer_nonneg, coef, 0.0,
                         static_cast<double>(node_demand_[n][j]));
        }
        std::vector<int> inv_id(I, -1);
        for (int i = 0; i < I; ++i) {
            std::vector<MilpTerm> terms;
            for (int j = 0; j < J; ++j)
                if (inst.gozinto[i][j] != 0)
                    terms.push_back({j, static_cast<double>(inst.gozinto[i][j])});
            if (terms.empty()) continue;
            if (has_value_terms()) {
                // I_i = avail_i - G y enters the concave value via segments.
                inv_id[i] = leaf.add_var("I" + std::to_string(i), VarKind::continuous_nonneg, 0.0,
                                         0.0, static_cast<double>(avail[i]));
                terms.push_back({inv_id[i], 1.0});
                leaf.add_row("bal" + std::to_string(i), RowSense::eq,
                             static_cast<double>(avail[i]), std::move(terms));
            } else {
                leaf.add_row("cap" + std::to_string(i), RowSense::le,
                             static_cast<double>(avail[i]), std::move(terms));
            }
        }
        if (has_value_terms()) {
            const int s = n - 1;
            for (int i = 0; i < I; ++i) {
                if (inv_id[i] < 0) continue;
                std::vector<MilpTerm> seg{{inv_id[i], 1.0}};
                for (int k = 0; k < segment_count_[i]; ++k) {
                    double width = milp.vars()[m_var(s, i, k)].upper;
                    double slope = milp.vars()[m_var(s, i, k)].obj / node_prob[n];
                    int mv = leaf.add_var("m" + std::to_string(i) + "_" + std::to_string(k),
                                          VarKind::continuous_nonneg, slope, 0.0, width);
                    seg.push_back({mv, -1.0});
                }
                leaf.add_row("seg" + std::to_string(i), RowSense::eq, 0.0, std::move(seg));
            }
        }

        MilpSolution sol;
        try {
            sol = solve_milp(leaf, leaf_cfg);
        } catch (const Error&) {
            continue; // keep the greedy assembly for this leaf
        }
        if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::gap_limit) continue;

        for (int j = 0; j < J; ++j) {
            long y = round_half_away(sol.values[j]);
            vals[y_var(n, j)] = static_cast<double>(y);
            vals[l_var(n, j)] = static_cast<double>(node_demand_[n][j] - y);
        }
        for (int i = 0; i < I; ++i) {
            long used = 0;
            for (int j = 0; j < J; ++j)
                used += static_cast<long>(inst.gozinto[i][j]) *
                        static_cast<long>(vals[y_var(n, j)]);
            vals[inv_var(n, i)] = static_cast<double>(avail[i] - used);
        }
        if (has_value_terms()) {
            const int s = n - 1;
            for (int i = 0; i < I; ++i) {
                double remaining = vals[inv_var(n, i)];
                for (int k = 0; k < segment_count_[i]; ++k) {
                    const int mv = m_var(s, i, k);
                    double take = std::min(remaining, milp.vars()[mv].upper);
                    vals[mv] = take;
                    remaining -= take;
                }
            }
        }
    }
    return vals;
}

PlanSolution solve_plan(const PlanningModel& model, const SolverConfig& cfg) {
    // Exact leaf recourse pays off once branch and bound stops finding
    // incumbents on its own; below the threshold the greedy is enough.
    const bool polish_leaves = model.milp.num_vars() >= 1500;
    MilpSolution raw =
        solve_milp(model.milp, cfg, [&model, &cfg, polish_leaves](const std::vector<double>& lp) {
            return polish_leaves ? model.lp_guided_incumbent_exact_leaves(lp, cfg)
                                 : model.lp_guided_incumbent(lp);
        });
    PlanSolution out;
    out.status = raw.status;
    out.gap = raw.gap;
    if (raw.status == SolveStatus::infeasible) return out;

    out.values = std::move(raw.values);
    for (int v = 0; v < model.milp.num_vars(); ++v)
        if (model.milp.vars()[v].kind == VarKind::integer_nonneg)
            out.values[v] = static_cast<double>(round_half_away(out.values[v]));

    // Rounding the terminal inventories shifts the segment decomposition by
    // solver noise; re-derive it exactly by filling segments left to right
    // (optimal under non-increasing slopes).
    if (model.has_value_terms()) {
        for (int s = 0; s < model.num_nodes - 1; ++s)
            for (int i = 0; i < model.num_components; ++i) {
                double remaining = out.values[model.inv_var(s + 1, i)];
                const int segs = model.segment_count(i);
                for (int k = 0; k < segs; ++k) {
                    const int mv = model.m_var(s, i, k);
                    double width = model.milp.vars()[mv].upper;
                    double take = std::min(remaining, width);
                    out.values[mv] = take;
                    remaining -= take;
                }
            }
    }

    const double violation = model.milp.max_violation(out.values);
    require(violation <= 1e-6,
            "solve: constraint replay failed, violation " + std::to_string(violation));
    out.objective = model.milp.objective_value(out.values);

    NodeFlows root = extract_flows(model, out, 0);
    out.root_production = std::move(root.production);
    out.root_assembly = std::move(root.assembly);
    out.root_lost_sales = std::move(root.lost_sales);
    out.root_inventory = std::move(root.inventory);
    return out;
}

double solve_relaxation_value(const PlanningModel& model, const SolverConfig& cfg) {
    MilpModel relaxed;
    relaxed.maximize = model.milp.maximize;
    for (const MilpVar& v : model.milp.vars())
        relaxed.add_var(v.name, VarKind::continuous_nonneg, v.obj, v.lower, v.upper);
    for (const MilpRow& r : model.milp.rows()) {
        std::vector<MilpTerm> terms = r.terms;
        relaxed.add_row(r.name, r.sense, r.rhs, std::move(terms));
    }
    MilpSolution sol = solve_milp(relaxed, cfg);
    require(sol.status == SolveStatus::optimal, "relaxation: LP did not reach optimality");
    return sol.objective;
}

NodeFlows extract_flows(const PlanningModel& model, const PlanSolution& solution, int node) {
    require(node >= 0 && node < model.num_nodes, "extract_flows: node out of range");
    require(!solution.values.empty(), "extract_flows: no solution values");
    NodeFlows f;
    f.production.resize(model.num_components);
    f.inventory.resize(model.num_components);
    f.assembly.resize(model.num_items);
    f.lost_sales.resize(model.num_items);
    for (int i = 0; i < model.num_components; ++i) {
        f.production[i] = static_cast<int>(solution.values[model.x_var(node, i)]);
        f.inventory[i] = static_cast<int>(solution.values[model.inv_var(node, i)]);
    }
    for (int j = 0; j < model.num_items; ++j) {
        f.assembly[j] = static_cast<int>(solution.values[model.y_var(node, j)]);
        f.lost_sales[j] = static_cast<int>(solution.values[model.l_var(node, j)]);
    }
    return f;
}

} // namespace ato
