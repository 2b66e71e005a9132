#pragma once

#include "ato/common.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ato {

/// Knobs for synthetic instance generation: problem dimensions, margin
/// classes, product-family layout, and the derived-cost factors.
struct InstanceConfig {
    int num_components = 60;
    int num_end_items = 35;
    int num_machines = 5;
    double tightness = 1.0;

    std::array<double, 3> margin_class_shares{0.4, 0.3, 0.3}; // low, medium, high
    std::array<Interval, 3> margin_ranges{{{0.05, 0.2}, {0.2, 0.4}, {0.4, 0.6}}};
    Interval component_cost_range{1.0, 50.0};

    std::vector<int> family_sizes{12, 7, 5, 3, 3};            // end items per standard family
    int family_common_components = 2;
    std::vector<int> family_component_counts{11, 17, 12, 6, 9};
    int num_outcast_items = 5;
    double outcast_inclusion_prob = 0.2;

    int gozinto_min = 1;
    int gozinto_max = 9;

    double lost_sale_factor = 0.2;  // K_j = factor * P_j
    double holding_factor = 0.1;    // H_i = factor * C_i
    Interval machine_time_range{0.5, 1.5};
    int mean_demand_sample_size = 5000;

    int num_families() const { return static_cast<int>(family_sizes.size()); }

    /// Throws ato::Error with a diagnostic if the configuration cannot
    /// produce a consistent instance.
    void validate() const;
};

/// Technological and economic description of an assemble-to-order problem.
/// Immutable after generation except for `capacity`, which is set by
/// compute_capacities once mean demand is known.
struct Instance {
    std::vector<double> component_cost;            // C_i, currency per piece
    std::vector<double> price;                     // P_j, currency per end item
    std::vector<double> lost_sale_penalty;         // K_j
    std::vector<double> holding_cost;              // H_i, currency per piece-period
    std::vector<std::vector<double>> machine_time; // T[i][m], time units per piece
    std::vector<double> capacity;                  // L_m, time units per period (empty until set)
    std::vector<std::vector<int>> gozinto;         // G[i][j], pieces of i per unit of j
    std::vector<int> initial_inventory;            // per component, pieces
    std::vector<int> family_of_item;               // family index per end item; outcasts get
                                                   // their own singleton indices after the
                                                   // standard families

    int num_components() const { return static_cast<int>(component_cost.size()); }
    int num_end_items() const { return static_cast<int>(price.size()); }
    int num_machines() const { return static_cast<int>(machine_time.empty() ? 0 : machine_time[0].size()); }
    bool capacities_set() const { return !capacity.empty(); }

    /// Structural checks: positive costs/prices, non-negative gozinto,
    /// consistent dimensions. Throws on violation.
    void validate() const;
};

/// Samples a full instance (costs, prices, penalties, family-structured
/// gozinto matrix, machine times). Capacities are left unset; call
/// compute_capacities once mean demand is available. Deterministic for a
/// fixed seed.
Instance generate_instance(const InstanceConfig& cfg, std::uint64_t seed);

/// Sets L_m = gamma * sum_i T_im * (sum_j G_ij * mean_demand_j) and returns
/// the capacity vector. Rejects negative gamma.
std::vector<double> compute_capacities(Instance& inst, double gamma,
                                       const std::vector<double>& mean_demand);

/// sum_j G_ij * mean_demand_j per component: the average one-period
/// component requirement. Shared by capacity, initial inventory, and the
/// value-approximation sampling cap.
std::vector<double> average_component_requirement(const Instance& inst,
                                                  const std::vector<double>& mean_demand);

} // namespace ato
