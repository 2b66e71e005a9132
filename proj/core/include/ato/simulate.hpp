#pragma once

#include "ato/demand.hpp"
#include "ato/fosva.hpp"
#include "ato/instance.hpp"
#include "ato/models.hpp"
#include "ato/scenario.hpp"
#include "ato/solver.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ato {

enum class PolicyKind { FOSVA, TS, TS_NOS, MP_N, MS3, MS3_N, SS, DET };

/// A planning policy for the rolling horizon: which tree to build each
/// month plus any attached artifacts (value approximation, safety levels).
struct Policy {
    PolicyKind kind = PolicyKind::TS;
    int tail = 0;          // future periods for MP_N (>=2) / MS3_N (>=3)
    double alpha = 0.0;    // SS quantile, percent
    int det_horizon = 12;  // chain length for SS and DET
    std::shared_ptr<const SeasonalValueApprox> value; // FOSVA only
    std::shared_ptr<const std::vector<int>> ss_levels; // SS only; set by prepare()

    std::string name() const; // "FOSVA", "TS_noS", "MP_3", "SS(10)", ...
    void validate() const;

    /// Computes history-derived artifacts (safety-stock levels). The value
    /// approximation must already be attached for FOSVA.
    void prepare(const Instance& inst, const History& history);
};

Policy make_policy(PolicyKind kind, int tail = 0, double alpha = 0.0);

struct SimulationConfig {
    int horizon_months = 24;
    int replications = 10;
    std::uint64_t seed = 0;
    int start_month = 0;

    void validate() const;
};

/// One simulated month: realized flows and the resulting money movements.
struct PeriodRecord {
    int month = 0; // calendar month 0..11
    std::vector<int> demand;
    std::vector<int> assembly;
    std::vector<int> lost_sales;
    std::vector<int> production;
    std::vector<int> inventory; // post-assembly
    double revenue = 0.0;
    double penalty = 0.0;
    double holding = 0.0;
    double production_cost = 0.0;

    double profit() const { return revenue - penalty - holding - production_cost; }
};

struct SimulationRecord {
    std::vector<int> initial_inventory;
    std::vector<PeriodRecord> periods;

    double total_profit() const;
    double total_inventory(int period) const;
    double average_inventory() const; // time average of summed post-assembly stock
    long total_lost_sales() const;

    /// Replays the inventory recursion, demand links, and money identities
    /// in exact integer arithmetic; throws on any mismatch.
    void validate_accounting(const Instance& inst) const;
};

/// round(sum_j G_ij * mean_demand_j): one average period of component
/// requirements.
std::vector<int> default_initial_inventory(const Instance& inst,
                                           const std::vector<double>& mean_demand);

/// Samples an out-of-sample demand path of `horizon` months.
std::vector<std::vector<int>> sample_demand_path(const DemandModel& model, int start_month,
                                                 int horizon, RngStream& rng);

/// Rolls the policy over the demand path: each month realizes demand,
/// re-plans with the just-observed demand at the root, implements only the
/// root decisions, and carries inventory plus new production forward. The
/// policy sees nothing but the history and realized demands.
SimulationRecord run_rolling_horizon(const Instance& inst, const Policy& policy,
                                     const History& history,
                                     const std::vector<std::vector<int>>& demand_path,
                                     const std::vector<int>& initial_inventory, int start_month,
                                     const SolverConfig& solver_cfg);

/// Convenience overload that samples the out-of-sample path internally.
SimulationRecord run_rolling_horizon(const Instance& inst, const Policy& policy,
                                     const DemandModel& model, const History& history,
                                     const SimulationConfig& cfg, RngStream& path_rng,
                                     const SolverConfig& solver_cfg);

/// Solves the whole horizon in one shot with the realized path known in
/// advance; the resulting plan upper-bounds every policy on that path.
SimulationRecord perfect_information(const Instance& inst,
                                     const std::vector<std::vector<int>>& demand_path,
                                     const std::vector<int>& initial_inventory, int start_month,
                                     const SolverConfig& solver_cfg);

} // namespace ato
