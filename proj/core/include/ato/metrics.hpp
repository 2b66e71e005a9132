#pragma once

#include "ato/common.hpp"

#include <string>
#include <vector>

namespace ato {

/// Totals of one (policy, configuration, replication) run paired with its
/// perfect-information benchmark on the same demand path.
struct RecordSummary {
    std::string policy;
    int years = 0;
    double gamma = 0.0;
    int replication = 0;
    double profit = 0.0;
    double avg_inventory = 0.0;
    double lost_sales = 0.0;
    double pi_profit = 0.0;
    double pi_avg_inventory = 0.0;
};

/// Aggregates for one (policy, years, gamma) cell.
struct PolicyCellMetrics {
    std::string policy;
    int years = 0;
    double gamma = 0.0;
    int replications = 0;
    double profit_pct_mean = 0.0;       // 100 * profit / PI profit, replication-averaged
    double profit_pct_halfwidth = 0.0;  // 95% CI half-width
    double inventory_pct_mean = 0.0;    // 100 * avg inventory / PI avg inventory
    double inventory_pct_halfwidth = 0.0;
    double lost_sales_dev_pct = 0.0;    // 100 * (cell mean LS - pool mean LS) / pool mean LS
};

struct MetricsReport {
    std::vector<PolicyCellMetrics> cells; // ordered by (years, gamma, policy first seen)
    double pool_mean_lost_sales = 0.0;    // over every record in the run
};

/// Two-sided 95% Student-t half-width factor for n samples (t / sqrt(n)).
double ci95_halfwidth_factor(int n);

/// Percentage metrics against perfect information plus the pooled
/// lost-sales deviation. The pool spans every record passed in (all
/// policies, tightness values, and history lengths of the run).
MetricsReport compute_metrics(const std::vector<RecordSummary>& records);

} // namespace ato
