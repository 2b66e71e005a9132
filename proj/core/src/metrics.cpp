#include "ato/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace ato {

double ci95_halfwidth_factor(int n) {
    if (n <= 1) return 0.0;
    // Two-sided 97.5% Student-t quantiles for df = 1..30; the normal value
    // serves beyond that.
    static const double t[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                               2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                               2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                               2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    const int df = n - 1;
    const double q = df <= 30 ? t[df - 1] : 1.960;
    return q / std::sqrt(static_cast<double>(n));
}

namespace {

struct Accumulator {
    std::vector<double> profit_pct;
    std::vector<double> inventory_pct;
    double lost_sales_sum = 0.0;
    int count = 0;
};

std::pair<double, double> mean_and_halfwidth(const std::vector<double>& xs) {
    const int n = static_cast<int>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (n <= 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / (n - 1));
    return {mean, sd * ci95_halfwidth_factor(n)};
}

} // namespace

MetricsReport compute_metrics(const std::vector<RecordSummary>& records) {
    require(!records.empty(), "metrics: empty record pool");

    double pool_ls = 0.0;
    for (const RecordSummary& r : records) pool_ls += r.lost_sales;
    pool_ls /= static_cast<double>(records.size());

    using Key = std::tuple<int, double, std::string>;
    std::map<Key, Accumulator> cells;
    std::vector<Key> order;
    std::map<std::string, int> policy_seen; // preserves the configured policy order
    for (const RecordSummary& r : records) {
        require(r.pi_profit > 0.0, "metrics: perfect-information profit must be positive");
        policy_seen.try_emplace(r.policy, static_cast<int>(policy_seen.size()));
        Key key{r.years, r.gamma, r.policy};
        auto [it, inserted] = cells.try_emplace(key);
        if (inserted) order.push_back(key);
        Accumulator& acc = it->second;
        acc.profit_pct.push_back(100.0 * r.profit / r.pi_profit);
        acc.inventory_pct.push_back(r.pi_avg_inventory > 0.0
                                        ? 100.0 * r.avg_inventory / r.pi_avg_inventory
                                        : 0.0);
        acc.lost_sales_sum += r.lost_sales;
        acc.count += 1;
    }

    std::sort(order.begin(), order.end(), [&](const Key& a, const Key& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return policy_seen.at(std::get<2>(a)) < policy_seen.at(std::get<2>(b));
    });

    MetricsReport report;
    report.pool_mean_lost_sales = pool_ls;
    for (const Key& key : order) {
        const Accumulator& acc = cells.at(key);
        PolicyCellMetrics cell;
        cell.years = std::get<0>(key);
        cell.gamma = std::get<1>(key);
        cell.policy = std::get<2>(key);
        cell.replications = acc.count;
        std::tie(cell.profit_pct_mean, cell.profit_pct_halfwidth) =
            mean_and_halfwidth(acc.profit_pct);
        std::tie(cell.inventory_pct_mean, cell.inventory_pct_halfwidth) =
            mean_and_halfwidth(acc.inventory_pct);
        const double cell_ls = acc.lost_sales_sum / acc.count;
        cell.lost_sales_dev_pct =
            pool_ls > 0.0 ? 100.0 * (cell_ls - pool_ls) / pool_ls : 0.0;
        report.cells.push_back(std::move(cell));
    }
    return report;
}

} // namespace ato
