#pragma once

#include "ato/common.hpp"
#include "ato/rng.hpp"

#include <array>
#include <vector>

namespace ato {

/// Two-mode Gaussian mixture: mode 1 with probability p, mode 2 otherwise.
struct BimodalParams {
    double mu1 = 300.0;
    double mu2 = 50.0;
    double sigma1 = 50.0;
    double sigma2 = 15.0;
    double p = 0.8;

    double mean() const { return p * mu1 + (1.0 - p) * mu2; }
    void validate() const;
};

/// Monthly multiplicative factors applied to both mode means and
/// standard deviations.
struct SeasonProfile {
    std::array<double, 12> factors{1.0, 1.1, 0.9, 0.8, 1.0, 0.8, 1.2, 1.3, 1.2, 1.0, 0.8, 0.9};

    double average() const;
    void validate() const;
};

enum class CorrelationMode { independent, family };

/// End-item demand distribution: a shared bimodal base, seasonality, and
/// optional within-family correlation via aggregate draws that are
/// disaggregated by fixed simplex weights.
struct DemandModel {
    BimodalParams base;
    SeasonProfile season;
    CorrelationMode correlation_mode = CorrelationMode::independent;
    std::vector<int> family_sizes;               // n_r per family; singletons for outcasts
    std::vector<std::vector<double>> weights;    // w_jr per family, each summing to 1
    std::vector<std::vector<double>> dirichlet_params; // optional zeta_r per family

    int num_items() const;
    int num_families() const { return static_cast<int>(family_sizes.size()); }
    void validate() const;
};

/// Monthly demand observations, one row per month, one column per item.
struct History {
    std::vector<std::vector<int>> observations;
    int start_month = 0; // calendar month of row 0

    int months() const { return static_cast<int>(observations.size()); }
    int num_items() const { return observations.empty() ? 0 : static_cast<int>(observations[0].size()); }
    int month_of_row(int row) const { return (start_month + row) % 12; }
    void validate() const;
};

std::vector<int> sample_month_independent(const DemandModel& model, int month, RngStream& rng);
std::vector<int> sample_month_correlated(const DemandModel& model, int month, RngStream& rng);

/// Dispatches on the model's correlation mode.
std::vector<int> sample_month(const DemandModel& model, int month, RngStream& rng);

/// One Dirichlet draw: strictly positive weights summing to 1.
std::vector<double> draw_family_weights(const std::vector<double>& zeta, RngStream& rng);

/// 12*years monthly rows starting at month 0.
History generate_history(const DemandModel& model, int years, RngStream& rng);

/// Mean of n sampled monthly vectors with the month index cycling 0-11, so
/// the estimate averages over the seasonal cycle.
std::vector<double> estimate_mean_demand(const DemandModel& model, int n, RngStream& rng);

/// The realized disaggregation weights used for the canonical five-family
/// layout [12,7,5,3,3], renormalized to sum exactly to 1 per family.
std::vector<std::vector<double>> canonical_family_weights();

/// Demand model with the canonical bimodal/seasonal parameters for the
/// given family layout. In family mode, weights come from
/// canonical_family_weights() when the layout matches [12,7,5,3,3] (plus
/// singletons); otherwise they are drawn once from a symmetric Dirichlet.
DemandModel canonical_demand_model(CorrelationMode mode, const std::vector<int>& family_sizes,
                                   std::uint64_t weight_seed = 0);

} // namespace ato
