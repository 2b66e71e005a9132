#include "ato/demand.hpp"

#include <cmath>
#include <numeric>

namespace ato {

void BimodalParams::validate() const {
    require(sigma1 > 0.0 && sigma2 > 0.0, "demand: standard deviations must be positive");
    require(p >= 0.0 && p <= 1.0, "demand: mixing weight outside [0,1]");
}

double SeasonProfile::average() const {
    double s = 0.0;
    for (double f : factors) s += f;
    return s / 12.0;
}

void SeasonProfile::validate() const {
    for (double f : factors) require(f > 0.0, "demand: seasonal factors must be positive");
}

int DemandModel::num_items() const {
    return std::accumulate(family_sizes.begin(), family_sizes.end(), 0);
}

void DemandModel::validate() const {
    base.validate();
    season.validate();
    require(!family_sizes.empty(), "demand: family layout missing");
    for (int n : family_sizes) require(n >= 1, "demand: empty family");
    if (correlation_mode == CorrelationMode::family) {
        require(weights.size() == family_sizes.size(),
                "demand: family mode requires one weight vector per family");
        for (std::size_t r = 0; r < weights.size(); ++r) {
            require(static_cast<int>(weights[r].size()) == family_sizes[r],
                    "demand: weight vector length mismatch in family " + std::to_string(r));
            double sum = 0.0;
            for (double w : weights[r]) {
                require(w > 0.0, "demand: weights must be strictly positive");
                sum += w;
            }
            require(std::abs(sum - 1.0) <= 1e-9,
                    "demand: weights of family " + std::to_string(r) + " do not sum to 1");
        }
    }
}

void History::validate() const {
    require(start_month >= 0 && start_month < 12, "history: bad start month");
    for (const auto& row : observations) {
        require(row.size() == observations[0].size(), "history: ragged observation matrix");
        for (int d : row) require(d >= 0, "history: negative demand observation");
    }
}

namespace {

void check_month(int month) {
    require(month >= 0 && month < 12, "demand: month index must be in 0..11");
}

/// One draw from the seasonal bimodal mixture; negative draws clamp to 0.
int draw_seasonal(const BimodalParams& b, double factor, double scale_mean, double scale_std,
                  RngStream& rng) {
    bool mode1 = rng.bernoulli(b.p);
    double mu = (mode1 ? b.mu1 : b.mu2) * factor * scale_mean;
    double sd = (mode1 ? b.sigma1 : b.sigma2) * factor * scale_std;
    return to_piece_count(rng.normal(mu, sd));
}

} // namespace

std::vector<int> sample_month_independent(const DemandModel& model, int month, RngStream& rng) {
    check_month(month);
    const double f = model.season.factors[month];
    std::vector<int> demand(model.num_items());
    for (int j = 0; j < static_cast<int>(demand.size()); ++j)
        demand[j] = draw_seasonal(model.base, f, 1.0, 1.0, rng);
    return demand;
}

std::vector<int> sample_month_correlated(const DemandModel& model, int month, RngStream& rng) {
    check_month(month);
    require(model.weights.size() == model.family_sizes.size(),
            "demand: correlated sampling requires family weights");
    const double f = model.season.factors[month];
    std::vector<int> demand(model.num_items());
    int j = 0;
    for (int r = 0; r < model.num_families(); ++r) {
        const int n = model.family_sizes[r];
        // Aggregate family demand: means scale with n, std devs with sqrt(n).
        bool mode1 = rng.bernoulli(model.base.p);
        double mu = (mode1 ? model.base.mu1 : model.base.mu2) * n * f;
        double sd = (mode1 ? model.base.sigma1 : model.base.sigma2) * std::sqrt(double(n)) * f;
        double family_total = rng.normal(mu, sd);
        if (family_total < 0.0) family_total = 0.0;
        for (int k = 0; k < n; ++k, ++j)
            demand[j] = to_piece_count(model.weights[r][k] * family_total);
    }
    return demand;
}

std::vector<int> sample_month(const DemandModel& model, int month, RngStream& rng) {
    return model.correlation_mode == CorrelationMode::independent
               ? sample_month_independent(model, month, rng)
               : sample_month_correlated(model, month, rng);
}

std::vector<double> draw_family_weights(const std::vector<double>& zeta, RngStream& rng) {
    return rng.dirichlet(zeta);
}

History generate_history(const DemandModel& model, int years, RngStream& rng) {
    require(years >= 1, "history: need at least one year");
    model.validate();
    History h;
    h.start_month = 0;
    h.observations.reserve(12 * years);
    for (int t = 0; t < 12 * years; ++t) h.observations.push_back(sample_month(model, t % 12, rng));
    return h;
}

std::vector<double> estimate_mean_demand(const DemandModel& model, int n, RngStream& rng) {
    require(n >= 1, "estimate_mean_demand: need at least one sample");
    model.validate();
    std::vector<double> mean(model.num_items(), 0.0);
    for (int t = 0; t < n; ++t) {
        std::vector<int> d = sample_month(model, t % 12, rng);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += d[j];
    }
    for (double& m : mean) m /= n;
    return mean;
}

std::vector<std::vector<double>> canonical_family_weights() {
    static const std::vector<std::vector<double>> published = {
        {8.45, 1.40, 5.63, 16.90, 5.63, 11.26, 14.08, 5.63, 8.45, 4.22, 7.04, 11.26},
        {26.92, 3.84, 3.84, 19.23, 11.53, 7.69, 26.92},
        {12.5, 25.0, 25.0, 12.5, 25.0},
        {25.0, 25.0, 50.0},
        {42.85, 14.28, 42.85},
    };
    std::vector<std::vector<double>> weights;
    weights.reserve(published.size());
    for (const auto& row : published) {
        double sum = std::accumulate(row.begin(), row.end(), 0.0);
        std::vector<double> w(row.size());
        for (std::size_t k = 0; k < row.size(); ++k) w[k] = row[k] / sum;
        weights.push_back(std::move(w));
    }
    return weights;
}

DemandModel canonical_demand_model(CorrelationMode mode, const std::vector<int>& family_sizes,
                                   std::uint64_t weight_seed) {
    DemandModel model;
    model.correlation_mode = mode;
    model.family_sizes = family_sizes;
    if (mode == CorrelationMode::family) {
        const std::vector<int> canonical_layout{12, 7, 5, 3, 3};
        std::vector<std::vector<double>> canon = canonical_family_weights();
        RngStream rng = RngStream::from_key(weight_seed, {0xd12cULL});
        bool matches_canon = family_sizes.size() >= canonical_layout.size();
        for (std::size_t r = 0; matches_canon && r < canonical_layout.size(); ++r)
            matches_canon = family_sizes[r] == canonical_layout[r];
        for (std::size_t r = 0; r < family_sizes.size(); ++r) {
            const int n = family_sizes[r];
            if (n == 1) {
                model.weights.push_back({1.0});
            } else if (matches_canon && r < canon.size()) {
                model.weights.push_back(canon[r]);
            } else {
                model.weights.push_back(rng.dirichlet(std::vector<double>(n, 1.0)));
            }
        }
    }
    model.validate();
    return model;
}

} // namespace ato
