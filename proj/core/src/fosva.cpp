#include "ato/fosva.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ato {

double PiecewiseValue::evaluate(double inventory) const {
    require(inventory >= 0.0, "value approx: negative inventory");
    double value = 0.0;
    double at = 0.0;
    const int K = num_segments();
    for (int k = 0; k < K; ++k) {
        double seg_end = k + 1 < K ? breakpoints[k + 1] : std::numeric_limits<double>::infinity();
        double width = std::min(inventory, seg_end) - at;
        if (width <= 0.0) break;
        value += slopes[k] * width;
        at += width;
    }
    return value;
}

void PiecewiseValue::validate() const {
    require(!breakpoints.empty() && breakpoints.size() == slopes.size(),
            "value approx: breakpoints and slopes must have equal, non-zero length");
    require(breakpoints[0] == 0.0, "value approx: first breakpoint must be 0");
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        require(breakpoints[k] > breakpoints[k - 1],
                "value approx: breakpoints must be strictly increasing");
    for (std::size_t k = 1; k < slopes.size(); ++k)
        require(slopes[k] <= slopes[k - 1] + 1e-12, "value approx: slopes must be non-increasing");
}

ValueApprox ValueApprox::identity(int num_components) {
    require(num_components >= 1, "value approx: need at least one component");
    ValueApprox va;
    va.components.assign(num_components, PiecewiseValue{});
    return va;
}

double ValueApprox::evaluate(const std::vector<double>& inventory) const {
    require(inventory.size() == components.size(), "value approx: inventory dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i)
        total += components[i].evaluate(inventory[i]);
    return total;
}

void ValueApprox::validate() const {
    require(!components.empty(), "value approx: empty");
    for (const PiecewiseValue& pv : components) pv.validate();
}

const ValueApprox& SeasonalValueApprox::for_month(int month) const {
    require(month >= 0 && month < 12, "value approx: bad month");
    if (monthly) {
        require(approx.size() == 12, "value approx: monthly set needs 12 entries");
        return approx[month];
    }
    require(approx.size() == 1, "value approx: pooled set needs exactly 1 entry");
    return approx[0];
}

void SeasonalValueApprox::validate() const {
    require(approx.size() == (monthly ? 12u : 1u), "value approx: wrong number of entries");
    for (const ValueApprox& va : approx) va.validate();
}

void FosvaConfig::validate() const {
    require(iterations >= 0, "fosva: negative iteration count");
    require(!inventory_cap.empty(), "fosva: inventory cap missing");
    for (double c : inventory_cap) require(c > 0.0, "fosva: inventory cap must be positive");
    require(epsilon > 0.0, "fosva: perturbation must be positive");
    require(smoothing > 0.0 && smoothing <= 1.0, "fosva: smoothing must be in (0,1]");
    require(training_gap >= 0.0 && training_gap < 1.0, "fosva: bad training gap");
}

double FosvaConfig::cap_for(int component) const {
    if (inventory_cap.size() == 1) return inventory_cap[0];
    require(component >= 0 && component < static_cast<int>(inventory_cap.size()),
            "fosva: component index outside inventory cap vector");
    return inventory_cap[component];
}

std::pair<double, double> finite_difference_slopes(const InventoryValueFn& value_fn,
                                                   const std::vector<double>& point,
                                                   double base_value, double epsilon,
                                                   int component) {
    require(epsilon > 0.0, "finite differences: perturbation must be positive");
    require(component >= 0 && component < static_cast<int>(point.size()),
            "finite differences: component index out of range");
    require(point[component] >= 0.0, "finite differences: negative inventory point");

    std::vector<double> probe = point;
    probe[component] = point[component] + epsilon;
    const double forward = (value_fn(probe) - base_value) / epsilon;

    double backward = forward;
    if (point[component] >= epsilon) {
        probe[component] = point[component] - epsilon;
        backward = (base_value - value_fn(probe)) / epsilon;
    }
    return {forward, backward};
}

void update_approx(PiecewiseValue& pv, double point, double slope_plus, double slope_minus,
                   double smoothing) {
    require(point >= 0.0, "update_approx: negative breakpoint");
    require(smoothing > 0.0 && smoothing <= 1.0, "update_approx: smoothing outside (0,1]");

    auto& u = pv.breakpoints;
    auto& v = pv.slopes;

    // Insert the sampled point; a coincident point reuses the existing slot
    // so breakpoints stay strictly sorted.
    auto it = std::upper_bound(u.begin(), u.end(), point);
    int pos = static_cast<int>(it - u.begin());
    if (u[pos - 1] == point) {
        pos = pos - 1; // existing breakpoint, no insertion
    } else {
        u.insert(u.begin() + pos, point);
        v.insert(v.begin() + pos, v[pos - 1]);
    }

    const double base = v[pos];
    const double smoothed_plus = (1.0 - smoothing) * base + smoothing * slope_plus;
    const double smoothed_minus = (1.0 - smoothing) * base + smoothing * slope_minus;

    // Left of the new point the slope should be at least the backward
    // difference; right of it at most the forward difference. The prefix
    // floor and suffix cap together restore monotonicity.
    for (int k = 0; k <= pos && k < static_cast<int>(v.size()); ++k)
        if (v[k] < smoothed_minus) v[k] = smoothed_minus;
    for (int k = pos; k < static_cast<int>(v.size()); ++k)
        if (v[k] > smoothed_plus) v[k] = smoothed_plus;
}

ValueApprox train_value_approx(const InventoryValueFn& value_fn, int num_components,
                               const FosvaConfig& cfg, RngStream& rng, TrainStats* stats) {
    cfg.validate();
    ValueApprox va = ValueApprox::identity(num_components);
    long solves = 0;

    std::vector<double> point(num_components);
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        // Continuous uniform draw, rounded: the planning models take
        // integer initial inventory.
        for (int i = 0; i < num_components; ++i)
            point[i] = static_cast<double>(to_piece_count(rng.uniform(0.0, cfg.cap_for(i))));

        const double base = value_fn(point);
        ++solves;
        for (int i = 0; i < num_components; ++i) {
            auto [plus, minus] = finite_difference_slopes(value_fn, point, base, cfg.epsilon, i);
            solves += point[i] >= cfg.epsilon ? 2 : 1;
            update_approx(va.components[i], point[i], plus, minus, cfg.smoothing);
        }
    }

    if (stats) stats->ts_solves += solves;
    va.validate();
    return va;
}

} // namespace ato
