#pragma once

#include "ato/common.hpp"
#include "ato/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ato {

/// Concave piecewise-linear value of one component's terminal inventory.
/// breakpoints[0] == 0 and slopes[k] applies on
/// [breakpoints[k], breakpoints[k+1]); the last slope extends to infinity.
struct PiecewiseValue {
    std::vector<double> breakpoints{0.0};
    std::vector<double> slopes{0.0};

    double evaluate(double inventory) const;
    int num_segments() const { return static_cast<int>(slopes.size()); }
    void validate() const; // sorted breakpoints, non-increasing slopes
};

/// Separable terminal-inventory value: one PiecewiseValue per component.
struct ValueApprox {
    std::vector<PiecewiseValue> components;

    static ValueApprox identity(int num_components);
    int num_components() const { return static_cast<int>(components.size()); }
    double evaluate(const std::vector<double>& inventory) const;
    void validate() const;
};

/// Value approximations keyed by calendar month, or a single pooled one.
struct SeasonalValueApprox {
    bool monthly = true;
    std::vector<ValueApprox> approx; // 12 entries when monthly, else 1

    const ValueApprox& for_month(int month) const;
    void validate() const;
};

struct FosvaConfig {
    int iterations = 50;                 // K
    std::vector<double> inventory_cap;   // per-component sampling upper bound; size 1 broadcasts
    double epsilon = 1.0;                // finite-difference perturbation, pieces
    double smoothing = 0.5;              // alpha in (0,1]
    std::uint64_t seed = 0;
    bool monthly = true;
    double training_gap = 1e-5;          // solver gap when training on integer solves
    bool train_on_relaxation = true;     // finite differences on the exact LP value function

    void validate() const;
    double cap_for(int component) const;
};

/// Objective value of the two-stage model as a function of the initial
/// inventory vector. Injected so training can run against the real solver
/// or a test oracle.
using InventoryValueFn = std::function<double(const std::vector<double>&)>;

/// Forward/backward finite-difference slopes at `point` along component i.
/// `base_value` is the (shared) unperturbed objective; when
/// point[i] < epsilon the backward slope reuses the forward one.
std::pair<double, double> finite_difference_slopes(const InventoryValueFn& value_fn,
                                                   const std::vector<double>& point,
                                                   double base_value, double epsilon,
                                                   int component);

/// One CAVE-style update: inserts `point` as a breakpoint, smooths the
/// neighbouring slopes toward the observed finite differences, and restores
/// monotonicity. Keeps breakpoints strictly increasing (a coincident point
/// reuses the existing breakpoint).
void update_approx(PiecewiseValue& pv, double point, double slope_plus, double slope_minus,
                   double smoothing);

struct TrainStats {
    long ts_solves = 0;
};

/// K iterations of sampled-inventory finite differences against `value_fn`.
/// The unperturbed solve is shared across components, so each iteration
/// costs 1 + 2*I evaluations.
ValueApprox train_value_approx(const InventoryValueFn& value_fn, int num_components,
                               const FosvaConfig& cfg, RngStream& rng,
                               TrainStats* stats = nullptr);

} // namespace ato
