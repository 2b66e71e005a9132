#pragma once

#include "ato/common.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ato {

/// SplitMix64 step; used to derive well-separated seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Folds a key sequence into a master seed. Streams derived with distinct
/// keys are statistically independent, and adding new consumers with new
/// keys never shifts the draws of existing ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
    std::uint64_t s = master ^ 0xd1b54a32d192ed03ULL;
    for (std::uint64_t k : key) {
        s ^= k + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        splitmix64(s);
    }
    splitmix64(s);
    return s;
}

/// Deterministic random stream. mt19937_64 supplies the bits (its output
/// sequence is pinned by the standard); all distributions are implemented
/// here so draws do not depend on the standard library vendor.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    static RngStream from_key(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
        return RngStream(derive_seed(master, key));
    }

    std::uint64_t bits() { return gen_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; never returns zero (safe for logarithms).
    double uniform01_open() { return 1.0 - uniform01(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double uniform(const Interval& iv) { return uniform(iv.lo, iv.hi); }

    /// Uniform integer on [lo, hi], unbiased via rejection.
    long long uniform_int(long long lo, long long hi) {
        require(lo <= hi, "uniform_int: empty range");
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<long long>(bits()); // full 64-bit range
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t r;
        do {
            r = bits();
        } while (r >= limit);
        return lo + static_cast<long long>(r % span);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller; no cached spare so the draw count
    /// per call is fixed.
    double standard_normal() {
        double u1 = uniform01_open();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * standard_normal(); }

    /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        require(shape > 0.0, "gamma: shape must be positive");
        if (shape < 1.0) {
            double u = uniform01_open();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = standard_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform01_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Dirichlet draw: normalized independent gammas, strictly positive.
    std::vector<double> dirichlet(const std::vector<double>& zeta) {
        require(!zeta.empty(), "dirichlet: empty parameter vector");
        std::vector<double> w(zeta.size());
        double total = 0.0;
        for (std::size_t i = 0; i < zeta.size(); ++i) {
            require(zeta[i] > 0.0, "dirichlet: parameters must be positive");
            w[i] = gamma(zeta[i]);
            total += w[i];
        }
        for (double& v : w) v /= total;
        return w;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace ato
