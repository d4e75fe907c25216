#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dagsearch {

/// Scalar Gaussian belief (mean, variance). Variance 0 encodes a point mass.
struct GaussianBelief {
    double mean = 0.0;
    double variance = 0.0;

    double std_dev() const { return std::sqrt(variance); }

    GaussianBelief negated() const { return {-mean, variance}; }

    /// Sum of independent Gaussians: means and variances add.
    GaussianBelief operator+(const GaussianBelief& other) const {
        return {mean + other.mean, variance + other.variance};
    }

    bool is_finite() const {
        return std::isfinite(mean) && std::isfinite(variance) && variance >= 0.0;
    }
};

namespace normal {

inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;  // log(sqrt(2*pi))

inline double pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

inline double cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

inline double log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

/// log N(x; mu, var)
inline double log_pdf(double x, double mu, double var) {
    double d = x - mu;
    return -0.5 * d * d / var - 0.5 * std::log(var) - kLogSqrt2Pi;
}

/// log Phi(x), stable in the far left tail where erfc underflows.
inline double log_cdf(double x) {
    if (x > -20.0) {
        return std::log(cdf(x));
    }
    // Asymptotic expansion of the Mills ratio for x -> -inf.
    double x2 = x * x;
    double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

/// Hazard rate phi(x)/Phi(x), stable for large negative x.
inline double hazard(double x) {
    if (x > -8.0) {
        return pdf(x) / cdf(x);
    }
    double x2 = x * x;
    double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -x / series;
}

}  // namespace normal

namespace rng {

/// splitmix64 step; used to derive independent seeds for named streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for a named sub-stream of a run (phase 0 = pilot, 1 = search, 2 = evaluation, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t phase) {
    std::uint64_t s = base ^ (0x517cc1b727220a95ULL * (phase + 1));
    return splitmix64(s);
}

}  // namespace rng

}  // namespace dagsearch
