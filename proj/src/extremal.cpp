#include "dagsearch/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dagsearch {

namespace {

// Point-mass inputs (leaf deltas) are regularized so the bivariate formulas
// stay defined; exact-variance test cases never reach this floor.
constexpr double kVarianceFloor = 1e-12;
constexpr double kLogZFloor = -690.77552789821368;  // log(1e-300)

double log_sum_exp(double a, double b) {
    double hi = std::max(a, b);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct Branch {
    double mu_c;      // mean of the prior-fused Gaussian factor
    double var_c;     // variance of the prior-fused Gaussian factor
    double log_evid;  // log N(mu0; mu_i, var0 + var_i), 0 without prior
};

Branch fuse_prior(double mu, double var, const ExtremalPrior& prior) {
    if (!prior.has_prior()) {
        return {mu, var, 0.0};
    }
    double mu0 = prior.belief->mean;
    double var0 = prior.belief->variance;
    if (!(var0 > 0.0)) {
        throw std::invalid_argument("extremal prior variance must be positive");
    }
    double var_c = var * var0 / (var + var0);
    double mu_c = (mu / var + mu0 / var0) * var_c;
    return {mu_c, var_c, normal::log_pdf(mu0, mu, var0 + var)};
}

}  // namespace

PairExtremum max_moments_pair(const BivariatePair& pair, const ExtremalPrior& prior) {
    if (!pair.a.is_finite() || !pair.b.is_finite()) {
        throw std::invalid_argument("max_moments_pair: non-finite input belief");
    }
    if (std::abs(pair.correlation) > 1.0 + 1e-9) {
        throw std::invalid_argument("max_moments_pair: |correlation| > 1");
    }
    double rho = std::clamp(pair.correlation, -1.0, 1.0);
    double var1 = std::max(pair.a.variance, kVarianceFloor);
    double var2 = std::max(pair.b.variance, kVarianceFloor);
    double mu1 = pair.a.mean, mu2 = pair.b.mean;
    double s1 = std::sqrt(var1), s2 = std::sqrt(var2);

    Branch b1 = fuse_prior(mu1, var1, prior);
    Branch b2 = fuse_prior(mu2, var2, prior);

    // Shared pieces of the truncation geometry.
    double cross = var1 * var2 * (1.0 - rho * rho);
    double A1 = s1 - rho * s2;
    double A2 = s2 - rho * s1;
    double a1 = std::sqrt(cross + A1 * A1 * b1.var_c);
    double a2 = std::sqrt(cross + A2 * A2 * b2.var_c);

    auto trunc_k = [](double num, double denom) {
        if (denom > 0.0) return num / denom;
        if (num > 0.0) return std::numeric_limits<double>::infinity();
        if (num < 0.0) return -std::numeric_limits<double>::infinity();
        return 0.0;
    };
    double k1 = trunc_k(A1 * b1.mu_c - s1 * mu2 + rho * s2 * mu1, a1);
    double k2 = trunc_k(A2 * b2.mu_c - s2 * mu1 + rho * s1 * mu2, a2);

    double log_w1 = b1.log_evid + normal::log_cdf(k1);
    double log_w2 = b2.log_evid + normal::log_cdf(k2);
    double log_z = log_sum_exp(log_w1, log_w2);

    if (log_z < kLogZFloor) {
        // Both truncation probabilities underflow; extreme dominance, the
        // larger-mean input is the maximum to machine precision.
        if (mu1 >= mu2) return {pair.a, 1.0, 0.0};
        return {pair.b, 0.0, 1.0};
    }

    double w1 = std::exp(log_w1 - log_z);
    double w2 = std::exp(log_w2 - log_z);

    double mean = 0.0, raw2 = 0.0;
    auto accumulate = [&](double w, const Branch& br, double A, double a, double k) {
        if (w <= 0.0) return;
        double sc = std::sqrt(br.var_c);
        double b_over_a = (a > 0.0) ? sc * A / a : 0.0;  // |b/a| <= 1 by construction
        double h = std::isinf(k) ? 0.0 : normal::hazard(k);
        double m = br.mu_c + sc * b_over_a * h;
        double r2 = br.mu_c * br.mu_c + br.var_c +
                    (2.0 * br.mu_c * sc * b_over_a - k * br.var_c * b_over_a * b_over_a) * h;
        mean += w * m;
        raw2 += w * r2;
    };
    accumulate(w1, b1, A1, a1, k1);
    accumulate(w2, b2, A2, a2, k2);

    double variance = std::max(raw2 - mean * mean, 0.0);
    if (!std::isfinite(mean) || !std::isfinite(variance)) {
        throw std::runtime_error("max_moments_pair: numerically degenerate result");
    }
    return {{mean, variance}, w1, w2};
}

PairExtremum min_moments_pair(const BivariatePair& pair, const ExtremalPrior& prior) {
    BivariatePair neg{pair.a.negated(), pair.b.negated(), pair.correlation};
    PairExtremum res = max_moments_pair(neg, prior.negated());
    res.belief.mean = -res.belief.mean;
    return res;
}

GaussianBelief extremum_of_set(const std::vector<GaussianBelief>& beliefs,
                               const std::vector<std::vector<double>>* correlations,
                               const ExtremalPrior& prior, ExtremumKind kind) {
    if (beliefs.empty()) {
        throw std::invalid_argument("extremum_of_set: empty input");
    }
    // Reduce the MIN case to MAX over negated inputs.
    std::vector<GaussianBelief> xs = beliefs;
    ExtremalPrior p = prior;
    if (kind == ExtremumKind::Min) {
        for (auto& x : xs) x = x.negated();
        p = prior.negated();
    }

    GaussianBelief running = xs[0];
    const std::size_t n = xs.size();

    // Correlation of the running extremum to each not-yet-folded input.
    std::vector<double> run_corr;
    if (correlations) {
        run_corr.resize(n, 0.0);
        for (std::size_t j = 1; j < n; ++j) run_corr[j] = (*correlations)[0][j];
    }

    for (std::size_t i = 1; i < n; ++i) {
        double rho = correlations ? std::clamp(run_corr[i], -1.0, 1.0) : 0.0;
        double prev_sd = running.std_dev();
        PairExtremum step = max_moments_pair({running, xs[i], rho}, p);
        if (correlations && i + 1 < n) {
            double new_sd = step.belief.std_dev();
            double xi_sd = xs[i].std_dev();
            for (std::size_t j = i + 1; j < n; ++j) {
                double cov = step.weight_a * run_corr[j] * prev_sd +
                             step.weight_b * (*correlations)[i][j] * xi_sd;
                run_corr[j] = (new_sd > 0.0) ? std::clamp(cov / new_sd, -1.0, 1.0) : 0.0;
            }
        }
        running = step.belief;
    }

    if (kind == ExtremumKind::Min) running.mean = -running.mean;
    return running;
}

GaussianBelief extremum_of_set(const std::vector<GaussianBelief>& beliefs,
                               const ExtremalPrior& prior, ExtremumKind kind) {
    return extremum_of_set(beliefs, nullptr, prior, kind);
}

}  // namespace dagsearch
