#pragma once

#include <optional>
#include <vector>

#include "dagsearch/gaussian.hpp"

namespace dagsearch {

enum class ExtremumKind { Max, Min };

/// Optional Gaussian prior on the extremum itself. kind-none represents the
/// uninformative limit sigma0 -> inf.
struct ExtremalPrior {
    std::optional<GaussianBelief> belief;

    static ExtremalPrior none() { return {}; }
    static ExtremalPrior gaussian(double mean, double variance) {
        return {GaussianBelief{mean, variance}};
    }
    static ExtremalPrior standard_normal() { return gaussian(0.0, 1.0); }

    bool has_prior() const { return belief.has_value(); }

    ExtremalPrior negated() const {
        if (!belief) return {};
        return {belief->negated()};
    }
};

/// Two jointly Gaussian variables with correlation rho in [-1, 1].
struct BivariatePair {
    GaussianBelief a;
    GaussianBelief b;
    double correlation = 0.0;
};

/// Moment-matched result of a pairwise extremum, with the branch
/// responsibilities (probability that a resp. b attains the extremum).
/// The weights drive the cross-covariance bookkeeping in correlated folds.
struct PairExtremum {
    GaussianBelief belief;
    double weight_a = 0.0;
    double weight_b = 0.0;
};

/// Gaussian moment match of max(a, b), optionally fused with a Gaussian prior
/// on the maximum. Implements the corrected symmetric forms of the pairwise
/// max moments (second raw moment in the variance, sigma_c^2 = s1^2 s0^2 /
/// (s1^2 + s0^2), k1 mirroring k2 under 1<->2 relabeling).
PairExtremum max_moments_pair(const BivariatePair& pair, const ExtremalPrior& prior);

/// min(a, b) via min(x) = -max(-x): negate means (and the prior mean),
/// delegate, negate the result mean.
PairExtremum min_moments_pair(const BivariatePair& pair, const ExtremalPrior& prior);

/// Iterative extremum of a set, folding the pairwise approximation
/// left-to-right over the input order (the fold order is part of the
/// contract). The prior is applied at every pairwise step. With a
/// correlation matrix the running extremum's correlation to each remaining
/// variable is tracked as the responsibility-weighted cross-covariance
/// cov(m, x_j) ~= w_a cov(x_left, x_j) + w_b cov(x_i, x_j).
GaussianBelief extremum_of_set(const std::vector<GaussianBelief>& beliefs,
                               const std::vector<std::vector<double>>* correlations,
                               const ExtremalPrior& prior, ExtremumKind kind);

/// Independent-inputs convenience overload (O(b)).
GaussianBelief extremum_of_set(const std::vector<GaussianBelief>& beliefs,
                               const ExtremalPrior& prior, ExtremumKind kind);

}  // namespace dagsearch
