#pragma once

#include <Eigen/Dense>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dagsearch/gaussian.hpp"
#include "dagsearch/kernel.hpp"

namespace dagsearch {

/// Thrown when the observed Gram is not positive definite even after jitter
/// escalation; carries the offending leaf.
struct FactorizationBreakdown : std::runtime_error {
    explicit FactorizationBreakdown(const StateKey& leaf)
        : std::runtime_error("posterior Gram factorization breakdown"), offending_leaf(leaf) {}
    StateKey offending_leaf;
};

/// Reward standardization fitted from pilot rollouts: r -> (r - shift)/scale.
struct Standardizer {
    double shift = 0.0;
    double scale = 1.0;
    bool warned_degenerate = false;

    double apply(double r) const { return (r - shift) / scale; }
};

/// (mean, sample std) of the pilot rewards; scale floored at 1e-6 on zero
/// spread, with the warning flag set.
Standardizer standardize_from_pilot(const std::vector<double>& rewards);

/// Exact Gaussian-regression posterior over generative scores, maintained
/// incrementally: a growing Cholesky factor of
/// K = scale*Sigma_OO + (noise + scale*jitter)*I is extended by one
/// row/column per observation in O(n^2). Marginal queries are cached per
/// state key; a cached query costs O(1) per new observation thereafter.
class PosteriorState {
public:
    PosteriorState(std::shared_ptr<const Kernel> kernel, double noise);

    /// Appends one observation. Repeated leaves add new rows (the noise term
    /// keeps K nonsingular). On factorization breakdown the jitter is raised
    /// x10 (up to max_jitter) and the factorization rebuilt from the log;
    /// throws FactorizationBreakdown once the cap is exceeded.
    void add_observation(const StateKey& leaf, double reward);

    /// Posterior marginal of the generative score at any state.
    GaussianBelief marginal(const StateKey& key) const;

    std::size_t observation_count() const { return static_cast<std::size_t>(n_); }
    const std::vector<std::pair<StateKey, double>>& log() const { return log_; }
    double noise() const { return noise_; }
    double current_jitter() const { return jitter_; }

    void set_max_jitter(double j) { max_jitter_ = j; }

private:
    struct CachedQuery {
        Eigen::VectorXd x;  // L^{-1} k_{O,key}, grown alongside L
        double prior_mean;
        double prior_var;
    };

    void append_row(const StateKey& leaf, double reward);
    void rebuild();
    CachedQuery& cache_for(const StateKey& key) const;

    std::shared_ptr<const Kernel> kernel_;
    double noise_;
    double jitter_;
    double max_jitter_ = 1e-2;

    Eigen::Index n_ = 0;
    Eigen::MatrixXd chol_;       // lower triangular, top-left n x n valid
    Eigen::VectorXd whitened_;   // L^{-1} (r - mu_O)
    std::vector<std::pair<StateKey, double>> log_;
    mutable std::unordered_map<StateKey, CachedQuery> cache_;

    void reserve(Eigen::Index capacity);
};

}  // namespace dagsearch
