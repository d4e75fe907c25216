#pragma once

#include <memory>
#include <string>

#include "dagsearch/search_dag.hpp"

namespace dagsearch {

/// State-similarity function supplying the prior mean and covariance of the
/// generative scores: p(g) = N(mu, scale * Sigma). `jitter` is added to the
/// diagonal of the observed Gram (inside the scale) to keep it factorizable.
class Kernel {
public:
    virtual ~Kernel() = default;

    virtual double cov(const StateKey& a, const StateKey& b) const = 0;
    virtual double prior_mean(const StateKey&) const { return 0.0; }

    double scale() const { return scale_; }
    double jitter() const { return jitter_; }
    void set_scale(double s) { scale_ = s; }
    void set_jitter(double j) { jitter_ = j; }

    /// Prior variance of a query node (jitter excluded; it regularizes only
    /// the observed Gram).
    double prior_variance(const StateKey& key) const { return scale_ * cov(key, key); }

protected:
    double scale_ = 1.0;
    double jitter_ = 0.0;
};

/// Shared-feature kernel over sorted feature-bag keys:
/// cov = (|a ^ b| + 1) / (m + 1). The synthetic ground truth is drawn from
/// exactly this Gram.
class SharedFeatureKernel : public Kernel {
public:
    SharedFeatureKernel(int bag_limit, double scale, double jitter = 0.0) : bag_limit_(bag_limit) {
        scale_ = scale;
        jitter_ = jitter;
    }
    double cov(const StateKey& a, const StateKey& b) const override;

private:
    int bag_limit_;
};

/// Feature-selection kernel: shared selected feature count, +1 on the
/// diagonal.
class SharedCountKernel : public Kernel {
public:
    explicit SharedCountKernel(double scale, double jitter = 0.0) {
        scale_ = scale;
        jitter_ = jitter;
    }
    double cov(const StateKey& a, const StateKey& b) const override;
};

/// Tic-Tac-Toe kernel: number of overlapping x's and o's, divided by
/// (board cells + 1) = 10 so prior variances are O(1) before scaling.
class BoardOverlapKernel : public Kernel {
public:
    explicit BoardOverlapKernel(double scale, double jitter = 1e-6) {
        scale_ = scale;
        jitter_ = jitter;
    }
    double cov(const StateKey& a, const StateKey& b) const override;
};

}  // namespace dagsearch
