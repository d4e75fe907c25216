#include "dagsearch/posterior.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

namespace dagsearch {

Standardizer standardize_from_pilot(const std::vector<double>& rewards) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("standardize_from_pilot: need at least 2 rewards");
    }
    double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / rewards.size();
    double ss = 0.0;
    for (double r : rewards) ss += (r - mean) * (r - mean);
    double sd = std::sqrt(ss / (rewards.size() - 1));
    Standardizer s;
    s.shift = mean;
    if (sd < 1e-6) {
        std::cerr << "warning: pilot rewards have (near-)zero spread; flooring scale at 1e-6\n";
        s.scale = 1e-6;
        s.warned_degenerate = true;
    } else {
        s.scale = sd;
    }
    return s;
}

PosteriorState::PosteriorState(std::shared_ptr<const Kernel> kernel, double noise)
    : kernel_(std::move(kernel)), noise_(noise), jitter_(kernel_->jitter()) {
    if (!(noise_ > 0.0)) {
        throw std::invalid_argument("PosteriorState: noise must be strictly positive");
    }
    reserve(64);
}

void PosteriorState::reserve(Eigen::Index capacity) {
    if (chol_.rows() >= capacity) return;
    Eigen::Index cap = std::max<Eigen::Index>(capacity, chol_.rows() * 2);
    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(cap, cap);
    grown.topLeftCorner(n_, n_) = chol_.topLeftCorner(n_, n_);
    chol_ = std::move(grown);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(cap);
    w.head(n_) = whitened_.head(n_);
    whitened_ = std::move(w);
}

void PosteriorState::append_row(const StateKey& leaf, double reward) {
    reserve(n_ + 1);
    const double scale = kernel_->scale();
    Eigen::VectorXd k_new(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
        k_new(i) = scale * kernel_->cov(log_[static_cast<std::size_t>(i)].first, leaf);
    }
    double k_self = scale * (kernel_->cov(leaf, leaf) + jitter_) + noise_;

    Eigen::VectorXd l12(n_);
    if (n_ > 0) {
        l12 = chol_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solve(k_new);
    }
    double d = k_self - (n_ > 0 ? l12.squaredNorm() : 0.0);
    if (!(d > 0.0)) {
        throw FactorizationBreakdown(leaf);
    }
    double l22 = std::sqrt(d);

    if (n_ > 0) chol_.row(n_).head(n_) = l12.transpose();
    chol_(n_, n_) = l22;
    whitened_(n_) =
        (reward - kernel_->prior_mean(leaf) - (n_ > 0 ? l12.dot(whitened_.head(n_)) : 0.0)) / l22;

    for (auto& [key, q] : cache_) {
        double kq = scale * kernel_->cov(key, leaf);
        double xn = (kq - (n_ > 0 ? l12.dot(q.x.head(n_)) : 0.0)) / l22;
        if (q.x.size() < n_ + 1) {
            Eigen::VectorXd grown = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n_ + 1, q.x.size() * 2));
            grown.head(n_) = q.x.head(n_);
            q.x = std::move(grown);
        }
        q.x(n_) = xn;
    }
    ++n_;
}

void PosteriorState::add_observation(const StateKey& leaf, double reward) {
    log_.emplace_back(leaf, reward);
    bool appended = false;
    while (true) {
        try {
            if (appended) {
                rebuild();  // replays the full log, including the new entry
            } else {
                append_row(leaf, reward);
            }
            return;
        } catch (const FactorizationBreakdown&) {
            if (jitter_ * 10.0 > max_jitter_ * (1.0 + 1e-12)) {
                log_.pop_back();
                rebuild();
                throw;
            }
            jitter_ = (jitter_ == 0.0) ? 1e-8 : jitter_ * 10.0;
            appended = true;
        }
    }
}

void PosteriorState::rebuild() {
    cache_.clear();
    n_ = 0;
    chol_.setZero();
    whitened_.setZero();
    for (const auto& [leaf, reward] : log_) {
        append_row(leaf, reward);  // breakdown here propagates to the caller loop
    }
}

PosteriorState::CachedQuery& PosteriorState::cache_for(const StateKey& key) const {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    CachedQuery q;
    q.prior_mean = kernel_->prior_mean(key);
    q.prior_var = kernel_->prior_variance(key);
    q.x = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n_, 1));
    if (n_ > 0) {
        const double scale = kernel_->scale();
        Eigen::VectorXd k(n_);
        for (Eigen::Index i = 0; i < n_; ++i) {
            k(i) = scale * kernel_->cov(key, log_[static_cast<std::size_t>(i)].first);
        }
        q.x.head(n_) = chol_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solve(k);
    }
    return cache_.emplace(key, std::move(q)).first->second;
}

GaussianBelief PosteriorState::marginal(const StateKey& key) const {
    const CachedQuery& q = cache_for(key);
    if (n_ == 0) {
        return {q.prior_mean, q.prior_var};
    }
    double mean = q.prior_mean + q.x.head(n_).dot(whitened_.head(n_));
    double var = q.prior_var - q.x.head(n_).squaredNorm();
    return {mean, std::max(var, 0.0)};
}

}  // namespace dagsearch
