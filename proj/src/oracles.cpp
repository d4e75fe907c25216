#include "dagsearch/oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "dagsearch/domains.hpp"
#include "dagsearch/kernel.hpp"

namespace dagsearch {

OracleReport mc_extremal_moments(const std::vector<GaussianBelief>& beliefs,
                                 const std::vector<std::vector<double>>* correlations,
                                 const ExtremalPrior& prior, ExtremumKind kind,
                                 std::uint64_t samples, std::uint64_t seed) {
    if (beliefs.empty() || samples < 100000) {
        throw std::invalid_argument("mc_extremal_moments: need inputs and >= 1e5 samples");
    }
    const std::size_t d = beliefs.size();

    // Transform i.i.d. standard normals by a Cholesky factor of the
    // covariance implied by the marginals and correlation matrix.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double rho = (i == j) ? 1.0 : (correlations ? (*correlations)[i][j] : 0.0);
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rho * beliefs[i].std_dev() * beliefs[j].std_dev();
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov +
                                    1e-12 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                                      static_cast<Eigen::Index>(d)));
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("mc_extremal_moments: covariance not factorizable");
    }
    Eigen::MatrixXd chol = llt.matrixL();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double wsum = 0.0, wsq = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
    Eigen::VectorXd z(static_cast<Eigen::Index>(d));
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gauss(rng);
        Eigen::VectorXd x = chol * z;
        double extreme;
        if (kind == ExtremumKind::Max) {
            extreme = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < d; ++i) {
                extreme = std::max(extreme, beliefs[i].mean + x(static_cast<Eigen::Index>(i)));
            }
        } else {
            extreme = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < d; ++i) {
                extreme = std::min(extreme, beliefs[i].mean + x(static_cast<Eigen::Index>(i)));
            }
        }
        double w = 1.0;
        if (prior.has_prior()) {
            double diff = extreme - prior.belief->mean;
            w = std::exp(-0.5 * diff * diff / prior.belief->variance);
        }
        wsum += w;
        wsq += w * w;
        m1 += w * extreme;
        m2 += w * extreme * extreme;
        m3 += w * extreme * extreme * extreme;
        m4 += w * extreme * extreme * extreme * extreme;
    }

    OracleReport report;
    report.name = (kind == ExtremumKind::Max) ? "mc_max_moments" : "mc_min_moments";
    report.samples = samples;
    double mean = m1 / wsum;
    double raw2 = m2 / wsum;
    double var = std::max(raw2 - mean * mean, 0.0);
    // Central fourth moment from raw weighted moments.
    double raw3 = m3 / wsum, raw4 = m4 / wsum;
    double mu4 = raw4 - 4.0 * mean * raw3 + 6.0 * mean * mean * raw2 - 3.0 * std::pow(mean, 4);
    double ess = wsum * wsum / wsq;
    report.mean = mean;
    report.std_dev = std::sqrt(var);
    report.effective_samples = ess;
    report.mean_std_err = std::sqrt(var / ess);
    double var_of_var = std::max(mu4 - var * var, 0.0) / ess;
    report.std_std_err = report.std_dev > 0.0 ? std::sqrt(var_of_var) / (2.0 * report.std_dev) : 0.0;
    report.reliable = ess >= 100.0;
    return report;
}

BestLeaf exhaustive_best_leaf(const Domain& domain, std::uint64_t max_terminals) {
    std::unordered_set<StateKey> visited;
    std::uint64_t terminal_count = 0;
    BestLeaf best;
    bool found = false;

    std::vector<StateKey> stack{domain.root_state()};
    visited.insert(stack.back());
    while (!stack.empty()) {
        StateKey state = std::move(stack.back());
        stack.pop_back();
        if (domain.is_terminal(state)) {
            if (++terminal_count > max_terminals) {
                throw std::runtime_error("exhaustive_best_leaf: terminal count guard exceeded");
            }
            double r = domain.terminal_reward(state);
            if (!found || r > best.reward) {
                best = {state, r};
                found = true;
            }
            continue;
        }
        for (StateKey& next : domain.successors(state)) {
            if (visited.insert(next).second) stack.push_back(std::move(next));
        }
    }
    if (!found) {
        throw std::runtime_error("exhaustive_best_leaf: domain has no terminals");
    }
    return best;
}

std::vector<GaussianBelief> batch_posterior(
    const Kernel& kernel, const std::vector<std::pair<std::string, double>>& observations,
    double noise, const std::vector<std::string>& queries) {
    const Eigen::Index n = static_cast<Eigen::Index>(observations.size());
    if (observations.size() > 5000) {
        throw std::invalid_argument("batch_posterior: observation count guard exceeded");
    }
    const double scale = kernel.scale();

    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd resid(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& [ki, ri] = observations[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = scale * kernel.cov(ki, observations[static_cast<std::size_t>(j)].first);
            gram(i, j) = v;
            gram(j, i) = v;
        }
        gram(i, i) += scale * kernel.jitter() + noise;
        resid(i) = ri - kernel.prior_mean(ki);
    }

    double extra = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (int attempt = 0; attempt < 8; ++attempt) {
        llt.compute(gram + extra * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) break;
        extra = (extra == 0.0) ? 1e-10 : extra * 10.0;
    }
    if (n > 0 && llt.info() != Eigen::Success) {
        throw std::runtime_error("batch_posterior: Gram not positive definite after jitter");
    }

    std::vector<GaussianBelief> result;
    result.reserve(queries.size());
    Eigen::VectorXd alpha = n > 0 ? llt.solve(resid).eval() : Eigen::VectorXd();
    for (const std::string& q : queries) {
        double prior_var = scale * kernel.cov(q, q);
        if (n == 0) {
            result.push_back({kernel.prior_mean(q), prior_var});
            continue;
        }
        Eigen::VectorXd k(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            k(i) = scale * kernel.cov(q, observations[static_cast<std::size_t>(i)].first);
        }
        double mean = kernel.prior_mean(q) + k.dot(alpha);
        double var = prior_var - k.dot(llt.solve(k));
        result.push_back({mean, std::max(var, 0.0)});
    }
    return result;
}

int negamax_ttt(const std::string& board) {
    int won = TicTacToeDomain::winner(board);
    if (won != 0) return won;
    int marks = 0;
    for (char c : board)
        if (c != '.') ++marks;
    if (marks == 9) return 0;
    char mover = (marks % 2 == 0) ? 'X' : 'O';
    bool maximizing = (mover == 'X');
    int best = maximizing ? -2 : 2;
    for (int cell = 0; cell < 9; ++cell) {
        if (board[static_cast<std::size_t>(cell)] != '.') continue;
        std::string next = board;
        next[static_cast<std::size_t>(cell)] = mover;
        int v = negamax_ttt(next);
        best = maximizing ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

}  // namespace dagsearch
