#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagsearch/feature_bag.hpp"
#include "dagsearch/kernel.hpp"
#include "dagsearch/search_dag.hpp"

namespace dagsearch {

/// A search problem instance: leveled state space with canonical keys,
/// deterministic successor order, terminal rewards, and the similarity
/// kernel for the generative-score prior.
class Domain {
public:
    virtual ~Domain() = default;

    virtual StateKey root_state() const = 0;
    virtual std::vector<StateKey> successors(const StateKey& state) const = 0;
    virtual bool is_terminal(const StateKey& state) const = 0;
    virtual double terminal_reward(const StateKey& state) const = 0;
    virtual NodeKind node_kind(int level) const = 0;
    virtual int max_depth() const = 0;
    /// Children count of any node at the given level (constant per level).
    virtual int branching_at(int level) const = 0;
    virtual std::shared_ptr<const Kernel> kernel() const = 0;
    /// Brownian step variance for the increment abstraction.
    virtual double step_variance() const = 0;
    virtual std::string name() const = 0;
};

/// Synthetic feature-bag DAG: nodes are subsets of {1..N} of size <= m,
/// leaf rewards one fixed draw from N(0, Sigma) with
/// Sigma_ij = (|x_i ^ x_j| + 1)/(m + 1). The searcher is given the true
/// kernel.
class SyntheticDomain : public Domain {
public:
    SyntheticDomain(int feature_count, int bag_limit, std::uint64_t ground_truth_seed);

    StateKey root_state() const override { return {}; }
    std::vector<StateKey> successors(const StateKey& state) const override;
    bool is_terminal(const StateKey& state) const override;
    double terminal_reward(const StateKey& state) const override;
    NodeKind node_kind(int) const override { return NodeKind::Max; }
    int max_depth() const override { return bag_limit_; }
    int branching_at(int level) const override { return feature_count_ - level; }
    std::shared_ptr<const Kernel> kernel() const override { return kernel_; }
    double step_variance() const override { return 1.0 / (bag_limit_ + 1.0); }
    std::string name() const override { return "synthetic"; }

    const std::unordered_map<StateKey, double>& ground_truth() const { return rewards_; }

private:
    int feature_count_;
    int bag_limit_;
    std::shared_ptr<SharedFeatureKernel> kernel_;
    std::unordered_map<StateKey, double> rewards_;
};

/// Tic-Tac-Toe. Keys are 9-char boards ('X', 'O', '.') in row-major cell
/// order; X (the MAX player) moves at even levels. Rewards from the MAX
/// perspective: win 1, draw 0, loss -1.
class TicTacToeDomain : public Domain {
public:
    TicTacToeDomain(double kernel_scale = 0.5, double kernel_jitter = 1e-6);

    StateKey root_state() const override { return StateKey(9, '.'); }
    std::vector<StateKey> successors(const StateKey& state) const override;
    bool is_terminal(const StateKey& state) const override;
    double terminal_reward(const StateKey& state) const override;
    NodeKind node_kind(int level) const override {
        return level % 2 == 0 ? NodeKind::Max : NodeKind::Min;
    }
    int max_depth() const override { return 9; }
    int branching_at(int level) const override { return 9 - level; }
    std::shared_ptr<const Kernel> kernel() const override { return kernel_; }
    double step_variance() const override { return kernel_->scale(); }
    std::string name() const override { return "tictactoe"; }

    static int winner(const StateKey& board);  // +1 X, -1 O, 0 none
    /// Lexicographically smallest board among the 8 rotations/reflections.
    static StateKey canonical(const StateKey& board);

private:
    std::shared_ptr<BoardOverlapKernel> kernel_;
};

/// Exact game value (for the side to move, from MAX's perspective) plus all
/// value-achieving moves. Memoized over board keys. The optimal MIN
/// opponent plays the lowest-index optimal cell.
class TttMinimaxOracle {
public:
    struct Result {
        int value = 0;                // -1, 0, 1 from MAX's perspective
        std::vector<int> best_cells;  // value-achieving moves, ascending
    };
    const Result& evaluate(const StateKey& board);
    int opponent_move(const StateKey& board);  // lowest-index optimal cell

private:
    std::unordered_map<StateKey, Result> memo_;
};

/// Reward oracle for feature-selection terminals (bags of size k).
class RewardOracle {
public:
    virtual ~RewardOracle() = default;
    virtual double evaluate(const std::vector<int>& bag) const = 0;
    virtual bool deterministic() const { return true; }
    virtual bool concurrent_safe() const { return true; }
};

/// Deterministic desk-scale stand-in for a classifier: per-feature
/// informativeness with pairwise redundancy inside feature groups, so the
/// greedy top-k choice is suboptimal by construction.
class PixelInformativenessOracle : public RewardOracle {
public:
    explicit PixelInformativenessOracle(int feature_count);
    double evaluate(const std::vector<int>& bag) const override;

    double weight(int feature) const { return weights_[static_cast<std::size_t>(feature - 1)]; }
    double redundancy(int a, int b) const;

private:
    int feature_count_;
    std::vector<double> weights_;
};

/// Line-oriented out-of-process oracle: writes the sorted bag as
/// space-separated indices to `out`, reads one real per line from `in`.
/// Evaluate calls are serialized by the caller.
class StreamRewardOracle : public RewardOracle {
public:
    StreamRewardOracle(std::ostream& out, std::istream& in) : out_(out), in_(in) {}
    double evaluate(const std::vector<int>& bag) const override;
    bool concurrent_safe() const override { return false; }

private:
    std::ostream& out_;
    std::istream& in_;
};

/// Generic feature selection: states are bags of size <= k over {1..N},
/// terminals are size-k bags scored by the oracle; all nodes MAX; kernel is
/// shared-feature count with +1 on the diagonal, scale 1/k.
class FeatureSelectionDomain : public Domain {
public:
    FeatureSelectionDomain(int feature_count, int subset_size,
                           std::shared_ptr<const RewardOracle> oracle);

    StateKey root_state() const override { return {}; }
    std::vector<StateKey> successors(const StateKey& state) const override;
    bool is_terminal(const StateKey& state) const override;
    double terminal_reward(const StateKey& state) const override;
    NodeKind node_kind(int) const override { return NodeKind::Max; }
    int max_depth() const override { return subset_size_; }
    int branching_at(int level) const override { return feature_count_ - level; }
    std::shared_ptr<const Kernel> kernel() const override { return kernel_; }
    double step_variance() const override { return kernel_->scale(); }
    std::string name() const override { return "featsel"; }

    const RewardOracle& oracle() const { return *oracle_; }

private:
    int feature_count_;
    int subset_size_;
    std::shared_ptr<const RewardOracle> oracle_;
    std::shared_ptr<SharedCountKernel> kernel_;
};

}  // namespace dagsearch
