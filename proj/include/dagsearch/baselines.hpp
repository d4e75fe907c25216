#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <unordered_map>
#include <vector>

#include "dagsearch/domains.hpp"
#include "dagsearch/engine.hpp"
#include "dagsearch/search_dag.hpp"

namespace dagsearch {

/// Per-node visit/reward statistics for the count-based baselines.
struct CountStats {
    std::uint64_t visits = 0;
    double reward_sum = 0.0;
    double reward_sq_sum = 0.0;

    double mean() const { return visits ? reward_sum / static_cast<double>(visits) : 0.0; }
    double variance() const {
        if (!visits) return 0.0;
        double m = mean();
        return std::max(reward_sq_sum / static_cast<double>(visits) - m * m, 0.0);
    }
};

struct RaveConfig {
    double c1 = 1e-4;
    double c2 = 1e4;
    double c3 = 1e4;
};

/// Global per-feature and local per-(node, feature) running reward means.
class RaveStats {
public:
    void update(const std::vector<NodeId>& path_nodes, const std::vector<int>& terminal_bag,
                double reward);

    double global_mean(int feature) const;
    std::uint64_t global_count(int feature) const;
    double local_mean(NodeId node, int feature) const;
    std::uint64_t local_count(NodeId node, int feature) const;

private:
    struct Sum {
        double total = 0.0;
        std::uint64_t count = 0;
    };
    std::unordered_map<int, Sum> global_;
    std::unordered_map<NodeId, std::unordered_map<int, Sum>> local_;
};

enum class BaselineMethod { Uct, Ucd, UctRave };

struct BaselineConfig {
    BaselineMethod method = BaselineMethod::Uct;
    double beta = 1.0;
    int budget = 0;
    std::uint64_t seed = 0;
    int pilot_rollouts = 0;
    bool standardize = false;
    RaveConfig rave;
};

/// UCB child selection: unvisited children first (lowest id among them),
/// otherwise argmax/argmin of mean -+ beta*sqrt(ln(n_parent)/n_child).
NodeId uct_select(const SearchDag& dag, const std::vector<CountStats>& stats, NodeId parent,
                  double beta);

/// RAVE-combined score selection at a MAX parent (Gaudel-style feature
/// selection). Unvisited children score with mean 0, variance 0 and an
/// effective visit count of 1 inside logs and divisions.
NodeId rave_select(const SearchDag& dag, const std::vector<CountStats>& stats,
                   const RaveStats& rave, NodeId parent, const RaveConfig& config);

/// Count-based searches sharing the DAG and domain plumbing: UCT runs on the
/// tree representation (fresh node per insertion), UCD on the transposition
/// DAG updating only the traversed path, UCT-RAVE adds feature scores.
class BanditSearch {
public:
    BanditSearch(std::shared_ptr<const Domain> domain, const BaselineConfig& config);

    const RunTrace& run();
    const IterationRecord& step();
    void run_pilot();

    StateKey recommend_state(const StateKey& state, NodeId& handle, std::mt19937_64& rng) const;

    const SearchDag& dag() const { return dag_; }
    const std::vector<CountStats>& stats() const { return stats_; }
    const RaveStats& rave() const { return rave_; }
    const RunTrace& trace() const { return trace_; }
    const Standardizer& standardizer() const { return standardizer_; }

private:
    RolloutResult rollout(const StateKey& from, std::mt19937_64& rng) const;
    NodeId select(NodeId parent) const;

    std::shared_ptr<const Domain> domain_;
    BaselineConfig config_;
    SearchDag dag_;
    std::vector<CountStats> stats_;
    RaveStats rave_;
    Standardizer standardizer_;
    RunTrace trace_;
    mutable std::mt19937_64 search_rng_;
    std::mt19937_64 pilot_rng_;
    int iteration_ = 0;
    bool pilot_done_ = false;
};

}  // namespace dagsearch
