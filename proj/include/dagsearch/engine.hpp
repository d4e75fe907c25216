#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dagsearch/delta_table.hpp"
#include "dagsearch/domains.hpp"
#include "dagsearch/posterior.hpp"
#include "dagsearch/search_dag.hpp"
#include "dagsearch/values.hpp"

namespace dagsearch {

enum class Representation { Dag, Tree };

struct SearchConfig {
    double beta = 1.0;        // exploration constant
    double lambda = 1e-4;     // observation noise
    BackupRule rule = BackupRule::Ep;
    Representation representation = Representation::Dag;
    int budget = 0;
    std::uint64_t seed = 0;
    int pilot_rollouts = 0;
    bool standardize = false;         // fit shift/scale from the pilot phase
    bool delta_prior = true;    // standard normal prior inside the delta tables
    bool backup_prior = true;   // same prior at interior extremal backups
};

struct IterationRecord {
    int iteration = 0;
    StateKey boundary_key;
    StateKey terminal_key;
    double raw_reward = 0.0;
    double std_reward = 0.0;
    double best_so_far = 0.0;
};

struct RolloutResult {
    StateKey terminal_key;
    double reward = 0.0;  // raw, pre-standardization
};

struct RunTrace {
    std::vector<double> pilot_rewards;
    std::vector<IterationRecord> iterations;
    double best_so_far = -std::numeric_limits<double>::infinity();
    StateKey best_key;  // terminal state achieving best_so_far (pilot included)
};

/// The probabilistic DAG/tree search: UCB descent over value beliefs,
/// expand, uniform rollout, posterior update, boundary + interior value
/// refresh. Deterministic given (seed, config, domain).
class ProbabilisticSearch {
public:
    ProbabilisticSearch(std::shared_ptr<const Domain> domain, const SearchConfig& config);

    /// Pilot phase (rollouts feeding the standardizer) followed by `budget`
    /// iterations.
    const RunTrace& run();

    /// One search iteration; returns the record appended to the trace.
    const IterationRecord& step();

    void run_pilot();

    /// UCB child selection at an interior node (Max: argmax of
    /// mean + beta*sqrt(log(n_parent)*var); Min mutatis mutandis; log floored
    /// at 0; ties by lowest child id).
    NodeId select_child(NodeId parent) const;

    /// Uniform-random descent to a terminal state.
    RolloutResult rollout(const StateKey& from, std::mt19937_64& rng) const;

    /// MAP move: best explored child by value mean, or a uniform-random
    /// legal successor when the state is unknown/boundary. Returns the
    /// successor state.
    StateKey recommend_state(const StateKey& state, std::mt19937_64& rng) const;
    /// Same, advancing a node handle so tree representations can follow the
    /// game path (handle -1 = off the explored structure).
    StateKey recommend_state(const StateKey& state, NodeId& handle, std::mt19937_64& rng) const;

    const SearchDag& dag() const { return dag_; }
    const ValueStore& values() const { return values_; }
    const PosteriorState& posterior() const { return posterior_; }
    const DeltaTable& delta_table() const { return delta_table_; }
    const DeltaConfig& delta_config() const { return delta_config_; }
    const RunTrace& trace() const { return trace_; }
    const Standardizer& standardizer() const { return standardizer_; }
    const Domain& domain() const { return *domain_; }
    const SearchConfig& config() const { return config_; }

private:
    void refresh_frontier_and_values();
    NodeId advance_handle(NodeId handle, const StateKey& next_state) const;

    std::shared_ptr<const Domain> domain_;
    SearchConfig config_;
    SearchDag dag_;
    ValueStore values_;
    PosteriorState posterior_;
    DeltaConfig delta_config_;
    DeltaTable delta_table_;
    BackupConfig backup_config_;
    Standardizer standardizer_;
    RunTrace trace_;
    mutable std::mt19937_64 search_rng_;
    std::mt19937_64 pilot_rng_;
    int iteration_ = 0;
    bool pilot_done_ = false;
};

}  // namespace dagsearch
