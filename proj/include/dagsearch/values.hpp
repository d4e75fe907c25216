#pragma once

#include <optional>
#include <vector>

#include "dagsearch/delta_table.hpp"
#include "dagsearch/extremal.hpp"
#include "dagsearch/gaussian.hpp"
#include "dagsearch/search_dag.hpp"

namespace dagsearch {

enum class BackupRule { Ep, Softmax };

struct BackupConfig {
    BackupRule rule = BackupRule::Ep;
    ExtremalPrior regularizer;  // standard normal when rewards are standardized
    bool summary_enabled = false;
};

/// Optimal value of a boundary node: generative score plus increment,
/// componentwise Gaussian sum.
inline GaussianBelief boundary_value(const GaussianBelief& g, const GaussianBelief& delta) {
    return g + delta;
}

/// Moment-matched extremum over the children's value beliefs, assuming
/// independence, with the configured regularizing prior at every fold step.
/// MIN nodes via the min/max duality.
GaussianBelief backup_ep(const std::vector<GaussianBelief>& children, NodeKind kind,
                         const BackupConfig& config);

/// Softmax relaxation of the extremum: weights
/// w_i ~ exp(-(mu_max - mu_i)/sigma_i), output mean sum w_i mu_i and
/// variance sum w_i^2 sigma_i^2. MIN via negate-apply-negate. Child
/// variances are floored at 1e-12 before division.
GaussianBelief backup_softmax(const std::vector<GaussianBelief>& children, NodeKind kind);

/// Value of the single summary variable standing in for a node's unexplored
/// children: parent generative score plus the parent-level increment with
/// the first branching factor replaced by the unexplored count. Empty when
/// there is nothing unexplored.
std::optional<GaussianBelief> summary_child(const GaussianBelief& parent_g, const DeltaTable& table,
                                            const DeltaConfig& delta_config,
                                            int parent_remaining_depth, int unexplored_count);

/// Per-node value beliefs over an explored DAG.
class ValueStore {
public:
    void resize(std::size_t node_count) { beliefs_.resize(node_count); }
    GaussianBelief& operator[](NodeId id) { return beliefs_[static_cast<std::size_t>(id)]; }
    const GaussianBelief& operator[](NodeId id) const {
        return beliefs_[static_cast<std::size_t>(id)];
    }
    std::size_t size() const { return beliefs_.size(); }

private:
    std::vector<GaussianBelief> beliefs_;
};

/// Recomputes interior beliefs in reverse level order (deepest first) over
/// the ancestors of the changed boundary nodes, so every parent is refreshed
/// after all of its children. Boundary/terminal beliefs must already be
/// up to date. Optional summary beliefs (per node id) are appended after the
/// stored child order.
void refresh_values(const SearchDag& dag, ValueStore& values, const BackupConfig& config,
                    const std::vector<NodeId>& changed_boundary,
                    const std::vector<std::optional<GaussianBelief>>* summaries = nullptr);

}  // namespace dagsearch
