#pragma once

#include <vector>

#include "dagsearch/extremal.hpp"
#include "dagsearch/gaussian.hpp"

namespace dagsearch {

/// Configuration of the Brownian-step tree abstraction below the boundary.
/// branching[L] and kinds[L] describe the nodes whose children live at
/// distance L from the leaves, i.e. they produce table entry L+1.
struct DeltaConfig {
    int depth = 0;
    std::vector<int> branching;       // length == depth
    std::vector<ExtremumKind> kinds;  // length == depth
    double step_variance = 1.0;       // Brownian step xi ~ N(0, c)
    ExtremalPrior prior;
};

/// Per-level beliefs over the optimal increment; entry 0 is the leaf level
/// (point mass at zero), entry L the increment of a node L levels above the
/// leaves.
class DeltaTable {
public:
    DeltaTable() = default;
    explicit DeltaTable(std::vector<GaussianBelief> entries) : entries_(std::move(entries)) {}

    const GaussianBelief& at(int remaining_depth) const;
    int depth() const { return static_cast<int>(entries_.size()) - 1; }
    const std::vector<GaussianBelief>& entries() const { return entries_; }

private:
    std::vector<GaussianBelief> entries_;
};

/// Precomputes the per-level increment beliefs:
///   table[0]   = (0, 0)
///   table[L+1] = extremum over branching[L] iid copies of
///                (table[L] + N(0, step_variance)), kind kinds[L],
///                with the configured prior at every pairwise fold step.
/// Cost is linear in depth times max branching.
DeltaTable build_delta_table(const DeltaConfig& config);

/// Increment belief for a node with the given number of levels to the
/// leaves ("use copies for the sibling nodes").
GaussianBelief delta_for_boundary_node(const DeltaTable& table, int remaining_depth);

/// The summary-variable increment for a node's unexplored children: the
/// increment at the parent's level, with the first-level branching replaced
/// by the number of unexplored children.
GaussianBelief delta_with_first_branching(const DeltaTable& table, const DeltaConfig& config,
                                          int remaining_depth, int first_branching);

}  // namespace dagsearch
