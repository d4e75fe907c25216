#include "dagsearch/values.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace dagsearch {

GaussianBelief backup_ep(const std::vector<GaussianBelief>& children, NodeKind kind,
                         const BackupConfig& config) {
    if (children.empty()) {
        throw std::invalid_argument("backup_ep: no children");
    }
    ExtremumKind ek = (kind == NodeKind::Max) ? ExtremumKind::Max : ExtremumKind::Min;
    return extremum_of_set(children, config.regularizer, ek);
}

GaussianBelief backup_softmax(const std::vector<GaussianBelief>& children, NodeKind kind) {
    if (children.empty()) {
        throw std::invalid_argument("backup_softmax: no children");
    }
    std::vector<GaussianBelief> xs = children;
    if (kind == NodeKind::Min) {
        for (auto& x : xs) x = x.negated();
    }
    double mu_max = xs[0].mean;
    for (const auto& x : xs) mu_max = std::max(mu_max, x.mean);

    double wsum = 0.0;
    std::vector<double> w(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double sd = std::sqrt(std::max(xs[i].variance, 1e-12));
        w[i] = std::exp(-(mu_max - xs[i].mean) / sd);
        wsum += w[i];
    }
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double wi = w[i] / wsum;
        mean += wi * xs[i].mean;
        var += wi * wi * xs[i].variance;
    }
    if (kind == NodeKind::Min) mean = -mean;
    return {mean, var};
}

std::optional<GaussianBelief> summary_child(const GaussianBelief& parent_g, const DeltaTable& table,
                                            const DeltaConfig& delta_config,
                                            int parent_remaining_depth, int unexplored_count) {
    if (unexplored_count <= 0) return std::nullopt;
    GaussianBelief delta = delta_with_first_branching(table, delta_config, parent_remaining_depth,
                                                      unexplored_count);
    return parent_g + delta;
}

void refresh_values(const SearchDag& dag, ValueStore& values, const BackupConfig& config,
                    const std::vector<NodeId>& changed_boundary,
                    const std::vector<std::optional<GaussianBelief>>* summaries) {
    if (changed_boundary.empty()) return;

    // Interior ancestors of the changed nodes, refreshed deepest level first.
    std::unordered_set<NodeId> pending;
    std::vector<NodeId> stack = changed_boundary;
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        for (NodeId p : dag.node(cur).parents) {
            if (pending.insert(p).second) stack.push_back(p);
        }
    }
    if (pending.empty()) return;

    std::vector<NodeId> order(pending.begin(), pending.end());
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        int la = dag.node(a).level, lb = dag.node(b).level;
        return la != lb ? la > lb : a < b;
    });

    std::vector<GaussianBelief> child_beliefs;
    for (NodeId id : order) {
        const Node& n = dag.node(id);
        child_beliefs.clear();
        for (NodeId c : n.children) child_beliefs.push_back(values[c]);
        if (config.summary_enabled && summaries) {
            const auto& s = (*summaries)[static_cast<std::size_t>(id)];
            if (s) child_beliefs.push_back(*s);
        }
        if (child_beliefs.empty()) continue;  // freshly expanded terminal
        values[id] = (config.rule == BackupRule::Ep)
                         ? backup_ep(child_beliefs, n.kind, config)
                         : backup_softmax(child_beliefs, n.kind);
    }
}

}  // namespace dagsearch
