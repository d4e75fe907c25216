#include "dagsearch/delta_table.hpp"

#include <stdexcept>

namespace dagsearch {

namespace {

GaussianBelief fold_level(const GaussianBelief& child_delta, double step_variance, int branching,
                          ExtremumKind kind, const ExtremalPrior& prior) {
    if (branching < 1) {
        throw std::invalid_argument("delta table: branching factors must be positive");
    }
    GaussianBelief option = child_delta + GaussianBelief{0.0, step_variance};
    GaussianBelief running = option;
    for (int i = 1; i < branching; ++i) {
        if (kind == ExtremumKind::Max) {
            running = max_moments_pair({running, option, 0.0}, prior).belief;
        } else {
            running = min_moments_pair({running, option, 0.0}, prior).belief;
        }
    }
    return running;
}

}  // namespace

const GaussianBelief& DeltaTable::at(int remaining_depth) const {
    if (remaining_depth < 0 || remaining_depth >= static_cast<int>(entries_.size())) {
        throw std::out_of_range("DeltaTable: remaining depth out of range");
    }
    return entries_[static_cast<std::size_t>(remaining_depth)];
}

DeltaTable build_delta_table(const DeltaConfig& config) {
    if (config.depth < 0 || static_cast<int>(config.branching.size()) != config.depth ||
        static_cast<int>(config.kinds.size()) != config.depth) {
        throw std::invalid_argument("delta table: branching/kinds length must equal depth");
    }
    if (!(config.step_variance > 0.0) || !std::isfinite(config.step_variance)) {
        throw std::invalid_argument("delta table: step variance must be positive and finite");
    }
    std::vector<GaussianBelief> entries;
    entries.reserve(static_cast<std::size_t>(config.depth) + 1);
    entries.push_back({0.0, 0.0});
    for (int level = 0; level < config.depth; ++level) {
        entries.push_back(fold_level(entries.back(), config.step_variance,
                                     config.branching[static_cast<std::size_t>(level)],
                                     config.kinds[static_cast<std::size_t>(level)], config.prior));
    }
    return DeltaTable(std::move(entries));
}

GaussianBelief delta_for_boundary_node(const DeltaTable& table, int remaining_depth) {
    return table.at(remaining_depth);
}

GaussianBelief delta_with_first_branching(const DeltaTable& table, const DeltaConfig& config,
                                          int remaining_depth, int first_branching) {
    if (remaining_depth < 1 || remaining_depth > table.depth()) {
        throw std::out_of_range("delta_with_first_branching: remaining depth out of range");
    }
    return fold_level(table.at(remaining_depth - 1), config.step_variance, first_branching,
                      config.kinds[static_cast<std::size_t>(remaining_depth - 1)], config.prior);
}

}  // namespace dagsearch
