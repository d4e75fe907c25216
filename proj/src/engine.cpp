#include "dagsearch/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dagsearch {

namespace {

DeltaConfig make_delta_config(const Domain& domain, bool regularizer_prior) {
    DeltaConfig cfg;
    cfg.depth = domain.max_depth();
    cfg.step_variance = domain.step_variance();
    cfg.prior = regularizer_prior ? ExtremalPrior::standard_normal() : ExtremalPrior::none();
    cfg.branching.resize(static_cast<std::size_t>(cfg.depth));
    cfg.kinds.resize(static_cast<std::size_t>(cfg.depth));
    // Entry L describes the node whose children live at distance L from the
    // leaves, i.e. the node at level depth - (L + 1).
    for (int L = 0; L < cfg.depth; ++L) {
        int level = cfg.depth - L - 1;
        cfg.branching[static_cast<std::size_t>(L)] = domain.branching_at(level);
        cfg.kinds[static_cast<std::size_t>(L)] = domain.node_kind(level) == NodeKind::Max
                                                     ? ExtremumKind::Max
                                                     : ExtremumKind::Min;
    }
    return cfg;
}

}  // namespace

ProbabilisticSearch::ProbabilisticSearch(std::shared_ptr<const Domain> domain,
                                         const SearchConfig& config)
    : domain_(std::move(domain)),
      config_(config),
      dag_(config.representation == Representation::Dag),
      posterior_(domain_->kernel(), config.lambda),
      delta_config_(make_delta_config(*domain_, config.delta_prior)),
      delta_table_(build_delta_table(delta_config_)),
      search_rng_(rng::derive_seed(config.seed, 1)),
      pilot_rng_(rng::derive_seed(config.seed, 0)) {
    backup_config_.rule = config.rule;
    backup_config_.regularizer =
        config.backup_prior ? ExtremalPrior::standard_normal() : ExtremalPrior::none();
    dag_.get_or_insert(domain_->root_state(), 0, domain_->node_kind(0));
    values_.resize(dag_.size());
    refresh_frontier_and_values();
}

void ProbabilisticSearch::run_pilot() {
    if (pilot_done_) return;
    pilot_done_ = true;
    for (int i = 0; i < config_.pilot_rollouts; ++i) {
        RolloutResult r = rollout(domain_->root_state(), pilot_rng_);
        trace_.pilot_rewards.push_back(r.reward);
        if (r.reward > trace_.best_so_far) {
            trace_.best_so_far = r.reward;
            trace_.best_key = r.terminal_key;
        }
    }
    if (config_.standardize) {
        standardizer_ = standardize_from_pilot(trace_.pilot_rewards);
    }
}

const RunTrace& ProbabilisticSearch::run() {
    run_pilot();
    for (int i = 0; i < config_.budget; ++i) step();
    return trace_;
}

NodeId ProbabilisticSearch::select_child(NodeId parent) const {
    const Node& p = dag_.node(parent);
    if (p.status != NodeStatus::Interior || p.children.empty()) {
        throw std::logic_error("select_child: node has no explored children");
    }
    double log_n = p.visits > 1 ? std::log(static_cast<double>(p.visits)) : 0.0;
    bool maximizing = (p.kind == NodeKind::Max);
    NodeId best = -1;
    double best_score = 0.0;
    for (NodeId c : p.children) {
        const GaussianBelief& v = values_[c];
        double bonus = config_.beta * std::sqrt(log_n * v.variance);
        double score = maximizing ? v.mean + bonus : v.mean - bonus;
        bool better = best < 0 || (maximizing ? score > best_score : score < best_score) ||
                      (score == best_score && c < best);
        if (better) {
            best = c;
            best_score = score;
        }
    }
    return best;
}

RolloutResult ProbabilisticSearch::rollout(const StateKey& from, std::mt19937_64& rng) const {
    StateKey state = from;
    while (!domain_->is_terminal(state)) {
        std::vector<StateKey> succ = domain_->successors(state);
        if (succ.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
        state = std::move(succ[pick(rng)]);
    }
    return {state, domain_->terminal_reward(state)};
}

void ProbabilisticSearch::refresh_frontier_and_values() {
    values_.resize(dag_.size());
    std::vector<NodeId> changed;
    changed.reserve(dag_.size());
    for (NodeId id = 0; id < static_cast<NodeId>(dag_.size()); ++id) {
        const Node& n = dag_.node(id);
        if (n.status == NodeStatus::Interior) continue;
        GaussianBelief g = posterior_.marginal(n.key);
        if (n.status == NodeStatus::Boundary) {
            int remaining = domain_->max_depth() - n.level;
            values_[id] = boundary_value(g, delta_table_.at(remaining));
        } else {
            values_[id] = g;  // terminal: v = g
        }
        changed.push_back(id);
    }
    refresh_values(dag_, values_, backup_config_, changed);
}

const IterationRecord& ProbabilisticSearch::step() {
    run_pilot();

    // (1) Descend to the frontier by UCB over value beliefs.
    std::vector<NodeId> path{dag_.root()};
    while (dag_.node(path.back()).status == NodeStatus::Interior) {
        path.push_back(select_child(path.back()));
    }
    NodeId frontier = path.back();
    for (NodeId id : path) ++dag_.node(id).visits;

    // (2) Expand the boundary node (all children inserted).
    if (dag_.node(frontier).status == NodeStatus::Boundary) {
        const Node& fnode = dag_.node(frontier);
        if (domain_->is_terminal(fnode.key)) {
            dag_.mark_terminal(frontier);
        } else {
            NodeKind child_kind = domain_->node_kind(fnode.level + 1);
            dag_.expand(frontier, [this](const StateKey& s) { return domain_->successors(s); },
                        child_kind);
        }
    }

    // (3) Roll out from the frontier node; (4) observe.
    RolloutResult ro = rollout(dag_.node(frontier).key, search_rng_);
    double std_reward = standardizer_.apply(ro.reward);
    try {
        posterior_.add_observation(ro.terminal_key, std_reward);
    } catch (const FactorizationBreakdown& e) {
        std::ostringstream msg;
        msg << "iteration " << iteration_ << ": " << e.what();
        throw std::runtime_error(msg.str());
    }

    // (5)+(6) Refresh boundary beliefs from the posterior and back up.
    refresh_frontier_and_values();

    ++iteration_;
    if (ro.reward > trace_.best_so_far) {
        trace_.best_so_far = ro.reward;
        trace_.best_key = ro.terminal_key;
    }
    IterationRecord rec;
    rec.iteration = iteration_;
    rec.boundary_key = dag_.node(frontier).key;
    rec.terminal_key = ro.terminal_key;
    rec.raw_reward = ro.reward;
    rec.std_reward = std_reward;
    rec.best_so_far = trace_.best_so_far;
    trace_.iterations.push_back(std::move(rec));
    return trace_.iterations.back();
}

NodeId ProbabilisticSearch::advance_handle(NodeId handle, const StateKey& next_state) const {
    if (handle < 0) return -1;
    for (NodeId c : dag_.node(handle).children) {
        if (dag_.node(c).key == next_state) return c;
    }
    return -1;
}

StateKey ProbabilisticSearch::recommend_state(const StateKey& state, NodeId& handle,
                                              std::mt19937_64& rng) const {
    if (handle < 0 && dag_.collapses_transpositions()) {
        handle = dag_.find(state);
    }
    if (handle >= 0 && dag_.node(handle).status == NodeStatus::Interior) {
        const Node& n = dag_.node(handle);
        bool maximizing = (n.kind == NodeKind::Max);
        NodeId best = -1;
        double best_mean = 0.0;
        for (NodeId c : n.children) {
            double m = values_[c].mean;
            bool better = best < 0 || (maximizing ? m > best_mean : m < best_mean) ||
                          (m == best_mean && c < best);
            if (better) {
                best = c;
                best_mean = m;
            }
        }
        handle = best;
        return dag_.node(best).key;
    }
    // Previously unexplored: uniform-random legal move.
    std::vector<StateKey> succ = domain_->successors(state);
    if (succ.empty()) {
        throw std::logic_error("recommend_state: no legal successors");
    }
    std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
    StateKey next = succ[pick(rng)];
    handle = advance_handle(handle, next);
    return next;
}

StateKey ProbabilisticSearch::recommend_state(const StateKey& state, std::mt19937_64& rng) const {
    NodeId handle = -1;
    return recommend_state(state, handle, rng);
}

}  // namespace dagsearch
