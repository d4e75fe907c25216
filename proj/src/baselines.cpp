#include "dagsearch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dagsearch {

void RaveStats::update(const std::vector<NodeId>& path_nodes, const std::vector<int>& terminal_bag,
                       double reward) {
    for (int p : terminal_bag) {
        Sum& g = global_[p];
        g.total += reward;
        ++g.count;
    }
    for (NodeId id : path_nodes) {
        auto& per_feature = local_[id];
        for (int p : terminal_bag) {
            Sum& l = per_feature[p];
            l.total += reward;
            ++l.count;
        }
    }
}

double RaveStats::global_mean(int feature) const {
    auto it = global_.find(feature);
    return (it == global_.end() || it->second.count == 0)
               ? 0.0
               : it->second.total / static_cast<double>(it->second.count);
}

std::uint64_t RaveStats::global_count(int feature) const {
    auto it = global_.find(feature);
    return it == global_.end() ? 0 : it->second.count;
}

double RaveStats::local_mean(NodeId node, int feature) const {
    auto it = local_.find(node);
    if (it == local_.end()) return 0.0;
    auto jt = it->second.find(feature);
    return (jt == it->second.end() || jt->second.count == 0)
               ? 0.0
               : jt->second.total / static_cast<double>(jt->second.count);
}

std::uint64_t RaveStats::local_count(NodeId node, int feature) const {
    auto it = local_.find(node);
    if (it == local_.end()) return 0;
    auto jt = it->second.find(feature);
    return jt == it->second.end() ? 0 : jt->second.count;
}

NodeId uct_select(const SearchDag& dag, const std::vector<CountStats>& stats, NodeId parent,
                  double beta) {
    const Node& p = dag.node(parent);
    if (p.children.empty()) {
        throw std::logic_error("uct_select: node has no children");
    }
    NodeId fresh = -1;
    for (NodeId c : p.children) {
        if (stats[static_cast<std::size_t>(c)].visits == 0 && (fresh < 0 || c < fresh)) fresh = c;
    }
    if (fresh >= 0) return fresh;  // first-visit rule, lowest id
    bool maximizing = (p.kind == NodeKind::Max);
    double log_n = std::log(std::max<double>(static_cast<double>(p.visits), 1.0));
    NodeId best = -1;
    double best_score = 0.0;
    for (NodeId c : p.children) {
        const CountStats& s = stats[static_cast<std::size_t>(c)];
        double bonus = beta * std::sqrt(log_n / static_cast<double>(s.visits));
        double score = maximizing ? s.mean() + bonus : s.mean() - bonus;
        bool better = best < 0 || (maximizing ? score > best_score : score < best_score) ||
                      (score == best_score && c < best);
        if (better) {
            best = c;
            best_score = score;
        }
    }
    return best;
}

NodeId rave_select(const SearchDag& dag, const std::vector<CountStats>& stats,
                   const RaveStats& rave, NodeId parent, const RaveConfig& config) {
    const Node& p = dag.node(parent);
    if (p.children.empty()) {
        throw std::logic_error("rave_select: node has no children");
    }
    double log_n = std::log(std::max<double>(static_cast<double>(p.visits), 1.0));
    NodeId best = -1;
    double best_score = 0.0;
    for (NodeId c : p.children) {
        const CountStats& s = stats[static_cast<std::size_t>(c)];
        // The move adding this child is the feature in the child's bag but
        // not in the parent's.
        std::vector<int> cb = feature_bag::decode(dag.node(c).key);
        std::vector<int> pb = feature_bag::decode(p.key);
        int feature = 0;
        for (std::size_t i = 0, j = 0; i < cb.size(); ++i) {
            if (j >= pb.size() || cb[i] != pb[j]) {
                feature = cb[i];
                break;
            }
            ++j;
        }
        double n_j = s.visits > 0 ? static_cast<double>(s.visits) : 1.0;
        double mu_j = s.visits > 0 ? s.mean() : 0.0;
        double var_j = s.visits > 0 ? s.variance() : 0.0;
        double alpha = config.c2 / (config.c2 + static_cast<double>(s.visits));
        std::uint64_t n_l = rave.local_count(parent, feature);
        double beta_sched = n_l > 0 ? config.c3 / (config.c3 + static_cast<double>(n_l)) : 1.0;
        double rave_term = (1.0 - beta_sched) * rave.local_mean(parent, feature) +
                           beta_sched * rave.global_mean(feature);
        double explore = std::sqrt(config.c1 * log_n / n_j *
                                   std::min(0.25, var_j + std::sqrt(2.0 * log_n / n_j)));
        double score = (1.0 - alpha) * mu_j + alpha * rave_term + explore;
        bool better = best < 0 || score > best_score || (score == best_score && c < best);
        if (better) {
            best = c;
            best_score = score;
        }
    }
    return best;
}

BanditSearch::BanditSearch(std::shared_ptr<const Domain> domain, const BaselineConfig& config)
    : domain_(std::move(domain)),
      config_(config),
      dag_(config.method == BaselineMethod::Ucd),  // UCT/UCT-RAVE run on the tree
      search_rng_(rng::derive_seed(config.seed, 1)),
      pilot_rng_(rng::derive_seed(config.seed, 0)) {
    dag_.get_or_insert(domain_->root_state(), 0, domain_->node_kind(0));
    stats_.resize(dag_.size());
}

RolloutResult BanditSearch::rollout(const StateKey& from, std::mt19937_64& rng) const {
    StateKey state = from;
    while (!domain_->is_terminal(state)) {
        std::vector<StateKey> succ = domain_->successors(state);
        if (succ.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
        state = std::move(succ[pick(rng)]);
    }
    return {state, domain_->terminal_reward(state)};
}

void BanditSearch::run_pilot() {
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

const RunTrace& BanditSearch::run() {
    run_pilot();
    for (int i = 0; i < config_.budget; ++i) step();
    return trace_;
}

NodeId BanditSearch::select(NodeId parent) const {
    if (config_.method == BaselineMethod::UctRave) {
        return rave_select(dag_, stats_, rave_, parent, config_.rave);
    }
    return uct_select(dag_, stats_, parent, config_.beta);
}

const IterationRecord& BanditSearch::step() {
    run_pilot();

    std::vector<NodeId> path{dag_.root()};
    while (dag_.node(path.back()).status == NodeStatus::Interior) {
        path.push_back(select(path.back()));
    }
    NodeId frontier = path.back();

    if (dag_.node(frontier).status == NodeStatus::Boundary) {
        const Node& fnode = dag_.node(frontier);
        if (domain_->is_terminal(fnode.key)) {
            dag_.mark_terminal(frontier);
        } else {
            NodeKind child_kind = domain_->node_kind(fnode.level + 1);
            dag_.expand(frontier, [this](const StateKey& s) { return domain_->successors(s); },
                        child_kind);
            stats_.resize(dag_.size());
        }
    }

    RolloutResult ro = rollout(dag_.node(frontier).key, search_rng_);
    double std_reward = standardizer_.apply(ro.reward);

    // UCT on a tree and UCD on the DAG share the same rule: update exactly
    // the traversed path with the running-mean statistics.
    for (NodeId id : path) {
        ++dag_.node(id).visits;
        CountStats& s = stats_[static_cast<std::size_t>(id)];
        ++s.visits;
        s.reward_sum += std_reward;
        s.reward_sq_sum += std_reward * std_reward;
    }
    if (config_.method == BaselineMethod::UctRave) {
        rave_.update(path, feature_bag::decode(ro.terminal_key), std_reward);
    }

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

StateKey BanditSearch::recommend_state(const StateKey& state, NodeId& handle,
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
            if (stats_[static_cast<std::size_t>(c)].visits == 0) continue;
            double m = stats_[static_cast<std::size_t>(c)].mean();
            bool better = best < 0 || (maximizing ? m > best_mean : m < best_mean) ||
                          (m == best_mean && c < best);
            if (better) {
                best = c;
                best_mean = m;
            }
        }
        if (best >= 0) {
            handle = best;
            return dag_.node(best).key;
        }
    }
    std::vector<StateKey> succ = domain_->successors(state);
    if (succ.empty()) {
        throw std::logic_error("recommend_state: no legal successors");
    }
    std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
    StateKey next = succ[pick(rng)];
    if (handle >= 0) {
        NodeId moved = -1;
        for (NodeId c : dag_.node(handle).children) {
            if (dag_.node(c).key == next) {
                moved = c;
                break;
            }
        }
        handle = moved;
    }
    return next;
}

}  // namespace dagsearch
