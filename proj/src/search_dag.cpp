#include "dagsearch/search_dag.hpp"

#include <algorithm>
#include <iomanip>
#include <stdexcept>

namespace dagsearch {

SearchDag::InsertResult SearchDag::get_or_insert(const StateKey& key, int level, NodeKind kind) {
    if (collapse_) {
        auto it = transposition_.find(key);
        if (it != transposition_.end()) {
            const Node& existing = nodes_[static_cast<std::size_t>(it->second)];
            if (existing.level != level || existing.kind != kind) {
                throw std::runtime_error("SearchDag: level/kind mismatch for transposed key");
            }
            return {it->second, false};
        }
    }
    NodeId id = static_cast<NodeId>(nodes_.size());
    Node n;
    n.id = id;
    n.key = key;
    n.kind = kind;
    n.level = level;
    nodes_.push_back(std::move(n));
    if (collapse_) transposition_.emplace(key, id);
    if (static_cast<std::size_t>(level) >= levels_.size()) levels_.resize(level + 1);
    levels_[static_cast<std::size_t>(level)].push_back(id);
    max_level_ = std::max(max_level_, level);
    return {id, true};
}

std::vector<NodeId> SearchDag::expand(
    NodeId id, const std::function<std::vector<StateKey>(const StateKey&)>& successors,
    NodeKind child_kind) {
    Node& parent = node(id);
    if (parent.status != NodeStatus::Boundary) {
        throw std::logic_error("SearchDag::expand: node is not a boundary node");
    }
    std::vector<StateKey> succ = successors(parent.key);
    if (succ.empty()) {
        parent.status = NodeStatus::Terminal;
        return {};
    }
    const int parent_level = parent.level;  // insertion below may reallocate
    std::vector<NodeId> child_ids;
    child_ids.reserve(succ.size());
    for (const StateKey& key : succ) {
        InsertResult r = get_or_insert(key, parent_level + 1, child_kind);
        Node& p = node(id);  // re-fetch: insertion may reallocate
        Node& c = node(r.id);
        if (std::find(p.children.begin(), p.children.end(), r.id) == p.children.end()) {
            p.children.push_back(r.id);
            c.parents.push_back(id);
        }
        child_ids.push_back(r.id);
    }
    node(id).status = NodeStatus::Interior;
    return child_ids;
}

void SearchDag::mark_terminal(NodeId id) {
    Node& n = node(id);
    if (n.status != NodeStatus::Boundary) {
        throw std::logic_error("SearchDag::mark_terminal: node is not a boundary node");
    }
    n.status = NodeStatus::Terminal;
}

std::unordered_set<NodeId> SearchDag::ancestors(NodeId id) const {
    std::unordered_set<NodeId> result;
    std::vector<NodeId> stack(node(id).parents.begin(), node(id).parents.end());
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        if (result.insert(cur).second) {
            const Node& n = node(cur);
            stack.insert(stack.end(), n.parents.begin(), n.parents.end());
        }
    }
    return result;
}

NodeId SearchDag::find(const StateKey& key) const {
    auto it = transposition_.find(key);
    return it == transposition_.end() ? -1 : it->second;
}

void SearchDag::export_text(std::ostream& out) const {
    for (const Node& n : nodes_) {
        out << n.id << ' ';
        for (unsigned char c : n.key) {
            out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(c);
        }
        out << std::dec << std::setfill(' ') << ' ' << n.level << ' '
            << (n.kind == NodeKind::Max ? "MAX" : "MIN") << ' ' << n.visits << ' ';
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) out << ',';
            out << n.children[i];
        }
        out << '\n';
    }
}

}  // namespace dagsearch
