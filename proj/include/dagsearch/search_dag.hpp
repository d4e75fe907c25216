#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dagsearch {

/// Canonical byte encoding of a domain state. Two semantically identical
/// states (same board, same feature bag in any order) encode to one key.
using StateKey = std::string;
using NodeId = std::int32_t;

enum class NodeKind : std::uint8_t { Max, Min };
enum class NodeStatus : std::uint8_t { Boundary, Interior, Terminal };

struct Node {
    NodeId id = -1;
    StateKey key;
    NodeKind kind = NodeKind::Max;
    int level = 0;
    NodeStatus status = NodeStatus::Boundary;
    std::uint64_t visits = 0;
    std::vector<NodeId> children;  // deterministic domain successor order
    std::vector<NodeId> parents;
};

/// Transposition-collapsed, leveled node store. With collapsing disabled
/// every insertion creates a fresh node (the tree representation); nothing
/// else changes.
class SearchDag {
public:
    explicit SearchDag(bool collapse_transpositions = true)
        : collapse_(collapse_transpositions) {}

    struct InsertResult {
        NodeId id;
        bool was_new;
    };

    /// Returns the existing node on key collision without modifying it;
    /// otherwise inserts a boundary node. Throws on level/kind mismatch with
    /// an existing node for the same key.
    InsertResult get_or_insert(const StateKey& key, int level, NodeKind kind);

    /// Inserts all domain successors, links edges exactly once, and flips the
    /// node to Interior (Terminal if there are no successors). The node must
    /// be a Boundary node.
    std::vector<NodeId> expand(NodeId id,
                               const std::function<std::vector<StateKey>(const StateKey&)>& successors,
                               NodeKind child_kind);

    /// Marks a boundary node terminal (domain state with no continuations).
    void mark_terminal(NodeId id);

    /// Transitive closure over parent links, excluding the node itself.
    std::unordered_set<NodeId> ancestors(NodeId id) const;

    NodeId root() const { return nodes_.empty() ? -1 : 0; }
    std::size_t size() const { return nodes_.size(); }
    bool collapses_transpositions() const { return collapse_; }

    Node& node(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)); }
    const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }

    /// Lookup by state key; -1 if absent. Only meaningful with transposition
    /// collapsing enabled.
    NodeId find(const StateKey& key) const;

    int max_level() const { return max_level_; }

    /// Node ids grouped by level, for reverse-level value sweeps.
    const std::vector<std::vector<NodeId>>& levels() const { return levels_; }

    /// Line-oriented debug export: id, key hex, level, kind, visits, child ids.
    void export_text(std::ostream& out) const;

private:
    bool collapse_;
    std::vector<Node> nodes_;
    std::unordered_map<StateKey, NodeId> transposition_;
    std::vector<std::vector<NodeId>> levels_;
    int max_level_ = 0;
};

}  // namespace dagsearch
