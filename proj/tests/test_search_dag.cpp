#include <doctest.h>

#include <deque>
#include <sstream>

#include "dagsearch/domains.hpp"
#include "dagsearch/feature_bag.hpp"
#include "dagsearch/search_dag.hpp"

using namespace dagsearch;

namespace {

/// Expands every reachable node breadth-first; returns terminal count.
int expand_all(SearchDag& dag, const Domain& domain) {
    int terminals = 0;
    std::deque<NodeId> queue{dag.root()};
    while (!queue.empty()) {
        NodeId id = queue.front();
        queue.pop_front();
        if (dag.node(id).status != NodeStatus::Boundary) continue;
        if (domain.is_terminal(dag.node(id).key)) {
            dag.mark_terminal(id);
            ++terminals;
            continue;
        }
        NodeKind kind = domain.node_kind(dag.node(id).level + 1);
        for (NodeId c : dag.expand(
                 id, [&](const StateKey& s) { return domain.successors(s); }, kind)) {
            queue.push_back(c);
        }
    }
    return terminals;
}

}  // namespace

TEST_CASE("inserting the same state twice yields one node") {
    SearchDag dag;
    auto first = dag.get_or_insert("state", 0, NodeKind::Max);
    auto second = dag.get_or_insert("state", 0, NodeKind::Max);
    CHECK(first.was_new);
    CHECK_FALSE(second.was_new);
    CHECK(first.id == second.id);
    CHECK(dag.size() == 1);
}

TEST_CASE("tic-tac-toe transposition: one position reached by two move orders") {
    // {X1, O5, X9} via X1->O5->X9 and X9->O5->X1 (1-indexed cells 0, 4, 8).
    TicTacToeDomain domain;
    SearchDag dag;
    StateKey target = "X...O...X";
    auto a = dag.get_or_insert(target, 3, NodeKind::Min);
    auto b = dag.get_or_insert(target, 3, NodeKind::Min);
    CHECK(a.id == b.id);
    CHECK_FALSE(b.was_new);
}

TEST_CASE("feature bags canonicalize regardless of insertion order") {
    StateKey xy = feature_bag::with_feature(feature_bag::with_feature({}, 3), 7);
    StateKey yx = feature_bag::with_feature(feature_bag::with_feature({}, 7), 3);
    CHECK(xy == yx);
    SearchDag dag;
    CHECK(dag.get_or_insert(xy, 2, NodeKind::Max).id == dag.get_or_insert(yx, 2, NodeKind::Max).id);
}

TEST_CASE("level or kind mismatch on an existing key is a consistency error") {
    SearchDag dag;
    dag.get_or_insert("s", 1, NodeKind::Max);
    CHECK_THROWS(dag.get_or_insert("s", 2, NodeKind::Max));
    CHECK_THROWS(dag.get_or_insert("s", 1, NodeKind::Min));
}

TEST_CASE("expand") {
    SUBCASE("empty tic-tac-toe board has 3 children up to symmetry") {
        TicTacToeDomain domain;
        SearchDag dag;
        NodeId root = dag.get_or_insert(domain.root_state(), 0, NodeKind::Max).id;
        auto children = dag.expand(
            root, [&](const StateKey& s) { return domain.successors(s); }, NodeKind::Min);
        CHECK(children.size() == 3);
        CHECK(dag.node(root).status == NodeStatus::Interior);
        for (NodeId c : children) {
            CHECK(dag.node(c).level == 1);
            CHECK(dag.node(c).kind == NodeKind::Min);
        }
    }
    SUBCASE("synthetic root has 15 children; size-m bags become terminal") {
        SyntheticDomain domain(15, 5, 7);
        SearchDag dag;
        NodeId root = dag.get_or_insert(domain.root_state(), 0, NodeKind::Max).id;
        auto children = dag.expand(
            root, [&](const StateKey& s) { return domain.successors(s); }, NodeKind::Max);
        CHECK(children.size() == 15);

        StateKey full = feature_bag::encode({1, 2, 3, 4, 5});
        NodeId leaf = dag.get_or_insert(full, 5, NodeKind::Max).id;
        auto none = dag.expand(
            leaf, [&](const StateKey& s) { return domain.successors(s); }, NodeKind::Max);
        CHECK(none.empty());
        CHECK(dag.node(leaf).status == NodeStatus::Terminal);
    }
    SUBCASE("expanding a non-boundary node is a contract violation") {
        SearchDag dag;
        NodeId root = dag.get_or_insert("r", 0, NodeKind::Max).id;
        auto succ = [](const StateKey&) { return std::vector<StateKey>{"a", "b"}; };
        dag.expand(root, succ, NodeKind::Max);
        CHECK_THROWS(dag.expand(root, succ, NodeKind::Max));
    }
}

TEST_CASE("ancestors") {
    SUBCASE("root has none; a two-order depth-2 node has three") {
        SearchDag dag;
        NodeId root = dag.get_or_insert({}, 0, NodeKind::Max).id;
        StateKey x = feature_bag::encode({1}), y = feature_bag::encode({2});
        StateKey xy = feature_bag::encode({1, 2});
        dag.expand(root, [&](const StateKey&) { return std::vector<StateKey>{x, y}; },
                   NodeKind::Max);
        NodeId nx = dag.find(x), ny = dag.find(y);
        auto to_xy = [&](const StateKey&) { return std::vector<StateKey>{xy}; };
        dag.expand(nx, to_xy, NodeKind::Max);
        dag.expand(ny, to_xy, NodeKind::Max);
        CHECK(dag.ancestors(root).empty());
        auto anc = dag.ancestors(dag.find(xy));
        CHECK(anc.size() == 3);
        CHECK(anc.count(root) == 1);
        CHECK(anc.count(nx) == 1);
        CHECK(anc.count(ny) == 1);
    }
    SUBCASE("chain of depth d has d ancestors") {
        SearchDag dag;
        NodeId prev = dag.get_or_insert("0", 0, NodeKind::Max).id;
        const int d = 6;
        for (int i = 1; i <= d; ++i) {
            std::string key = std::to_string(i);
            dag.expand(prev, [&](const StateKey&) { return std::vector<StateKey>{key}; },
                       NodeKind::Max);
            prev = dag.find(key);
        }
        CHECK(dag.ancestors(prev).size() == d);
    }
}

TEST_CASE("full synthetic expansion: 4944 nodes, 3003 terminals") {
    SyntheticDomain domain(15, 5, 1);
    SearchDag dag;
    dag.get_or_insert(domain.root_state(), 0, NodeKind::Max);
    int terminals = expand_all(dag, domain);
    CHECK(dag.size() == 4944);
    CHECK(terminals == 3003);
    // Leveled-edge invariant.
    for (NodeId id = 0; id < static_cast<NodeId>(dag.size()); ++id) {
        for (NodeId c : dag.node(id).children) {
            CHECK(dag.node(c).level == dag.node(id).level + 1);
        }
    }
}

TEST_CASE("tree representation never collapses transpositions") {
    SearchDag tree(false);
    NodeId root = tree.get_or_insert({}, 0, NodeKind::Max).id;
    StateKey x = feature_bag::encode({1}), y = feature_bag::encode({2});
    StateKey xy = feature_bag::encode({1, 2});
    tree.expand(root, [&](const StateKey&) { return std::vector<StateKey>{x, y}; },
                NodeKind::Max);
    auto to_xy = [&](const StateKey&) { return std::vector<StateKey>{xy}; };
    NodeId nx = tree.node(root).children[0], ny = tree.node(root).children[1];
    auto c1 = tree.expand(nx, to_xy, NodeKind::Max);
    auto c2 = tree.expand(ny, to_xy, NodeKind::Max);
    CHECK(c1[0] != c2[0]);  // fresh node per insertion
    CHECK(tree.size() == 5);
}

TEST_CASE("debug export emits one line per node") {
    SearchDag dag;
    NodeId root = dag.get_or_insert("r", 0, NodeKind::Max).id;
    dag.expand(root, [](const StateKey&) { return std::vector<StateKey>{"a", "b"}; },
               NodeKind::Min);
    std::ostringstream out;
    dag.export_text(out);
    int lines = 0;
    for (char c : out.str()) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 3);
}
