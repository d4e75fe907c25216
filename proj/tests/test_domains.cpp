#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dagsearch/domains.hpp"
#include "dagsearch/feature_bag.hpp"
#include "dagsearch/oracles.hpp"

using namespace dagsearch;

TEST_CASE("synthetic domain") {
    SUBCASE("same ground-truth seed yields identical reward maps") {
        SyntheticDomain a(15, 5, 123), b(15, 5, 123);
        CHECK(a.ground_truth().size() == 3003);
        for (const auto& [key, r] : a.ground_truth()) {
            CHECK(b.ground_truth().at(key) == r);
        }
    }
    SUBCASE("kernel matches the published Gram entrywise") {
        SyntheticDomain d(15, 5, 1);
        auto k = d.kernel();
        StateKey a = feature_bag::encode({1, 2, 3, 4, 5});
        StateKey b = feature_bag::encode({1, 2, 3, 4, 6});
        StateKey c = feature_bag::encode({6, 7, 8, 9, 10});
        CHECK(k->cov(a, a) == doctest::Approx(1.0));  // (5+1)/(5+1)
        CHECK(k->cov(a, b) == doctest::Approx(5.0 / 6.0));
        CHECK(k->cov(a, c) == doctest::Approx(1.0 / 6.0));
        CHECK(k->cov(a, b) == k->cov(b, a));
    }
    SUBCASE("ground-truth correlation of 4-of-5 overlap bags is about 5/6") {
        // Desk-scale variant (N = 6, m = 5) so 2000 ground-truth draws stay
        // cheap; the kernel formula is the same.
        StateKey x = feature_bag::encode({1, 2, 3, 4, 5});
        StateKey y = feature_bag::encode({1, 2, 3, 4, 6});
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        const int n = 2000;
        for (int seed = 0; seed < n; ++seed) {
            SyntheticDomain d(6, 5, static_cast<std::uint64_t>(seed));
            double rx = d.terminal_reward(x), ry = d.terminal_reward(y);
            sx += rx;
            sy += ry;
            sxx += rx * rx;
            syy += ry * ry;
            sxy += rx * ry;
        }
        double mx = sx / n, my = sy / n;
        double corr = (sxy / n - mx * my) /
                      std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
        CHECK(std::abs(corr - 5.0 / 6.0) < 0.05);
    }
    SUBCASE("structure and contracts") {
        SyntheticDomain d(15, 5, 9);
        CHECK(d.successors({}).size() == 15);
        CHECK(d.branching_at(0) == 15);
        CHECK(d.branching_at(4) == 11);
        CHECK(d.max_depth() == 5);
        CHECK_FALSE(d.is_terminal(feature_bag::encode({1, 2})));
        CHECK(d.is_terminal(feature_bag::encode({1, 2, 3, 4, 5})));
        CHECK_THROWS(d.terminal_reward(feature_bag::encode({1, 2})));
        // Successor order follows feature index order.
        auto succ = d.successors(feature_bag::encode({3}));
        CHECK(succ.front() == feature_bag::encode({1, 3}));
        CHECK(succ.back() == feature_bag::encode({3, 15}));
    }
}

TEST_CASE("tic-tac-toe domain") {
    TicTacToeDomain d;
    SUBCASE("winner detection and reward codomain") {
        CHECK(TicTacToeDomain::winner("XXX......") == 1);
        CHECK(TicTacToeDomain::winner("O..O..O..") == -1);
        CHECK(TicTacToeDomain::winner("X...X...X") == 1);
        CHECK(TicTacToeDomain::winner("XOXOXOOXO") == 0);
        std::mt19937_64 rng(5);
        for (int g = 0; g < 200; ++g) {
            StateKey board = d.root_state();
            while (!d.is_terminal(board)) {
                auto succ = d.successors(board);
                board = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)];
            }
            double r = d.terminal_reward(board);
            CHECK((r == -1.0 || r == 0.0 || r == 1.0));
        }
    }
    SUBCASE("alternating kinds and branching profile") {
        CHECK(d.node_kind(0) == NodeKind::Max);
        CHECK(d.node_kind(1) == NodeKind::Min);
        CHECK(d.node_kind(4) == NodeKind::Max);
        CHECK(d.branching_at(0) == 9);
        CHECK(d.branching_at(8) == 1);
    }
    SUBCASE("successors are canonical under board symmetry") {
        // Up to rotation/reflection the first X move is corner, edge or
        // center; a corner opening admits five distinct O replies.
        auto after_x = d.successors(".........");
        CHECK(after_x == std::vector<StateKey>{"........X", ".......X.", "....X...."});
        auto after_o = d.successors("X........");
        CHECK(after_o.size() == 5);
        for (const StateKey& b : after_o) {
            CHECK(std::count(b.begin(), b.end(), 'O') == 1);
            CHECK(b == TicTacToeDomain::canonical(b));
        }
    }
    SUBCASE("canonical is idempotent and symmetry-invariant") {
        CHECK(TicTacToeDomain::canonical("X........") == "........X");
        CHECK(TicTacToeDomain::canonical("....X....") == "....X....");
        std::mt19937_64 rng(11);
        for (int t = 0; t < 50; ++t) {
            StateKey board = d.root_state();
            while (!d.is_terminal(board)) {
                auto succ = d.successors(board);
                board = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)];
                CHECK(TicTacToeDomain::canonical(board) == board);
                CHECK(TttMinimaxOracle().evaluate(board).value ==
                      TttMinimaxOracle().evaluate(TicTacToeDomain::canonical(board)).value);
            }
        }
    }
    SUBCASE("a won board is terminal early with its reward") {
        StateKey won = "XXX.OO...";
        CHECK(d.is_terminal(won));
        CHECK(d.terminal_reward(won) == 1.0);
        CHECK(d.successors(won).empty());
    }
}

TEST_CASE("tic-tac-toe minimax oracle") {
    TttMinimaxOracle oracle;
    SUBCASE("empty board is a draw") { CHECK(oracle.evaluate(StateKey(9, '.')).value == 0); }
    SUBCASE("immediate win is found") {
        // X to move with two in a row: cell 2 wins.
        StateKey board = "XX..OO...";
        auto res = oracle.evaluate(board);
        CHECK(res.value == 1);
        CHECK(std::find(res.best_cells.begin(), res.best_cells.end(), 2) != res.best_cells.end());
    }
    SUBCASE("opponent_move is the lowest-index optimal cell") {
        StateKey board = "XX..OO...";  // unique winning move at 2 for X
        CHECK(oracle.opponent_move(board) == 2);
    }
    SUBCASE("agrees with brute-force negamax on 500 random legal positions") {
        TicTacToeDomain d;
        std::mt19937_64 rng(77);
        int checked = 0;
        while (checked < 500) {
            StateKey board = d.root_state();
            std::uniform_int_distribution<int> depth_pick(0, 8);
            int depth = depth_pick(rng);
            for (int m = 0; m < depth && !d.is_terminal(board); ++m) {
                auto succ = d.successors(board);
                board = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)];
            }
            CHECK(oracle.evaluate(board).value == negamax_ttt(board));
            ++checked;
        }
    }
}

TEST_CASE("pixel informativeness oracle") {
    PixelInformativenessOracle oracle(30);
    SUBCASE("decoy pixels score highest alone but overlap with everything") {
        CHECK(oracle.weight(1) == doctest::Approx(1.0));
        CHECK(oracle.weight(4) == doctest::Approx(0.70));
        CHECK(oracle.weight(9) == doctest::Approx(0.64));
        CHECK(oracle.weight(10) == doctest::Approx(0.634));
        CHECK(oracle.weight(30) == doctest::Approx(0.514));
        CHECK(oracle.redundancy(1, 2) == 0.5);
        CHECK(oracle.redundancy(3, 4) == 0.2);
        CHECK(oracle.redundancy(4, 5) == 0.0);
        CHECK(oracle.redundancy(5, 5) == 0.0);
    }
    SUBCASE("the known optimum avoids the decoy pixels") {
        std::vector<int> best{4, 5, 6, 7, 8};
        CHECK(oracle.evaluate(best) == doctest::Approx(0.90));
        // Greedy by singleton score starts from the decoys and never
        // recovers; even a single decoy in the bag is a net loss.
        CHECK(oracle.evaluate({1, 2, 3, 4, 5}) < oracle.evaluate(best));
        CHECK(oracle.evaluate({1, 4, 5, 6, 7}) < oracle.evaluate(best));
    }
    SUBCASE("exhaustive search confirms the optimum at N = 30, k = 5") {
        auto domain = FeatureSelectionDomain(
            30, 5, std::make_shared<PixelInformativenessOracle>(30));
        BestLeaf best = exhaustive_best_leaf(domain);
        CHECK(feature_bag::decode(best.key) == std::vector<int>{4, 5, 6, 7, 8});
        CHECK(best.reward == doctest::Approx(0.90));
    }
}

TEST_CASE("feature selection domain") {
    SUBCASE("toy oracle: best bag is {4, 5}") {
        class SumOracle : public RewardOracle {
        public:
            double evaluate(const std::vector<int>& bag) const override {
                double s = 0;
                for (int f : bag) s += f;
                return s;
            }
        };
        FeatureSelectionDomain d(5, 2, std::make_shared<SumOracle>());
        BestLeaf best = exhaustive_best_leaf(d);
        CHECK(feature_bag::decode(best.key) == std::vector<int>{4, 5});
        CHECK(best.reward == 9.0);
    }
    SUBCASE("kernel: shared count plus one on the diagonal, scale 1/k") {
        FeatureSelectionDomain d(10, 4, std::make_shared<PixelInformativenessOracle>(10));
        auto k = d.kernel();
        StateKey bag = feature_bag::encode({2, 3, 7});
        StateKey other = feature_bag::encode({3, 7, 9});
        StateKey disjoint = feature_bag::encode({1, 8});
        CHECK(k->cov(bag, bag) == doctest::Approx(4.0));  // |bag| + 1
        CHECK(k->cov(bag, other) == doctest::Approx(2.0));
        CHECK(k->cov(bag, disjoint) == doctest::Approx(0.0));
        CHECK(k->scale() == doctest::Approx(0.25));
        CHECK(k->prior_variance(bag) == doctest::Approx(1.0));
    }
    SUBCASE("large instances never materialize the state space") {
        FeatureSelectionDomain d(784, 10, std::make_shared<PixelInformativenessOracle>(784));
        CHECK(d.successors(d.root_state()).size() == 784);
        CHECK(d.branching_at(3) == 781);
    }
    SUBCASE("subset size above the feature count is rejected") {
        CHECK_THROWS(FeatureSelectionDomain(3, 5, std::make_shared<PixelInformativenessOracle>(3)));
    }
}

TEST_CASE("stream reward oracle speaks the line protocol") {
    std::istringstream replies("0.75\n0.5\n");
    std::ostringstream requests;
    StreamRewardOracle oracle(requests, replies);
    CHECK(oracle.evaluate({3, 1, 8}) == 0.75);
    CHECK(oracle.evaluate({2}) == 0.5);
    CHECK(requests.str() == "3 1 8\n2\n");
    CHECK_FALSE(oracle.concurrent_safe());
    CHECK_THROWS(oracle.evaluate({9}));  // stream exhausted
}
