#include "dagsearch/domains.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dagsearch {

namespace {

std::vector<StateKey> bag_successors(const StateKey& state, int feature_count, int limit) {
    if (static_cast<int>(feature_bag::size(state)) >= limit) return {};
    std::vector<int> bag = feature_bag::decode(state);
    std::vector<StateKey> result;
    result.reserve(static_cast<std::size_t>(feature_count) - bag.size());
    std::size_t pos = 0;
    for (int f = 1; f <= feature_count; ++f) {
        if (pos < bag.size() && bag[pos] == f) {
            ++pos;
            continue;
        }
        result.push_back(feature_bag::with_feature(state, f));
    }
    return result;
}

void enumerate_bags(int feature_count, int size, int next, std::vector<int>& current,
                    const std::function<void(const std::vector<int>&)>& visit) {
    if (static_cast<int>(current.size()) == size) {
        visit(current);
        return;
    }
    for (int f = next; f <= feature_count; ++f) {
        current.push_back(f);
        enumerate_bags(feature_count, size, f + 1, current, visit);
        current.pop_back();
    }
}

}  // namespace

SyntheticDomain::SyntheticDomain(int feature_count, int bag_limit, std::uint64_t ground_truth_seed)
    : feature_count_(feature_count),
      bag_limit_(bag_limit),
      kernel_(std::make_shared<SharedFeatureKernel>(bag_limit, 1.0, 0.0)) {
    // One fixed draw from N(0, Sigma) over the size-m leaves via a Cholesky
    // factor of the leaf Gram.
    std::vector<StateKey> leaves;
    std::vector<int> current;
    enumerate_bags(feature_count_, bag_limit_, 1, current,
                   [&](const std::vector<int>& bag) { leaves.push_back(feature_bag::encode(bag)); });

    const Eigen::Index n = static_cast<Eigen::Index>(leaves.size());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = kernel_->cov(leaves[static_cast<std::size_t>(i)],
                                    leaves[static_cast<std::size_t>(j)]);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    double jitter = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (int attempt = 0; attempt < 8; ++attempt) {
        llt.compute(gram + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) break;
        jitter = (jitter == 0.0) ? 1e-10 : jitter * 10.0;
    }
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("SyntheticDomain: leaf Gram not factorizable");
    }
    std::mt19937_64 rng(ground_truth_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = gauss(rng);
    Eigen::VectorXd rewards = llt.matrixL() * z;
    rewards_.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rewards_.emplace(leaves[static_cast<std::size_t>(i)], rewards(i));
    }
}

std::vector<StateKey> SyntheticDomain::successors(const StateKey& state) const {
    return bag_successors(state, feature_count_, bag_limit_);
}

bool SyntheticDomain::is_terminal(const StateKey& state) const {
    return static_cast<int>(feature_bag::size(state)) >= bag_limit_;
}

double SyntheticDomain::terminal_reward(const StateKey& state) const {
    auto it = rewards_.find(state);
    if (it == rewards_.end()) {
        throw std::invalid_argument("SyntheticDomain: reward queried for non-terminal state");
    }
    return it->second;
}

TicTacToeDomain::TicTacToeDomain(double kernel_scale, double kernel_jitter)
    : kernel_(std::make_shared<BoardOverlapKernel>(kernel_scale, kernel_jitter)) {}

int TicTacToeDomain::winner(const StateKey& b) {
    static constexpr int lines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                        {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
    for (const auto& line : lines) {
        char c = b[static_cast<std::size_t>(line[0])];
        if (c != '.' && c == b[static_cast<std::size_t>(line[1])] &&
            c == b[static_cast<std::size_t>(line[2])]) {
            return c == 'X' ? 1 : -1;
        }
    }
    return 0;
}

StateKey TicTacToeDomain::canonical(const StateKey& board) {
    // The four rotations of the 3x3 grid; each is also composed with the
    // left-right mirror below, covering the full dihedral group.
    static constexpr int rot[4][9] = {{0, 1, 2, 3, 4, 5, 6, 7, 8},
                                      {6, 3, 0, 7, 4, 1, 8, 5, 2},
                                      {8, 7, 6, 5, 4, 3, 2, 1, 0},
                                      {2, 5, 8, 1, 4, 7, 0, 3, 6}};
    static constexpr int mir[9] = {2, 1, 0, 5, 4, 3, 8, 7, 6};
    StateKey best = board;
    StateKey t(9, '.');
    for (const auto& p : rot) {
        for (int i = 0; i < 9; ++i) t[static_cast<std::size_t>(i)] = board[static_cast<std::size_t>(p[i])];
        if (t < best) best = t;
        for (int i = 0; i < 9; ++i) t[static_cast<std::size_t>(i)] = board[static_cast<std::size_t>(p[mir[i]])];
        if (t < best) best = t;
    }
    return best;
}

std::vector<StateKey> TicTacToeDomain::successors(const StateKey& state) const {
    if (is_terminal(state)) return {};
    int marks = 0;
    for (char c : state)
        if (c != '.') ++marks;
    char mover = (marks % 2 == 0) ? 'X' : 'O';
    // Children are canonical representatives under board symmetry, so moves
    // that differ only by rotation/reflection collapse to one state.
    std::vector<StateKey> result;
    for (std::size_t cell = 0; cell < 9; ++cell) {
        if (state[cell] == '.') {
            StateKey next = state;
            next[cell] = mover;
            next = canonical(next);
            if (std::find(result.begin(), result.end(), next) == result.end()) {
                result.push_back(std::move(next));
            }
        }
    }
    return result;
}

bool TicTacToeDomain::is_terminal(const StateKey& state) const {
    if (winner(state) != 0) return true;
    return state.find('.') == StateKey::npos;
}

double TicTacToeDomain::terminal_reward(const StateKey& state) const {
    return static_cast<double>(winner(state));
}

const TttMinimaxOracle::Result& TttMinimaxOracle::evaluate(const StateKey& board) {
    auto it = memo_.find(board);
    if (it != memo_.end()) return it->second;

    Result res;
    int won = TicTacToeDomain::winner(board);
    int marks = 0;
    for (char c : board)
        if (c != '.') ++marks;
    if (won != 0 || marks == 9) {
        res.value = won;
    } else {
        char mover = (marks % 2 == 0) ? 'X' : 'O';
        bool maximizing = (mover == 'X');
        int best = maximizing ? -2 : 2;
        std::vector<int> cells;
        for (int cell = 0; cell < 9; ++cell) {
            if (board[static_cast<std::size_t>(cell)] != '.') continue;
            StateKey next = board;
            next[static_cast<std::size_t>(cell)] = mover;
            int v = evaluate(next).value;
            if ((maximizing && v > best) || (!maximizing && v < best)) {
                best = v;
                cells.clear();
            }
            if (v == best) cells.push_back(cell);
        }
        res.value = best;
        res.best_cells = std::move(cells);
    }
    return memo_.emplace(board, std::move(res)).first->second;
}

int TttMinimaxOracle::opponent_move(const StateKey& board) {
    const Result& r = evaluate(board);
    if (r.best_cells.empty()) {
        throw std::logic_error("TttMinimaxOracle: no move available");
    }
    return r.best_cells.front();
}

PixelInformativenessOracle::PixelInformativenessOracle(int feature_count)
    : feature_count_(feature_count) {
    // Features 1-3 are decoys: individually the most informative pixels,
    // but they carry overlapping information with everything else, so no
    // optimal bag contains them. Ranking pixels by singleton score (or
    // growing a bag greedily from the best pixel) therefore fails.
    // Features 4-8 jointly encode the target (synergy bonus only when all
    // five are selected); individually they edge out the tail by so little
    // that per-branch sample means cannot assemble the group — pooled
    // per-pixel statistics or a model of the rewards are required.
    weights_.resize(static_cast<std::size_t>(feature_count));
    for (int f = 1; f <= feature_count; ++f) {
        double w;
        if (f <= 3) {
            w = 1.0 - 0.02 * (f - 1);
        } else if (f <= 8) {
            w = 0.70;
        } else {
            w = 0.64 - 0.006 * (f - 9);
        }
        weights_[static_cast<std::size_t>(f - 1)] = w;
    }
}

double PixelInformativenessOracle::redundancy(int a, int b) const {
    if (a == b) return 0.0;
    if (a <= 3 && b <= 3) return 0.5;
    if (a <= 3 || b <= 3) return 0.2;
    return 0.0;
}

double PixelInformativenessOracle::evaluate(const std::vector<int>& bag) const {
    double total = 0.0;
    int synergy = 0;
    for (std::size_t i = 0; i < bag.size(); ++i) {
        total += weights_[static_cast<std::size_t>(bag[i] - 1)];
        if (bag[i] >= 4 && bag[i] <= 8) ++synergy;
        for (std::size_t j = i + 1; j < bag.size(); ++j) {
            total -= redundancy(bag[i], bag[j]);
        }
    }
    if (synergy == 5) total += 1.0;  // all-or-nothing joint informativeness
    return total / static_cast<double>(bag.size());
}

double StreamRewardOracle::evaluate(const std::vector<int>& bag) const {
    for (std::size_t i = 0; i < bag.size(); ++i) {
        if (i) out_ << ' ';
        out_ << bag[i];
    }
    out_ << '\n';
    out_.flush();
    std::string line;
    if (!std::getline(in_, line)) {
        throw std::runtime_error("StreamRewardOracle: oracle stream closed");
    }
    return std::stod(line);
}

FeatureSelectionDomain::FeatureSelectionDomain(int feature_count, int subset_size,
                                               std::shared_ptr<const RewardOracle> oracle)
    : feature_count_(feature_count),
      subset_size_(subset_size),
      oracle_(std::move(oracle)),
      kernel_(std::make_shared<SharedCountKernel>(1.0 / subset_size, 0.0)) {
    if (subset_size_ > feature_count_) {
        throw std::invalid_argument("FeatureSelectionDomain: subset size exceeds feature count");
    }
}

std::vector<StateKey> FeatureSelectionDomain::successors(const StateKey& state) const {
    return bag_successors(state, feature_count_, subset_size_);
}

bool FeatureSelectionDomain::is_terminal(const StateKey& state) const {
    return static_cast<int>(feature_bag::size(state)) >= subset_size_;
}

double FeatureSelectionDomain::terminal_reward(const StateKey& state) const {
    try {
        return oracle_->evaluate(feature_bag::decode(state));
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "reward oracle failed for bag {";
        auto bag = feature_bag::decode(state);
        for (std::size_t i = 0; i < bag.size(); ++i) {
            if (i) msg << ',';
            msg << bag[i];
        }
        msg << "}: " << e.what();
        throw std::runtime_error(msg.str());
    }
}

}  // namespace dagsearch
