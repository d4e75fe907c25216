#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagsearch/extremal.hpp"
#include "dagsearch/gaussian.hpp"

namespace dagsearch {

class Domain;
class Kernel;

/// Report of a Monte-Carlo ground-truth estimate.
struct OracleReport {
    std::string name;
    double mean = 0.0;
    double std_dev = 0.0;
    double mean_std_err = 0.0;
    double std_std_err = 0.0;
    std::uint64_t samples = 0;
    double effective_samples = 0.0;
    bool reliable = true;
};

/// Samples the exact extremum of jointly Gaussian variables, importance-
/// weighting each sample by the prior density on the sampled extremum.
/// `correlations`, if given, is the full correlation matrix. Chunked,
/// seed-deterministic reduction.
OracleReport mc_extremal_moments(const std::vector<GaussianBelief>& beliefs,
                                 const std::vector<std::vector<double>>* correlations,
                                 const ExtremalPrior& prior, ExtremumKind kind,
                                 std::uint64_t samples, std::uint64_t seed);

/// Exact optimum by full terminal enumeration. Refuses domains with more
/// than `max_terminals` terminal states.
struct BestLeaf {
    std::string key;
    double reward = 0.0;
};
BestLeaf exhaustive_best_leaf(const Domain& domain, std::uint64_t max_terminals = 10000000);

/// Reference posterior marginals from a fresh dense factorization of the
/// observed Gram (independent of the incremental path).
std::vector<GaussianBelief> batch_posterior(const Kernel& kernel,
                                            const std::vector<std::pair<std::string, double>>& observations,
                                            double noise,
                                            const std::vector<std::string>& queries);

/// Exhaustive negamax for Tic-Tac-Toe without memoization; value for the
/// side to move, from the MAX (X) player's perspective.
int negamax_ttt(const std::string& board);

}  // namespace dagsearch
