#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dagsearch/baselines.hpp"
#include "dagsearch/domains.hpp"
#include "dagsearch/engine.hpp"

namespace dagsearch {

enum class ExperimentKind { Synthetic, TicTacToe, FeatSel };

std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

/// One (method, beta) column of an experiment: the method name plus the
/// hyperparameters it runs with.
struct MethodRun {
    std::string method;  // prob-dag | prob-tree | prob-dag-simplified | uct | ucd | uct-rave
    double beta = 1.0;
    double lambda = 1e-4;
    int pilot_rollouts = 0;
    bool standardize = false;
    RaveConfig rave;
};

bool is_probabilistic_method(const std::string& method);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Synthetic;
    std::vector<std::string> methods;
    /// Exploration-constant sweep; empty means the per-experiment default.
    std::vector<double> betas;
    int repetitions = 1;
    std::uint64_t base_seed = 1;
    int budget = 0;
    /// Best-so-far curve cadence (synthetic / featsel).
    int record_every = 10;
    /// Adversarial evaluation cadence and game count (tictactoe).
    int eval_every = 50;
    int eval_games = 20;
    int workers = 0;  // 0 = hardware concurrency
    std::string out_dir = "out";

    // Domain sizes.
    int synth_features = 15;
    int synth_bag = 5;
    int fs_features = 30;
    int fs_subset = 5;
    double ttt_kernel_scale = 0.5;
};

/// Experiment defaults mirroring the reference protocols: synthetic
/// (lambda 1e-4, beta sweep {0.01, 0.1, 1, sqrt 2, 10}, budget 500, 30
/// repetitions), tictactoe (scale 0.5, lambda 0.1 / 0.001 simplified,
/// beta 1, budget 3000, 10 runs x 20 games), featsel (beta 0.5,
/// lambda 1e-4, pilot 20, budget 1200, 10 repetitions).
ExperimentConfig default_config(ExperimentKind kind);

/// Expands methods x betas into the concrete run columns with per-method
/// hyperparameter defaults filled in.
std::vector<MethodRun> expand_method_runs(const ExperimentConfig& config);

struct RunOutcome {
    MethodRun spec;
    int repetition = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<int, double>> curve;  // (checkpoint, metric)
    double best_reward = 0.0;
    StateKey best_key;
    double seconds = 0.0;
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RunOutcome> runs;  // ordered by (method run, repetition)
    bool all_ok = true;
};

/// Domain for one repetition. Synthetic ground truth is seeded with
/// base_seed + repetition, so all methods of a repetition share one draw.
std::shared_ptr<const Domain> make_domain(const ExperimentConfig& config, int repetition);

/// Executes one run (seed = base_seed + repetition). `domain` may be shared
/// across the methods of a repetition; built on demand when null.
RunOutcome execute_single_run(const ExperimentConfig& config, const MethodRun& spec,
                              int repetition, std::shared_ptr<const Domain> domain = nullptr);

/// Runs the full methods x betas x repetitions matrix (repetitions fan out
/// over a worker pool; aggregation is a deterministic single-threaded
/// reduce) and writes manifest.json, results.csv and aggregates.csv into
/// config.out_dir. Failed runs are recorded in the manifest and leave
/// all_ok false; the remaining runs still complete.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Serialization used by run_experiment; exposed so a single run can be
/// re-executed and compared byte-for-byte against a previous results.csv.
std::string csv_header();
std::string csv_rows(const RunOutcome& outcome);
void write_outputs(const ExperimentResult& result);

/// Reads the config echo back from a manifest.json produced by
/// run_experiment.
ExperimentConfig config_from_manifest(const std::string& manifest_path);

/// Plays `games` evaluation games from the empty board: MAX moves by the
/// frozen searcher's recommendation, MIN replies with the oracle's
/// lowest-index optimal cell. Returns the mean outcome in [-1, 1].
double evaluate_adversarial(const ProbabilisticSearch& search, TttMinimaxOracle& oracle,
                            int games, std::mt19937_64& rng);
double evaluate_adversarial(const BanditSearch& search, TttMinimaxOracle& oracle, int games,
                            std::mt19937_64& rng);

struct PixelReport {
    std::vector<int> features;  // best bag over all successful runs
    double reward = 0.0;
    int runs_matching_best = 0;  // repetitions whose best bag equals `features`
};

/// Best terminal bag observed across a feature-selection experiment.
PixelReport report_pixels(const ExperimentResult& result);

}  // namespace dagsearch
