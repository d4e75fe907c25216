#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dagsearch/feature_bag.hpp"
#include "dagsearch/harness.hpp"

using namespace dagsearch;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("dagsearch_harness_" + tag);
    fs::remove_all(p);
    return p;
}

/// Small feature-selection setup that runs in well under a second.
ExperimentConfig tiny_featsel(const std::string& tag) {
    ExperimentConfig cfg = default_config(ExperimentKind::FeatSel);
    cfg.fs_features = 8;
    cfg.fs_subset = 3;
    cfg.budget = 40;
    cfg.record_every = 10;
    cfg.repetitions = 2;
    cfg.methods = {"prob-dag", "uct-rave"};
    cfg.workers = 2;
    cfg.out_dir = temp_dir(tag).string();
    return cfg;
}

}  // namespace

TEST_CASE("default experiment configurations") {
    ExperimentConfig synth = default_config(ExperimentKind::Synthetic);
    CHECK(synth.methods.size() == 5);
    CHECK(synth.betas.size() == 5);
    CHECK(synth.repetitions == 30);
    CHECK(synth.budget == 500);
    CHECK(synth.synth_features == 15);
    CHECK(synth.synth_bag == 5);

    ExperimentConfig ttt = default_config(ExperimentKind::TicTacToe);
    CHECK(ttt.budget == 3000);
    CHECK(ttt.eval_every == 50);
    CHECK(ttt.eval_games == 20);
    CHECK(ttt.betas == std::vector<double>{1.0});

    ExperimentConfig fsel = default_config(ExperimentKind::FeatSel);
    CHECK(fsel.budget == 1200);
    CHECK(fsel.fs_features == 30);
    CHECK(fsel.fs_subset == 5);
    CHECK(fsel.betas == std::vector<double>{0.5});
}

TEST_CASE("expand_method_runs fills per-method hyperparameters") {
    SUBCASE("methods cross betas") {
        ExperimentConfig cfg = default_config(ExperimentKind::Synthetic);
        auto runs = expand_method_runs(cfg);
        CHECK(runs.size() == 25);
        for (const auto& r : runs) CHECK(r.lambda == 1e-4);
    }
    SUBCASE("tictactoe noise split by backup rule") {
        ExperimentConfig cfg = default_config(ExperimentKind::TicTacToe);
        for (const auto& r : expand_method_runs(cfg)) {
            if (r.method == "prob-dag-simplified") {
                CHECK(r.lambda == 0.001);
            } else if (is_probabilistic_method(r.method)) {
                CHECK(r.lambda == 0.1);
            }
            CHECK(r.pilot_rollouts == 0);
        }
    }
    SUBCASE("featsel runs get pilot standardization") {
        ExperimentConfig cfg = default_config(ExperimentKind::FeatSel);
        for (const auto& r : expand_method_runs(cfg)) {
            CHECK(r.pilot_rollouts == 20);
            CHECK(r.standardize);
        }
    }
    SUBCASE("unknown methods are rejected") {
        ExperimentConfig cfg = default_config(ExperimentKind::Synthetic);
        cfg.methods = {"alphabeta"};
        CHECK_THROWS(expand_method_runs(cfg));
    }
}

TEST_CASE("zero budget produces a header-only results.csv and succeeds") {
    ExperimentConfig cfg = default_config(ExperimentKind::Synthetic);
    cfg.synth_features = 6;
    cfg.synth_bag = 3;
    cfg.methods = {"prob-dag", "uct"};
    cfg.betas = {1.0};
    cfg.repetitions = 1;
    cfg.budget = 0;
    cfg.workers = 1;
    cfg.out_dir = temp_dir("zero").string();
    ExperimentResult result = run_experiment(cfg);
    CHECK(result.all_ok);
    CHECK(result.runs.size() == 2);
    CHECK(slurp(fs::path(cfg.out_dir) / "results.csv") == csv_header());
    CHECK(fs::exists(fs::path(cfg.out_dir) / "manifest.json"));
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("the same configuration reproduces byte-identical outputs") {
    ExperimentConfig a = tiny_featsel("rep_a");
    ExperimentConfig b = tiny_featsel("rep_b");
    run_experiment(a);
    run_experiment(b);
    CHECK(slurp(fs::path(a.out_dir) / "results.csv") ==
          slurp(fs::path(b.out_dir) / "results.csv"));
    CHECK(slurp(fs::path(a.out_dir) / "aggregates.csv") ==
          slurp(fs::path(b.out_dir) / "aggregates.csv"));
    fs::remove_all(a.out_dir);
    fs::remove_all(b.out_dir);
}

TEST_CASE("aggregates.csv recomputes from the raw curves") {
    ExperimentConfig cfg = tiny_featsel("agg");
    ExperimentResult result = run_experiment(cfg);
    REQUIRE(result.all_ok);

    std::istringstream agg(slurp(fs::path(cfg.out_dir) / "aggregates.csv"));
    std::string line;
    std::getline(agg, line);
    CHECK(line == "checkpoint,method,beta,mean,std");
    int rows = 0;
    while (std::getline(agg, line)) {
        std::istringstream cells(line);
        std::string cp_s, method, beta_s, mean_s, std_s;
        std::getline(cells, cp_s, ',');
        std::getline(cells, method, ',');
        std::getline(cells, beta_s, ',');
        std::getline(cells, mean_s, ',');
        std::getline(cells, std_s, ',');
        int cp = std::stoi(cp_s);
        double beta = std::stod(beta_s);

        std::vector<double> vals;
        for (const RunOutcome& r : result.runs) {
            if (r.spec.method != method || r.spec.beta != beta) continue;
            for (const auto& [c, v] : r.curve) {
                if (c == cp) vals.push_back(v);
            }
        }
        REQUIRE(vals.size() == 2);  // one value per repetition
        double mean = (vals[0] + vals[1]) / 2.0;
        double sd = std::sqrt((vals[0] - mean) * (vals[0] - mean) +
                              (vals[1] - mean) * (vals[1] - mean));  // n - 1 = 1
        CHECK(std::abs(std::stod(mean_s) - mean) <= 1e-10);
        CHECK(std::abs(std::stod(std_s) - sd) <= 1e-10);
        ++rows;
    }
    CHECK(rows == 2 * 4);  // two columns x four checkpoints
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("config_from_manifest round-trips the configuration echo") {
    ExperimentConfig cfg = tiny_featsel("manifest");
    cfg.base_seed = 42;
    run_experiment(cfg);
    ExperimentConfig back =
        config_from_manifest((fs::path(cfg.out_dir) / "manifest.json").string());
    CHECK(back.experiment == cfg.experiment);
    CHECK(back.methods == cfg.methods);
    CHECK(back.betas == cfg.betas);
    CHECK(back.repetitions == cfg.repetitions);
    CHECK(back.base_seed == cfg.base_seed);
    CHECK(back.budget == cfg.budget);
    CHECK(back.record_every == cfg.record_every);
    CHECK(back.fs_features == cfg.fs_features);
    CHECK(back.fs_subset == cfg.fs_subset);
    CHECK(back.out_dir == cfg.out_dir);
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("execute_single_run is deterministic in (config, spec, repetition)") {
    ExperimentConfig cfg = tiny_featsel("single");
    MethodRun spec = expand_method_runs(cfg)[0];
    RunOutcome a = execute_single_run(cfg, spec, 1);
    RunOutcome b = execute_single_run(cfg, spec, 1);
    REQUIRE(a.ok());
    CHECK(a.seed == cfg.base_seed + 1);
    CHECK(a.curve == b.curve);
    CHECK(a.best_reward == b.best_reward);
    CHECK(a.best_key == b.best_key);
    CHECK(csv_rows(a) == csv_rows(b));
}

TEST_CASE("an unexplored searcher loses to the optimal opponent on average") {
    auto domain = std::make_shared<TicTacToeDomain>();
    SearchConfig sc;
    sc.budget = 0;
    sc.lambda = 0.1;
    sc.seed = 3;
    ProbabilisticSearch search(domain, sc);
    search.run();  // budget 0: X recommendations stay uniform random
    TttMinimaxOracle oracle;
    std::mt19937_64 rng(17);
    double value = evaluate_adversarial(search, oracle, 1000, rng);
    CHECK(value >= -1.0);
    CHECK(value < 0.0);
}

TEST_CASE("report_pixels") {
    SUBCASE("picks the best run and counts agreement") {
        ExperimentResult result;
        result.config = default_config(ExperimentKind::FeatSel);
        RunOutcome r1;
        r1.best_key = feature_bag::encode({1, 4, 7});
        r1.best_reward = 0.8;
        RunOutcome r2 = r1;
        r2.repetition = 1;
        RunOutcome r3;
        r3.best_key = feature_bag::encode({2, 3, 5});
        r3.best_reward = 0.6;
        RunOutcome bad;
        bad.error = "boom";
        bad.best_key = feature_bag::encode({1, 4, 7});
        bad.best_reward = 9.9;  // ignored: failed runs do not participate
        result.runs = {r3, r1, r2, bad};
        PixelReport report = report_pixels(result);
        CHECK(report.features == std::vector<int>{1, 4, 7});
        CHECK(report.reward == 0.8);
        CHECK(report.runs_matching_best == 2);
    }
    SUBCASE("a zero-budget run still reports its best pilot bag") {
        ExperimentConfig cfg = tiny_featsel("pilot");
        cfg.budget = 0;
        MethodRun spec = expand_method_runs(cfg)[0];
        REQUIRE(spec.pilot_rollouts == 20);
        RunOutcome out = execute_single_run(cfg, spec, 0);
        REQUIRE(out.ok());
        CHECK_FALSE(out.best_key.empty());
        CHECK(static_cast<int>(feature_bag::decode(out.best_key).size()) == cfg.fs_subset);
    }
}
