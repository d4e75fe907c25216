#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "dagsearch/delta_table.hpp"
#include "dagsearch/harness.hpp"
#include "dagsearch/oracles.hpp"

using namespace dagsearch;

namespace {

/// Applies a JSON config file (either a bare config object or a manifest
/// with a "config" member) on top of the experiment defaults. Every field
/// is optional.
void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("config")) j = j["config"];
    if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("betas")) cfg.betas = j["betas"].get<std::vector<double>>();
    if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<int>();
    if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("budget")) cfg.budget = j["budget"].get<int>();
    if (j.contains("record_every")) cfg.record_every = j["record_every"].get<int>();
    if (j.contains("eval_every")) cfg.eval_every = j["eval_every"].get<int>();
    if (j.contains("eval_games")) cfg.eval_games = j["eval_games"].get<int>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("synth_features")) cfg.synth_features = j["synth_features"].get<int>();
    if (j.contains("synth_bag")) cfg.synth_bag = j["synth_bag"].get<int>();
    if (j.contains("fs_features")) cfg.fs_features = j["fs_features"].get<int>();
    if (j.contains("fs_subset")) cfg.fs_subset = j["fs_subset"].get<int>();
    if (j.contains("ttt_kernel_scale")) cfg.ttt_kernel_scale = j["ttt_kernel_scale"].get<double>();
}

struct Overrides {
    std::string config_file, out_dir, methods;
    std::vector<double> betas;
    std::int64_t seed = -1;
    int reps = -1, budget = -1, workers = -1, record_every = -1, eval_every = -1, eval_games = -1;
};

void add_common(CLI::App* sub, Overrides& ov) {
    sub->add_option("--config", ov.config_file, "JSON config file (see README for the schema)");
    sub->add_option("--out", ov.out_dir, "output directory");
    sub->add_option("--seed", ov.seed, "base seed (repetition r uses base seed + r)");
    sub->add_option("--reps", ov.reps, "number of repetitions");
    sub->add_option("--budget", ov.budget, "search iterations per run");
    sub->add_option("--methods", ov.methods, "comma-separated method subset");
    sub->add_option("--betas", ov.betas, "exploration constants to sweep");
    sub->add_option("--workers", ov.workers, "worker threads (0 = hardware)");
    sub->add_option("--record-every", ov.record_every, "best-so-far checkpoint cadence");
    sub->add_option("--eval-every", ov.eval_every, "adversarial evaluation cadence");
    sub->add_option("--eval-games", ov.eval_games, "games per adversarial evaluation");
}

int run(ExperimentKind kind, const Overrides& ov) {
    ExperimentConfig cfg = default_config(kind);
    if (!ov.config_file.empty()) apply_config_file(cfg, ov.config_file);
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (ov.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.reps >= 0) cfg.repetitions = ov.reps;
    if (ov.budget >= 0) cfg.budget = ov.budget;
    if (ov.workers >= 0) cfg.workers = ov.workers;
    if (ov.record_every > 0) cfg.record_every = ov.record_every;
    if (ov.eval_every > 0) cfg.eval_every = ov.eval_every;
    if (ov.eval_games > 0) cfg.eval_games = ov.eval_games;
    if (!ov.betas.empty()) cfg.betas = ov.betas;
    if (!ov.methods.empty()) {
        cfg.methods.clear();
        std::string rest = ov.methods;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            cfg.methods.push_back(rest.substr(0, comma));
            rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        }
    }

    ExperimentResult result = run_experiment(cfg);
    int failed = 0;
    for (const RunOutcome& r : result.runs) {
        if (!r.ok()) {
            ++failed;
            std::cerr << "FAILED " << r.spec.method << " beta=" << r.spec.beta << " rep "
                      << r.repetition << ": " << r.error << '\n';
        }
    }
    std::cout << experiment_name(kind) << ": " << result.runs.size() - failed << '/'
              << result.runs.size() << " runs ok, outputs in " << cfg.out_dir << '\n';
    if (cfg.experiment == ExperimentKind::FeatSel && result.all_ok) {
        PixelReport pr = report_pixels(result);
        std::cout << "selected features:";
        for (int f : pr.features) std::cout << ' ' << f;
        std::cout << "  (reward " << pr.reward << ")\n";
    }
    return result.all_ok ? 0 : 1;
}

bool check(const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    return ok;
}

/// Monte-Carlo validation of the extremal moment matching and the increment
/// table construction.
int validate_math(std::uint64_t seed) {
    bool all = true;

    auto iid = max_moments_pair({{0.0, 1.0}, {0.0, 1.0}, 0.0}, ExtremalPrior::none());
    all &= check("pairwise max, iid standard normals vs closed form",
                 std::abs(iid.belief.mean - 1.0 / std::sqrt(M_PI)) < 1e-9 &&
                     std::abs(iid.belief.variance - (1.0 - 1.0 / M_PI)) < 1e-9);

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> mu(-3.0, 3.0), var(0.1, 4.0), rho(-0.9, 0.9);
    bool pair_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        GaussianBelief a{mu(gen), var(gen)}, b{mu(gen), var(gen)};
        double r = rho(gen);
        auto prior = trial % 2 == 0 ? ExtremalPrior::gaussian(mu(gen), 1.0 + var(gen))
                                    : ExtremalPrior::none();
        auto approx = max_moments_pair({a, b, r}, prior);
        std::vector<std::vector<double>> corr{{1.0, r}, {r, 1.0}};
        auto mc = mc_extremal_moments({a, b}, &corr, prior, ExtremumKind::Max, 400000,
                                      seed + 100 + static_cast<std::uint64_t>(trial));
        if (!mc.reliable) continue;
        pair_ok &= std::abs(approx.belief.mean - mc.mean) <=
                   0.02 * (approx.belief.std_dev() + 0.1) + 3.0 * mc.mean_std_err;
        pair_ok &= std::abs(approx.belief.std_dev() - mc.std_dev) <=
                   0.05 * (approx.belief.std_dev() + 0.1) + 3.0 * mc.std_std_err;
    }
    all &= check("pairwise max, 50 random configurations vs Monte-Carlo", pair_ok);

    // Depth-2 uniform MAX table vs direct Monte-Carlo of the recursion.
    DeltaConfig dc;
    dc.depth = 2;
    dc.branching = {3, 2};
    dc.kinds = {ExtremumKind::Max, ExtremumKind::Max};
    dc.step_variance = 0.5;
    DeltaTable table = build_delta_table(dc);
    std::mt19937_64 sim(seed ^ 0xabcdef);
    std::normal_distribution<double> step(0.0, std::sqrt(0.5));
    double m1 = 0.0, m2 = 0.0;
    const int n = 2000000;
    for (int s = 0; s < n; ++s) {
        double level1[2];
        for (double& node : level1) {
            double best = -1e300;
            for (int c = 0; c < 3; ++c) best = std::max(best, step(sim));
            node = best;
        }
        double top = std::max(level1[0] + step(sim), level1[1] + step(sim));
        m1 += top;
        m2 += top * top;
    }
    m1 /= n;
    m2 = m2 / n - m1 * m1;
    const GaussianBelief& d2 = table.at(2);
    all &= check("increment table, depth-2 MAX recursion vs Monte-Carlo",
                 std::abs(d2.mean - m1) < 0.05 && std::abs(d2.std_dev() - std::sqrt(m2)) < 0.05);

    all &= check("increment table, leaf entry is a point mass",
                 table.at(0).mean == 0.0 && table.at(0).variance == 0.0);

    std::printf("%s\n", all ? "ALL CHECKS PASSED" : "CHECKS FAILED");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic DAG search benchmark harness"};
    app.require_subcommand(1);

    Overrides ov_syn, ov_ttt, ov_fs;
    auto* syn = app.add_subcommand("synthetic", "synthetic feature-bag DAG experiment");
    auto* ttt = app.add_subcommand("tictactoe", "adversarial Tic-Tac-Toe experiment");
    auto* fs = app.add_subcommand("featsel", "feature-selection experiment");
    add_common(syn, ov_syn);
    add_common(ttt, ov_ttt);
    add_common(fs, ov_fs);

    std::uint64_t vm_seed = 20240601;
    auto* vm = app.add_subcommand("validate-math",
                                  "Monte-Carlo validation of the extremal and increment math");
    vm->add_option("--seed", vm_seed, "oracle seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (syn->parsed()) return run(ExperimentKind::Synthetic, ov_syn);
        if (ttt->parsed()) return run(ExperimentKind::TicTacToe, ov_ttt);
        if (fs->parsed()) return run(ExperimentKind::FeatSel, ov_fs);
        if (vm->parsed()) return validate_math(vm_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
