#include "dagsearch/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "dagsearch/feature_bag.hpp"

namespace dagsearch {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Human-readable state key for manifests: feature list for bag domains,
/// the raw board string for Tic-Tac-Toe.
std::string key_display(ExperimentKind kind, const StateKey& key) {
    if (kind == ExperimentKind::TicTacToe) return key;
    std::string out;
    for (int f : feature_bag::decode(key)) {
        if (!out.empty()) out.push_back(' ');
        out += std::to_string(f);
    }
    return out;
}

template <class Search>
double evaluate_adversarial_impl(const Search& search, TttMinimaxOracle& oracle, int games,
                                 std::mt19937_64& rng) {
    double total = 0.0;
    for (int g = 0; g < games; ++g) {
        StateKey board(9, '.');
        NodeId handle = search.dag().root();
        while (true) {
            board = search.recommend_state(board, handle, rng);  // MAX (X) move
            int w = TicTacToeDomain::winner(board);
            if (w != 0 || board.find('.') == StateKey::npos) {
                total += w;
                break;
            }
            int cell = oracle.opponent_move(board);  // optimal MIN (O) reply
            StateKey next = board;
            next[static_cast<std::size_t>(cell)] = 'O';
            next = TicTacToeDomain::canonical(next);  // search states are canonical
            if (handle >= 0) {
                NodeId moved = -1;
                for (NodeId c : search.dag().node(handle).children) {
                    if (search.dag().node(c).key == next) {
                        moved = c;
                        break;
                    }
                }
                handle = moved;
            } else if (search.dag().collapses_transpositions()) {
                handle = search.dag().find(next);
            }
            board = next;
            w = TicTacToeDomain::winner(board);
            if (w != 0 || board.find('.') == StateKey::npos) {
                total += w;
                break;
            }
        }
    }
    return total / static_cast<double>(games);
}

template <class Search>
std::vector<std::pair<int, double>> run_curve(Search& search, const ExperimentConfig& cfg,
                                              std::uint64_t run_seed) {
    std::vector<std::pair<int, double>> curve;
    search.run_pilot();
    if (cfg.experiment == ExperimentKind::TicTacToe) {
        TttMinimaxOracle oracle;
        std::mt19937_64 eval_rng(rng::derive_seed(run_seed, 2));
        int done = 0;
        while (done < cfg.budget) {
            int chunk = std::min(cfg.eval_every, cfg.budget - done);
            for (int i = 0; i < chunk; ++i) search.step();
            done += chunk;
            curve.emplace_back(done,
                               evaluate_adversarial(search, oracle, cfg.eval_games, eval_rng));
        }
    } else {
        for (int i = 1; i <= cfg.budget; ++i) {
            search.step();
            if (i % cfg.record_every == 0 || i == cfg.budget) {
                curve.emplace_back(i, search.trace().best_so_far);
            }
        }
    }
    return curve;
}

double default_lambda(ExperimentKind kind, const std::string& method) {
    if (kind == ExperimentKind::TicTacToe) {
        return method == "prob-dag-simplified" ? 0.001 : 0.1;
    }
    return 1e-4;
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Synthetic: return "synthetic";
        case ExperimentKind::TicTacToe: return "tictactoe";
        case ExperimentKind::FeatSel: return "featsel";
    }
    throw std::logic_error("experiment_name: bad kind");
}

ExperimentKind experiment_from_name(const std::string& name) {
    if (name == "synthetic") return ExperimentKind::Synthetic;
    if (name == "tictactoe") return ExperimentKind::TicTacToe;
    if (name == "featsel") return ExperimentKind::FeatSel;
    throw std::invalid_argument("unknown experiment: " + name);
}

bool is_probabilistic_method(const std::string& method) {
    return method == "prob-dag" || method == "prob-tree" || method == "prob-dag-simplified";
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.experiment = kind;
    switch (kind) {
        case ExperimentKind::Synthetic:
            cfg.methods = {"prob-dag", "prob-tree", "prob-dag-simplified", "uct", "ucd"};
            cfg.betas = {0.01, 0.1, 1.0, std::sqrt(2.0), 10.0};
            cfg.repetitions = 30;
            cfg.budget = 500;
            cfg.record_every = 10;
            break;
        case ExperimentKind::TicTacToe:
            cfg.methods = {"prob-dag", "prob-dag-simplified", "uct", "ucd"};
            cfg.betas = {1.0};
            cfg.repetitions = 10;
            cfg.budget = 3000;
            cfg.eval_every = 50;
            cfg.eval_games = 20;
            break;
        case ExperimentKind::FeatSel:
            cfg.methods = {"prob-dag", "prob-dag-simplified", "uct", "ucd", "uct-rave"};
            cfg.betas = {0.5};
            cfg.repetitions = 10;
            cfg.budget = 1200;
            cfg.record_every = 20;
            break;
    }
    return cfg;
}

std::vector<MethodRun> expand_method_runs(const ExperimentConfig& config) {
    static const std::vector<std::string> known = {"prob-dag",           "prob-tree", "uct",
                                                   "prob-dag-simplified", "ucd",       "uct-rave"};
    std::vector<double> betas = config.betas.empty() ? std::vector<double>{1.0} : config.betas;
    std::vector<MethodRun> runs;
    for (const std::string& m : config.methods) {
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            throw std::invalid_argument("unknown method: " + m);
        }
        for (double beta : betas) {
            MethodRun r;
            r.method = m;
            r.beta = beta;
            r.lambda = default_lambda(config.experiment, m);
            if (config.experiment == ExperimentKind::FeatSel) {
                r.pilot_rollouts = 20;
                r.standardize = true;
            }
            runs.push_back(std::move(r));
        }
    }
    return runs;
}

std::shared_ptr<const Domain> make_domain(const ExperimentConfig& config, int repetition) {
    switch (config.experiment) {
        case ExperimentKind::Synthetic:
            return std::make_shared<SyntheticDomain>(
                config.synth_features, config.synth_bag,
                config.base_seed + static_cast<std::uint64_t>(repetition));
        case ExperimentKind::TicTacToe:
            return std::make_shared<TicTacToeDomain>(config.ttt_kernel_scale);
        case ExperimentKind::FeatSel:
            return std::make_shared<FeatureSelectionDomain>(
                config.fs_features, config.fs_subset,
                std::make_shared<PixelInformativenessOracle>(config.fs_features));
    }
    throw std::logic_error("make_domain: bad experiment");
}

RunOutcome execute_single_run(const ExperimentConfig& config, const MethodRun& spec,
                              int repetition, std::shared_ptr<const Domain> domain) {
    RunOutcome out;
    out.spec = spec;
    out.repetition = repetition;
    out.seed = config.base_seed + static_cast<std::uint64_t>(repetition);
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (!domain) domain = make_domain(config, repetition);
        if (is_probabilistic_method(spec.method)) {
            SearchConfig sc;
            sc.beta = spec.beta;
            sc.lambda = spec.lambda;
            sc.rule = spec.method == "prob-dag-simplified" ? BackupRule::Softmax : BackupRule::Ep;
            sc.representation =
                spec.method == "prob-tree" ? Representation::Tree : Representation::Dag;
            sc.budget = config.budget;
            sc.seed = out.seed;
            sc.pilot_rollouts = spec.pilot_rollouts;
            sc.standardize = spec.standardize;
            ProbabilisticSearch search(domain, sc);
            out.curve = run_curve(search, config, out.seed);
            out.best_reward = search.trace().best_so_far;
            out.best_key = search.trace().best_key;
        } else {
            BaselineConfig bc;
            bc.method = spec.method == "uct"
                            ? BaselineMethod::Uct
                            : (spec.method == "ucd" ? BaselineMethod::Ucd : BaselineMethod::UctRave);
            bc.beta = spec.beta;
            bc.budget = config.budget;
            bc.seed = out.seed;
            bc.pilot_rollouts = spec.pilot_rollouts;
            bc.standardize = spec.standardize;
            bc.rave = spec.rave;
            BanditSearch search(domain, bc);
            out.curve = run_curve(search, config, out.seed);
            out.best_reward = search.trace().best_so_far;
            out.best_key = search.trace().best_key;
        }
        for (const auto& [cp, v] : out.curve) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("non-finite metric at checkpoint " + std::to_string(cp));
            }
        }
    } catch (const std::exception& e) {
        out.error = e.what();
        out.curve.clear();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result;
    result.config = config;
    std::vector<MethodRun> specs = expand_method_runs(config);

    unsigned workers = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                          : std::max(1u, std::thread::hardware_concurrency());

    // One immutable domain per repetition, shared by all methods of that
    // repetition (same synthetic ground-truth draw). Built in parallel.
    std::vector<std::shared_ptr<const Domain>> domains(
        static_cast<std::size_t>(config.repetitions));
    {
        std::atomic<int> next{0};
        auto build = [&] {
            for (int r; (r = next.fetch_add(1)) < config.repetitions;) {
                domains[static_cast<std::size_t>(r)] = make_domain(config, r);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(build);
        build();
        for (auto& t : pool) t.join();
    }

    result.runs.resize(specs.size() * static_cast<std::size_t>(config.repetitions));
    {
        std::atomic<std::size_t> next{0};
        const std::size_t total = result.runs.size();
        auto work = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < total;) {
                std::size_t spec_idx = i / static_cast<std::size_t>(config.repetitions);
                int rep = static_cast<int>(i % static_cast<std::size_t>(config.repetitions));
                result.runs[i] = execute_single_run(config, specs[spec_idx], rep,
                                                    domains[static_cast<std::size_t>(rep)]);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();
    }

    for (const RunOutcome& r : result.runs) {
        if (!r.ok()) result.all_ok = false;
    }
    write_outputs(result);
    return result;
}

std::string csv_header() { return "checkpoint,method,beta,repetition,value\n"; }

std::string csv_rows(const RunOutcome& outcome) {
    std::string rows;
    for (const auto& [cp, v] : outcome.curve) {
        rows += std::to_string(cp);
        rows += ',';
        rows += outcome.spec.method;
        rows += ',';
        rows += fmt_double(outcome.spec.beta);
        rows += ',';
        rows += std::to_string(outcome.repetition);
        rows += ',';
        rows += fmt_double(v);
        rows += '\n';
    }
    return rows;
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    return json{{"experiment", experiment_name(c.experiment)},
                {"methods", c.methods},
                {"betas", c.betas},
                {"repetitions", c.repetitions},
                {"base_seed", c.base_seed},
                {"budget", c.budget},
                {"record_every", c.record_every},
                {"eval_every", c.eval_every},
                {"eval_games", c.eval_games},
                {"workers", c.workers},
                {"out_dir", c.out_dir},
                {"synth_features", c.synth_features},
                {"synth_bag", c.synth_bag},
                {"fs_features", c.fs_features},
                {"fs_subset", c.fs_subset},
                {"ttt_kernel_scale", c.ttt_kernel_scale}};
}

}  // namespace

void write_outputs(const ExperimentResult& result) {
    namespace fs = std::filesystem;
    const ExperimentConfig& cfg = result.config;
    fs::create_directories(cfg.out_dir);

    std::string raw = csv_header();
    for (const RunOutcome& r : result.runs) raw += csv_rows(r);
    std::ofstream(fs::path(cfg.out_dir) / "results.csv", std::ios::binary) << raw;

    // Aggregates: mean and sample std over repetitions per (method, beta,
    // checkpoint), in first-appearance order.
    std::string agg = "checkpoint,method,beta,mean,std\n";
    std::vector<std::pair<std::string, double>> columns;
    for (const RunOutcome& r : result.runs) {
        std::pair<std::string, double> col{r.spec.method, r.spec.beta};
        if (std::find(columns.begin(), columns.end(), col) == columns.end()) {
            columns.push_back(col);
        }
    }
    for (const auto& [method, beta] : columns) {
        std::map<int, std::vector<double>> by_checkpoint;
        for (const RunOutcome& r : result.runs) {
            if (r.spec.method != method || r.spec.beta != beta || !r.ok()) continue;
            for (const auto& [cp, v] : r.curve) by_checkpoint[cp].push_back(v);
        }
        for (const auto& [cp, vals] : by_checkpoint) {
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double sq = 0.0;
            for (double v : vals) sq += (v - mean) * (v - mean);
            double sd = vals.size() > 1 ? std::sqrt(sq / static_cast<double>(vals.size() - 1)) : 0.0;
            agg += std::to_string(cp) + ',' + method + ',' + fmt_double(beta) + ',' +
                   fmt_double(mean) + ',' + fmt_double(sd) + '\n';
        }
    }
    std::ofstream(fs::path(cfg.out_dir) / "aggregates.csv", std::ios::binary) << agg;

    json manifest;
    manifest["format_version"] = 1;
    manifest["compiler"] = __VERSION__;
    manifest["config"] = config_to_json(cfg);
    json runs = json::array();
    for (const RunOutcome& r : result.runs) {
        json jr{{"method", r.spec.method},
                {"beta", r.spec.beta},
                {"lambda", r.spec.lambda},
                {"pilot_rollouts", r.spec.pilot_rollouts},
                {"standardize", r.spec.standardize},
                {"repetition", r.repetition},
                {"seed", r.seed},
                {"seconds", r.seconds},
                {"best_reward", r.best_reward},
                {"best_state", key_display(cfg.experiment, r.best_key)}};
        if (!r.ok()) jr["error"] = r.error;
        runs.push_back(std::move(jr));
    }
    manifest["runs"] = std::move(runs);
    manifest["all_ok"] = result.all_ok;

    // Increment tables actually used by the probabilistic methods, for the
    // run record. One per distinct probabilistic method spec.
    json tables = json::array();
    for (const MethodRun& spec : expand_method_runs(cfg)) {
        if (!is_probabilistic_method(spec.method)) continue;
        std::shared_ptr<const Domain> domain = make_domain(cfg, 0);
        SearchConfig sc;
        sc.lambda = spec.lambda;
        ProbabilisticSearch probe(domain, sc);
        json entries = json::array();
        for (const GaussianBelief& b : probe.delta_table().entries()) {
            entries.push_back({{"mean", b.mean}, {"variance", b.variance}});
        }
        tables.push_back({{"method", spec.method}, {"entries", std::move(entries)}});
        break;  // identical across betas; the table depends only on the domain
    }
    manifest["delta_tables"] = std::move(tables);

    if (cfg.experiment == ExperimentKind::FeatSel) {
        PixelReport pr = report_pixels(result);
        manifest["selected_features"] = pr.features;
        manifest["selected_reward"] = pr.reward;
        manifest["runs_matching_best"] = pr.runs_matching_best;
    }

    std::ofstream(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary)
        << manifest.dump(2) << '\n';
}

ExperimentConfig config_from_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
    json manifest = json::parse(in);
    const json& c = manifest.at("config");
    ExperimentConfig cfg;
    cfg.experiment = experiment_from_name(c.at("experiment").get<std::string>());
    cfg.methods = c.at("methods").get<std::vector<std::string>>();
    cfg.betas = c.at("betas").get<std::vector<double>>();
    cfg.repetitions = c.at("repetitions").get<int>();
    cfg.base_seed = c.at("base_seed").get<std::uint64_t>();
    cfg.budget = c.at("budget").get<int>();
    cfg.record_every = c.at("record_every").get<int>();
    cfg.eval_every = c.at("eval_every").get<int>();
    cfg.eval_games = c.at("eval_games").get<int>();
    cfg.workers = c.at("workers").get<int>();
    cfg.out_dir = c.at("out_dir").get<std::string>();
    cfg.synth_features = c.at("synth_features").get<int>();
    cfg.synth_bag = c.at("synth_bag").get<int>();
    cfg.fs_features = c.at("fs_features").get<int>();
    cfg.fs_subset = c.at("fs_subset").get<int>();
    cfg.ttt_kernel_scale = c.at("ttt_kernel_scale").get<double>();
    return cfg;
}

double evaluate_adversarial(const ProbabilisticSearch& search, TttMinimaxOracle& oracle,
                            int games, std::mt19937_64& rng) {
    return evaluate_adversarial_impl(search, oracle, games, rng);
}

double evaluate_adversarial(const BanditSearch& search, TttMinimaxOracle& oracle, int games,
                            std::mt19937_64& rng) {
    return evaluate_adversarial_impl(search, oracle, games, rng);
}

PixelReport report_pixels(const ExperimentResult& result) {
    PixelReport report;
    bool found = false;
    for (const RunOutcome& r : result.runs) {
        if (!r.ok() || r.best_key.empty()) continue;
        if (!found || r.best_reward > report.reward) {
            report.reward = r.best_reward;
            report.features = feature_bag::decode(r.best_key);
            found = true;
        }
    }
    if (found) {
        StateKey best = feature_bag::encode(report.features);
        for (const RunOutcome& r : result.runs) {
            if (r.ok() && r.best_key == best) ++report.runs_matching_best;
        }
    }
    return report;
}

}  // namespace dagsearch
