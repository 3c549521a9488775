#include "cmg/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmg/baselines.hpp"
#include "cmg/errors.hpp"
#include "cmg/eval.hpp"
#include "cmg/gam.hpp"
#include "cmg/game.hpp"
#include "cmg/lp_exact.hpp"
#include "cmg/spec_io.hpp"

#ifndef CMG_FIXTURE_DIR
#define CMG_FIXTURE_DIR "fixtures"
#endif

namespace cmg {

namespace fs = std::filesystem;

std::string resolve_fixture(const std::string& name) {
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("CMG_FIXTURES_DIR")) dirs.push_back(env);
    dirs.push_back("fixtures");
    dirs.push_back(CMG_FIXTURE_DIR);
    for (const auto& dir : dirs) {
        fs::path p = fs::path(dir) / (name + ".json");
        if (fs::exists(p)) return p.string();
    }
    throw SpecError("fixture not found: " + name);
}

namespace {

GameSpec make_binary_game(int n, int m, int num_exploits, double c, uint64_t seed) {
    GameSpec g;
    g.schema.n = n;
    g.schema.V = 1;
    g.schema.domains.assign(n, {-1, 1});
    g.m = m;
    g.prior.kind = PriorKind::UniformBinary;
    g.value.kind = ValueKind::HalfSumPlusOne;
    g.cost.per_attribute.assign(n, c);
    Rng rng(seed);
    for (int e = 0; e < num_exploits; ++e) {
        Exploit ex;
        const int k = rng.uniform_int(1, std::min(3, n));
        while (static_cast<int>(ex.required.size()) < k)
            ex.required[rng.uniform_int(0, n - 1)] = {1};
        g.exploits.push_back(std::move(ex));
    }
    g.validate();
    return g;
}

double csv_cost_c(const GameSpec& game) {
    const auto& c = game.cost.per_attribute;
    return std::accumulate(c.begin(), c.end(), 0.0) / std::max<size_t>(1, c.size());
}

struct RunRow {
    uint64_t seed = 0;
    std::string method;
    int n = 0, m = 0, num_exploits = 0;
    double c = 0.0;
    int V = 0;
    double defender_loss = 0.0, attack_value = 0.0, cost_term = 0.0;
    double runtime_seconds = 0.0;
    std::string status = "ok";
};

std::string row_prefix(const RunRow& r) {
    std::ostringstream os;
    os << r.seed << ',' << r.method << ',' << r.n << ',' << r.m << ',' << r.num_exploits
       << ',' << r.c << ',' << r.V << ',';
    return os.str();
}

std::string format_row(const RunRow& r, bool with_status) {
    std::ostringstream os;
    os.precision(10);
    os << row_prefix(r) << r.defender_loss << ',' << r.attack_value << ',' << r.cost_term
       << ',' << r.runtime_seconds;
    if (with_status) os << ',' << r.status;
    return os.str();
}

constexpr const char* kCsvHeader =
    "seed,method,n,m,num_exploits,c,V,defender_loss,attack_value,cost_term,runtime_seconds";

TrainConfig train_config(const RunManifest& manifest, uint64_t seed) {
    TrainConfig cfg;
    cfg.batch = manifest.batch;
    cfg.outer_iters = manifest.iters;
    cfg.inner_steps = manifest.inner_steps;
    cfg.lr_defender = manifest.lr_defender;
    cfg.lr_attacker = manifest.lr_attacker;
    cfg.atk_warmup = manifest.atk_warmup;
    cfg.restarts = manifest.restarts;
    cfg.gen_bias_init = manifest.gen_bias_init;
    cfg.seed = seed;
    return cfg;
}

RunRow run_method(const GameSpec& game, const RunManifest& manifest, const std::string& method,
                  uint64_t seed, bool write_artifacts) {
    RunRow row;
    row.seed = seed;
    row.method = method;
    row.n = game.schema.n;
    row.m = game.m;
    row.num_exploits = static_cast<int>(game.exploits.size());
    row.c = csv_cost_c(game);
    row.V = game.schema.V;

    const fs::path out(manifest.out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    if (method == "lp-cg") {
        EquilibriumResult res = solve_lp_cg(game, manifest.eps, seed);
        row.defender_loss = res.defender_loss;
        row.attack_value = res.attacker_value;
        row.cost_term = res.defender_loss - res.attacker_value;
        if (write_artifacts) {
            std::ofstream f(out / ("strategy-" + std::to_string(seed) + ".json"));
            f << equilibrium_to_json(res, game) << '\n';
        }
    } else if (method == "gam" || method == "unconditional") {
        GamResult res = method == "gam" ? train_gam(game, train_config(manifest, seed))
                                        : train_unconditional(game, train_config(manifest, seed));
        EvalReport rep =
            evaluate(make_gam_sampler(game, res.gen), game, manifest.eval_samples, seed);
        row.defender_loss = rep.defender_loss;
        row.attack_value = rep.attack_value;
        row.cost_term = rep.cost_term;
        if (write_artifacts)
            save_net_archive(res, (out / ("netparams-" + std::to_string(seed) + ".bin")).string());
    } else if (method == "greedy") {
        GreedyResult res = greedy_mask(game, manifest.batch, seed);
        EvalReport rep = evaluate(make_fixed_mask_sampler(game, res.mask), game,
                                  manifest.eval_samples, seed);
        row.defender_loss = rep.defender_loss;
        row.attack_value = rep.attack_value;
        row.cost_term = rep.cost_term;
        if (write_artifacts) {
            nlohmann::json j;
            j["method"] = "greedy";
            j["mask"] = res.mask;
            j["masked_order"] = res.masked_order;
            j["search_loss"] = res.loss;
            std::ofstream f(out / ("strategy-" + std::to_string(seed) + ".json"));
            f << j.dump(2) << '\n';
        }
    } else if (method == "random") {
        EvalReport rep =
            evaluate(make_random_mask_sampler(game), game, manifest.eval_samples, seed);
        row.defender_loss = rep.defender_loss;
        row.attack_value = rep.attack_value;
        row.cost_term = rep.cost_term;
    } else {
        throw ConfigError("unknown method: " + method);
    }

    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

void write_csv(const fs::path& path, const std::vector<std::string>& rows, const char* header) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << header << '\n';
    for (const auto& r : rows) f << r << '\n';
}

int cmd_solve(const RunManifest& manifest) {
    fs::create_directories(manifest.out_dir);
    std::vector<std::string> rows;
    std::vector<double> losses;
    for (uint64_t seed : manifest.seeds) {
        GameSpec game = manifest_game(manifest, seed);
        RunRow row = run_method(game, manifest, manifest.method, seed, true);
        losses.push_back(row.defender_loss);
        rows.push_back(format_row(row, false));
        std::cout << "seed=" << seed << " method=" << manifest.method
                  << " defender_loss=" << row.defender_loss << '\n';
    }
    write_csv(fs::path(manifest.out_dir) / "results.csv", rows, kCsvHeader);
    const double mu = std::accumulate(losses.begin(), losses.end(), 0.0) / losses.size();
    std::cout << "mean defender_loss=" << mu << " over " << losses.size() << " seed(s)\n";
    return 0;
}

RunManifest apply_axis(RunManifest manifest, const std::string& axis, double value) {
    if (axis == "n") manifest.n = static_cast<int>(value);
    else if (axis == "num_exploits") manifest.num_exploits = static_cast<int>(value);
    else if (axis == "c") manifest.c = value;
    else if (axis == "m") manifest.m = static_cast<int>(value);
    else throw ConfigError("unknown sweep axis: " + axis);
    return manifest;
}

int cmd_experiment(const RunManifest& manifest) {
    if (manifest.axis.empty() || manifest.axis_values.empty())
        throw ConfigError("experiment needs --axis and --values");
    std::vector<std::string> methods = manifest.methods;
    if (methods.empty()) methods.push_back(manifest.method);
    fs::create_directories(manifest.out_dir);

    std::vector<std::string> rows;
    for (double value : manifest.axis_values) {
        RunManifest cell = apply_axis(manifest, manifest.axis, value);
        for (const auto& method : methods) {
            for (uint64_t seed : manifest.seeds) {
                RunRow row;
                std::ostringstream prefix;
                prefix.precision(10);
                prefix << manifest.axis << ',' << value << ',';
                try {
                    GameSpec game = manifest_game(cell, seed);
                    row = run_method(game, cell, method, seed, false);
                } catch (const std::exception& ex) {
                    row.seed = seed;
                    row.method = method;
                    row.n = cell.n;
                    row.m = cell.m;
                    row.num_exploits = cell.num_exploits;
                    row.c = cell.c;
                    row.V = cell.V;
                    row.status = "error";
                    std::cerr << "cell failed (" << manifest.axis << "=" << value
                              << ", method=" << method << ", seed=" << seed
                              << "): " << ex.what() << '\n';
                }
                rows.push_back(prefix.str() + format_row(row, true));
            }
        }
    }
    const std::string header = "axis,value," + std::string(kCsvHeader) + ",status";
    write_csv(fs::path(manifest.out_dir) / "results.csv", rows, header.c_str());
    std::cout << "wrote " << rows.size() << " rows\n";
    return 0;
}

int cmd_case_study(const RunManifest& manifest) {
    RunManifest local = manifest;
    if (local.spec_path.empty() && local.fixture.empty()) local.fixture = "case-study";
    fs::create_directories(local.out_dir);

    std::vector<std::string> rows;
    for (uint64_t seed : local.seeds) {
        GameSpec game = manifest_game(local, seed);
        GamResult res = train_gam(game, train_config(local, seed));
        save_net_archive(res, (fs::path(local.out_dir) /
                               ("netparams-" + std::to_string(seed) + ".bin"))
                                  .string());

        // Empirical mask statistics and best-responding exploit frequencies.
        auto sampler = make_gam_sampler(game, res.gen);
        const int len = game.joint_len();
        std::vector<double> masked_prob(len, 0.0);
        std::unordered_map<std::vector<int>, int, VecHash> support;
        {
            Rng rng(seed + 1);
            Config x;
            Mask y;
            for (int i = 0; i < local.eval_samples; ++i) {
                sampler(rng, x, y);
                support[std::vector<int>(y.begin(), y.end())] += 1;
                for (int j = 0; j < len; ++j) masked_prob[j] += y[j] ? 0.0 : 1.0;
            }
            for (auto& p : masked_prob) p /= local.eval_samples;
        }
        EvalReport rep = evaluate(sampler, game, local.eval_samples, seed);

        nlohmann::json j;
        j["seed"] = seed;
        j["defender_loss"] = rep.defender_loss;
        j["attack_value"] = rep.attack_value;
        j["cost_term"] = rep.cost_term;
        j["masked_probability"] = masked_prob;
        j["exploit_frequency"] = rep.exploit_freq;
        auto& ms = j["mask_support"] = nlohmann::json::array();
        std::vector<std::pair<std::vector<int>, int>> top(support.begin(), support.end());
        std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (top.size() > 32) top.resize(32);
        for (const auto& [mask, count] : top) {
            nlohmann::json entry;
            entry["mask"] = mask;
            entry["probability"] = static_cast<double>(count) / local.eval_samples;
            ms.push_back(entry);
        }
        std::ofstream f(fs::path(local.out_dir) /
                        ("case-study-" + std::to_string(seed) + ".json"));
        f << j.dump(2) << '\n';

        int top_exploit = 0;
        for (size_t e = 1; e < rep.exploit_freq.size(); ++e)
            if (rep.exploit_freq[e] > rep.exploit_freq[top_exploit])
                top_exploit = static_cast<int>(e);
        std::cout << "seed=" << seed << " defender_loss=" << rep.defender_loss
                  << " top_exploit=" << top_exploit + 1 << '\n';

        RunRow row;
        row.seed = seed;
        row.method = "gam";
        row.n = game.schema.n;
        row.m = game.m;
        row.num_exploits = static_cast<int>(game.exploits.size());
        row.c = csv_cost_c(game);
        row.V = game.schema.V;
        row.defender_loss = rep.defender_loss;
        row.attack_value = rep.attack_value;
        row.cost_term = rep.cost_term;
        rows.push_back(format_row(row, false));
    }
    write_csv(fs::path(local.out_dir) / "results.csv", rows, kCsvHeader);
    return 0;
}

void add_common_options(CLI::App* sub, RunManifest& manifest, int& seeds_k,
                        std::vector<uint64_t>& seed_list) {
    auto* spec = sub->add_option("--spec", manifest.spec_path, "game-spec JSON path");
    sub->add_option("--fixture", manifest.fixture, "bundled fixture name")->excludes(spec);
    sub->add_option("--seeds", seeds_k, "number of seeds (0..K-1)");
    sub->add_option("--seed-list", seed_list, "explicit seed list")->delimiter(',');
    sub->add_option("--out", manifest.out_dir, "output directory");
    sub->add_option("--eps", manifest.eps, "lp-cg convergence tolerance");
    sub->add_option("--batch", manifest.batch, "training batch / greedy sample budget");
    sub->add_option("--iters", manifest.iters, "training outer iterations");
    sub->add_option("--inner-steps", manifest.inner_steps, "attacker steps per outer iteration");
    sub->add_option("--lr-defender", manifest.lr_defender, "defender learning rate");
    sub->add_option("--lr-attacker", manifest.lr_attacker, "attacker learning rate");
    sub->add_option("--warmup", manifest.atk_warmup, "attacker-only steps before alternation");
    sub->add_option("--restarts", manifest.restarts, "training restarts; keep the best final loss");
    sub->add_option("--gen-bias", manifest.gen_bias_init, "generator output bias at init");
    sub->add_option("--eval-samples", manifest.eval_samples, "evaluation sample count M");
    sub->add_option("--n", manifest.n, "attributes per device");
    sub->add_option("--m", manifest.m, "device count");
    sub->add_option("--num-exploits", manifest.num_exploits, "exploit count");
    sub->add_option("--V", manifest.V, "maximum attribute value");
    sub->add_option("--c", manifest.c, "per-attribute masking cost");
}

}  // namespace

GameSpec manifest_game(const RunManifest& manifest, uint64_t seed) {
    if (!manifest.spec_path.empty()) return load_game_spec(manifest.spec_path);
    if (!manifest.fixture.empty()) return load_game_spec(resolve_fixture(manifest.fixture));
    try {
        return generate_structured_instance(manifest.n, manifest.m, manifest.num_exploits,
                                            manifest.V, seed, manifest.c);
    } catch (const ConfigError&) {
        // n too small for the structured layout; seeded binary instance instead.
        return make_binary_game(manifest.n, manifest.m, manifest.num_exploits, manifest.c, seed);
    }
}

int run_cli(int argc, const char* const* argv) {
    RunManifest manifest;
    int seeds_k = -1;
    std::vector<uint64_t> seed_list;
    static const std::vector<std::string> kMethods = {"lp-cg", "gam", "unconditional", "greedy",
                                                      "random"};

    CLI::App app{"Combinatorial masking game solver and experiment harness"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "solve one game with one method");
    solve->add_option("--method", manifest.method, "solution method")
        ->check(CLI::IsMember(kMethods));
    add_common_options(solve, manifest, seeds_k, seed_list);

    auto* experiment = app.add_subcommand("experiment", "sweep one axis over methods and seeds");
    experiment->add_option("--method", manifest.method, "single method")
        ->check(CLI::IsMember(kMethods));
    experiment->add_option("--methods", manifest.methods, "method list")
        ->delimiter(',')
        ->check(CLI::IsMember(kMethods));
    experiment->add_option("--axis", manifest.axis, "sweep axis")
        ->required()
        ->check(CLI::IsMember({"n", "num_exploits", "c", "m"}));
    experiment->add_option("--values", manifest.axis_values, "axis values")
        ->required()
        ->delimiter(',');
    add_common_options(experiment, manifest, seeds_k, seed_list);

    auto* case_study = app.add_subcommand("case-study", "train GAM on the case-study fixture");
    add_common_options(case_study, manifest, seeds_k, seed_list);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!seed_list.empty()) {
        manifest.seeds = seed_list;
    } else if (seeds_k >= 0) {
        if (seeds_k == 0) {
            std::cerr << "error: --seeds must be positive\n";
            return 2;
        }
        manifest.seeds.clear();
        for (int s = 0; s < seeds_k; ++s) manifest.seeds.push_back(s);
    }

    try {
        if (solve->parsed()) return cmd_solve(manifest);
        if (experiment->parsed()) return cmd_experiment(manifest);
        return cmd_case_study(manifest);
    } catch (const SolverError& ex) {
        std::cerr << "solver failure: " << ex.what() << '\n';
        return 4;
    } catch (const TrainingError& ex) {
        std::cerr << "training failure: " << ex.what() << '\n';
        return 4;
    } catch (const std::exception& ex) {
        std::cerr << "spec error: " << ex.what() << '\n';
        return 3;
    }
}

}  // namespace cmg
