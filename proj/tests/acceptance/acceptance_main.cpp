// Acceptance suite: runs every gate criterion at its pinned tolerance and
// prints one pass/fail line each. Usage:
//
//   palette_acceptance <path-to-cli-binary> <path-to-configs-dir>
//
// Exit code 0 iff every criterion passes (including its runtime budget).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "palette/baselines.hpp"
#include "palette/config.hpp"
#include "palette/verify.hpp"

namespace fs = std::filesystem;
using namespace palette;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename... Args>
void expect(bool cond, Args&&... parts) {
    if (!cond) {
        std::ostringstream msg;
        (msg << ... << parts);
        throw Failure(msg.str());
    }
}

struct Env {
    fs::path cli;
    fs::path configs;
    fs::path scratch;
    int jobs = std::max(1u, std::thread::hardware_concurrency());
};

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    expect(bool(in), "cannot open ", p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void run_cli(const Env& env, const std::string& args) {
    const std::string cmd = env.cli.string() + " " + args + " >> " +
                            (env.scratch / "cli.log").string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    expect(rc == 0, "cli failed (rc=", rc, "): ", cmd);
}

// --------------------------------------------------------------------------
// Criteria

std::string identity_suite(Env&) {
    std::mt19937_64 rng(101);
    double max_dev = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 30);
        std::vector<std::string> toks;
        for (int i = 0; i < n; ++i) toks.push_back("t" + std::to_string(i));
        auto v = Vocabulary::from_tokens(std::move(toks));
        std::vector<double> p(static_cast<size_t>(n));
        for (auto& x : p) x = 0.01 + uniform01(rng);
        TokenDistribution base(v, p);

        for (auto mode : {CombineMode::exact, CombineMode::sigmoid}) {
            for (auto scale : {CombineScale::normalized, CombineScale::canonical}) {
                auto res = combine_distributions(base, {}, mode, scale, 0.25);
                for (int32_t i = 0; i < base.size(); ++i) {
                    max_dev = std::max(max_dev, std::abs(res.dist.prob(i) - base.prob(i)));
                }
            }
        }
        const double w = 1.0;
        auto id = weighted_log_linear(std::span(&base, 1), std::span(&w, 1));
        for (int32_t i = 0; i < base.size(); ++i) {
            max_dev = std::max(max_dev, std::abs(id.prob(i) - base.prob(i)));
        }
    }
    expect(max_dev <= 1e-12, "identity deviation ", max_dev, " exceeds 1e-12");
    std::ostringstream out;
    out << "max identity deviation " << max_dev;
    return out.str();
}

std::string strength_monotonicity(Env&) {
    std::mt19937_64 rng(202);
    std::vector<double> grid(10);
    for (size_t i = 0; i < grid.size(); ++i) grid[i] = 0.1 + (5.0 - 0.1) * i / 9.0;
    double worst = 1.0;
    for (int scenario = 0; scenario < 200; ++scenario) {
        for (auto mode : {CombineMode::exact, CombineMode::sigmoid}) {
            auto sc = verify::CorrelationScenario::random(rng, 32, 3, mode);
            auto rep = verify::sweep_positive_correlation(sc, grid);
            worst = std::min(worst, rep.min_step);
            expect(rep.nondecreasing, "scenario ", scenario, " (", to_string(mode),
                   ") decreases by ", -rep.min_step);
        }
    }
    std::ostringstream out;
    out << "200 scenarios x both modes nondecreasing, worst step " << worst;
    return out.str();
}

std::string enhancement_dominance(Env&) {
    double min_margin = 1e300;
    for (auto mode : {CombineMode::exact, CombineMode::sigmoid}) {
        std::mt19937_64 rng(mode == CombineMode::exact ? 303 : 304);
        for (int i = 0; i < 100000; ++i) {
            double a = 1e-3 + (1.0 - 2e-3) * uniform01(rng);
            double b = 1e-3 + (1.0 - 2e-3) * uniform01(rng);
            if (a == b) continue;
            auto rep = verify::enhancement_gaps(std::max(a, b), std::min(a, b),
                                                0.1 + 4.9 * uniform01(rng), mode);
            min_margin = std::min(min_margin, rep.gap_ours - rep.gap_linear);
            expect(rep.gap_ours > rep.gap_linear, "pair (", rep.p_attr, ", ", rep.p_v,
                   ") mode ", to_string(mode), ": ours ", rep.gap_ours, " <= linear ",
                   rep.gap_linear);
        }
    }
    std::ostringstream out;
    out << "10^5 pairs per mode, min margin " << min_margin;
    return out.str();
}

std::string ratio_and_kernel(Env&) {
    double max_log_ratio = -1e300;
    for (auto mode : {CombineMode::exact, CombineMode::sigmoid}) {
        for (int k = 2; k <= 999; ++k) {
            for (int v = 1; v < k; ++v) {
                const double lr = verify::log_p_ratio(k / 1000.0, v / 1000.0, mode);
                max_log_ratio = std::max(max_log_ratio, lr);
            }
        }
    }
    expect(max_log_ratio < 0.0, "a grid pair reached log ratio ", max_log_ratio);

    double min_diff = 1e300;
    for (auto mode : {CombineMode::exact, CombineMode::sigmoid}) {
        auto rep = verify::f_monotone_check(mode, 10000);
        expect(rep.all_increasing(), to_string(mode), " kernel has ", rep.violations,
               " non-positive forward differences");
        min_diff = std::min(min_diff, rep.min_forward_diff);
    }
    std::ostringstream out;
    out << "max log ratio " << max_log_ratio << ", min kernel forward diff " << min_diff;
    return out.str();
}

std::string convexity(Env&) {
    std::mt19937_64 rng(505);
    double min_gap = 1e300;
    for (int i = 0; i < 100000; ++i) {
        const double gap =
            verify::convexity_gap(1e-3 + 10.0 * uniform01(rng), 1e-3 + 10.0 * uniform01(rng),
                                  1e-3 + (1.0 - 1e-3) * uniform01(rng),
                                  1e-3 + (1.0 - 1e-3) * uniform01(rng));
        min_gap = std::min(min_gap, gap);
    }
    expect(min_gap >= -1e-12, "min convexity gap ", min_gap);
    std::ostringstream out;
    out << "10^5 draws, min gap " << min_gap;
    return out.str();
}

std::string factorization_residuals(Env&) {
    std::mt19937_64 rng(606);
    double max_couple = 0.0;
    for (int i = 0; i < 1000; ++i) {
        auto inst = verify::FactorizationInstance::random(rng);
        auto res = verify::check_factorization(inst);
        max_couple = std::max(max_couple, res.couple);
        expect(res.couple <= 1e-9, "instance ", i, " couple residual ", res.couple);
    }
    double max_contrib = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto joint = verify::JointSpace::product_outcome(
            rng, 2 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 3));
        const double c = std::abs(verify::cmi_outcome_contribution(joint, 0));
        max_contrib = std::max(max_contrib, c);
        expect(c <= 1e-9, "joint ", i, " contribution ", c);
    }
    std::ostringstream out;
    out << "max couple residual " << max_couple << ", max product-outcome contribution "
        << max_contrib;
    return out.str();
}

std::string coefficient_bounds(Env&) {
    std::mt19937_64 rng(707);
    int lower_violations = 0;
    for (int i = 0; i < 10000; ++i) {
        auto inst = verify::DerivationInstance::random(rng, 2 + i % 3);
        auto rep = verify::simplification_bound_check(inst);
        expect(rep.upper_ok, "instance ", i, " violates the upper bound");
        if (!rep.lower_ok) ++lower_violations;
    }
    std::ostringstream out;
    out << "upper bound holds on 10^4 instances; lower-bound violation rate "
        << 100.0 * lower_violations / 10000.0 << "% (reported, no threshold)";
    return out.str();
}

std::string strength_trend(Env& env) {
    auto cfg = RunConfig::load(env.configs / "sweep_s.json");
    expect(cfg.s_grid.size() == 10, "expected a 10-point grid");
    expect(cfg.scenario.generations_per_point == 50, "expected 50 generations per point");
    auto rows = eval::run_strength_sweep(cfg.scenario, cfg.s_grid, env.jobs);
    std::vector<double> scores;
    for (const auto& r : rows) scores.push_back(r.score_mean);
    const double rho = eval::spearman_rank_correlation(cfg.s_grid, scores);
    expect(rho >= 0.8, "spearman(s, score) = ", rho, " < 0.8");
    std::ostringstream out;
    out << "spearman(s, score) = " << rho << " across " << rows.size() << " points";
    return out.str();
}

eval::ConflictTable run_conflict_config(Env& env, const std::string& name) {
    auto cfg = RunConfig::load(env.configs / name);
    expect(cfg.ratio_grid.size() == 10, "expected a 10-point ratio grid in ", name);
    return eval::run_conflict_eval(cfg.scenario, cfg.strategies, cfg.ratio_grid, env.jobs);
}

std::string conflict_table(Env& env) {
    auto table = run_conflict_config(env, "conflict.json");
    expect(table.frac_palette_ge_linear >= 0.8, "palette >= linear on only ",
           table.frac_palette_ge_linear, " of points");
    expect(table.frac_palette_ge_union >= 0.8, "palette >= union on only ",
           table.frac_palette_ge_union, " of points");
    std::ostringstream out;
    out << "palette >= linear on " << 100.0 * table.frac_palette_ge_linear
        << "% of points, >= union on " << 100.0 * table.frac_palette_ge_union << "%";
    return out.str();
}

std::string same_trend_increase(Env& env) {
    auto conflicting = run_conflict_config(env, "conflict.json");
    auto agreeing = run_conflict_config(env, "conflict_sametrend.json");
    auto mean_of = [](const eval::ConflictTable& table, std::string_view strategy) {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : table.rows) {
            if (r.strategy == strategy) {
                sum += r.score_mean;
                ++n;
            }
        }
        expect(n > 0, "no rows for ", strategy);
        return sum / n;
    };
    const double inc_palette =
        mean_of(agreeing, "palette") - mean_of(conflicting, "palette");
    const double inc_linear = mean_of(agreeing, "linear") - mean_of(conflicting, "linear");
    expect(inc_palette < inc_linear, "palette increase ", inc_palette,
           " is not below linear increase ", inc_linear);
    std::ostringstream out;
    out << "score increase palette " << inc_palette << " < linear " << inc_linear;
    return out.str();
}

std::string t_sweep_reference(Env& env) {
    auto cfg = RunConfig::load(env.configs / "sweep_t.json");
    expect(cfg.t_grid.size() == 11, "expected t grid {0, 0.05, ..., 0.5}");
    for (size_t i = 0; i < cfg.t_grid.size(); ++i) {
        expect(std::abs(cfg.t_grid[i] - 0.05 * static_cast<double>(i)) < 1e-12,
               "t grid point ", i, " is ", cfg.t_grid[i]);
    }
    auto rows = eval::run_t_sweep(cfg.scenario, cfg.t_grid, env.jobs);
    expect(rows.size() == 11, "expected 11 rows");
    for (const auto& r : rows) {
        expect(std::isfinite(r.score_mean) && std::isfinite(r.ppl_mean),
               "non-finite row at t = ", r.param);
    }
    const double zero_grid[] = {0.0};
    auto reference = eval::run_t_sweep(cfg.scenario, zero_grid, env.jobs);
    expect(rows[0] == reference[0], "t = 0 row differs from the disabled-term run");
    std::ostringstream out;
    out << "11 rows; t = 0 row identical to the disabled-term run";
    return out.str();
}

std::string determinism(Env& env) {
    // Byte-identical reports across reruns of every report-writing subcommand.
    const struct {
        const char* name;
        std::string args;
    } runs[] = {
        {"sweep-s csv", "sweep-s --config " + (env.configs / "sweep_s.json").string()},
        {"sweep-s json", "sweep-s --format json --config " +
                             (env.configs / "sweep_s.json").string()},
        {"sweep-t csv", "sweep-t --config " + (env.configs / "sweep_t.json").string()},
        {"conflict csv", "conflict-eval --config " + (env.configs / "conflict.json").string()},
        {"train-ngram", "train-ngram --config " +
                            (env.configs / "train_ngram.json").string()},
        {"generate trace", "generate --trace --config " +
                               (env.configs / "generate.json").string()},
        {"verify report", "verify --seed 5"},
    };
    int compared = 0;
    for (const auto& run : runs) {
        const fs::path a = env.scratch / ("det_a_" + std::to_string(compared));
        const fs::path b = env.scratch / ("det_b_" + std::to_string(compared));
        run_cli(env, run.args + " --out " + a.string());
        run_cli(env, run.args + " --out " + b.string());
        expect(read_file(a) == read_file(b), run.name, ": reruns differ");
        ++compared;
    }

    // Uniform reference perplexity is the vocabulary size, exactly.
    std::vector<std::string> toks;
    for (int i = 0; i < 8; ++i) toks.push_back("t" + std::to_string(i));
    auto v = Vocabulary::from_tokens(toks);
    TabularModel uniform(v, 0, {}, TokenDistribution::uniform(v));
    const int32_t seq[] = {0, 1, 2, 3, 4, 5, 6, 7, 3};
    const double ppl = perplexity(uniform, seq, Context{});
    expect(ppl == 8.0, "uniform perplexity ", ppl, " != 8");

    std::ostringstream out;
    out << compared << " subcommands byte-identical across reruns; uniform perplexity exact";
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: palette_acceptance <cli-binary> <configs-dir>\n";
        return 2;
    }
    Env env;
    env.cli = argv[1];
    env.configs = argv[2];
    env.scratch = fs::temp_directory_path() /
                  ("palette-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(env.scratch);

    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<std::string(Env&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "identity-suite", 1.0, identity_suite},
        {2, "strength-monotonicity", 30.0, strength_monotonicity},
        {3, "enhancement-dominance", 5.0, enhancement_dominance},
        {4, "ratio-and-kernel-grids", 30.0, ratio_and_kernel},
        {5, "log-convexity", 5.0, convexity},
        {6, "factorization-residuals", 10.0, factorization_residuals},
        {7, "coefficient-bounds", 10.0, coefficient_bounds},
        {8, "strength-score-trend", 120.0, strength_trend},
        {9, "conflict-dominance", 180.0, conflict_table},
        {10, "same-trend-dampening", 180.0, same_trend_increase},
        {11, "complement-sweep-reference", 120.0, t_sweep_reference},
        {12, "determinism", 120.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            detail = c.run(env);
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (pass && elapsed > c.budget_s) {
            pass = false;
            detail = "runtime " + std::to_string(elapsed) + "s exceeds the " +
                     std::to_string(c.budget_s) + "s budget";
        }
        if (!pass) ++failures;
        std::printf("[%s] %2d %-28s (%.2fs < %gs) %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    elapsed, c.budget_s, detail.c_str());
        std::fflush(stdout);
    }

    std::error_code ec;
    fs::remove_all(env.scratch, ec);
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
