// Command-line front end: generate / verify / sweep-s / sweep-t /
// conflict-eval / train-ngram, driven by a JSON config file. Flags only
// override seed, output, format and parallelism.

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "palette/config.hpp"
#include "palette/verify.hpp"

namespace {

using namespace palette;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerification = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::transport:
        case Errc::invalid_response:
        case Errc::schema_mismatch:
        case Errc::io:
            return kExitRuntime;
        default:
            return kExitConfig;
    }
}

struct CommonOpts {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
    auto* c = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
    if (needs_config) c->required();
    cmd->add_option("--seed", opts.seed, "override the config's master seed");
    cmd->add_option("--out", opts.out, "override the config's output path");
    cmd->add_option("--format", opts.format, "report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--jobs", opts.jobs, "worker threads for grid points");
}

RunConfig load_config(const CommonOpts& opts) {
    try {
        RunConfig cfg = RunConfig::load(opts.config_path);
        if (opts.seed) cfg.scenario.master_seed = *opts.seed;
        if (opts.out) cfg.output = *opts.out;
        if (opts.format) {
            cfg.format = *opts.format == "json" ? eval::ReportFormat::structured
                                                : eval::ReportFormat::tabular;
        }
        return cfg;
    } catch (const Error& e) {
        // Anything wrong at load time is a configuration problem (exit 1),
        // even when the root cause is a missing file.
        throw Error(Errc::config, e.what());
    }
}

void write_report(const RunConfig& cfg, const std::vector<eval::ReportRow>& rows) {
    const std::string bytes = eval::emit_report(rows, cfg.format);
    if (cfg.output.empty()) {
        std::cout << bytes;
        return;
    }
    write_file_atomic(cfg.output, bytes);
    std::cout << "wrote " << rows.size() << " rows to " << cfg.output.string() << "\n";
}

int cmd_generate(const CommonOpts& opts, bool with_trace) {
    RunConfig cfg = load_config(opts);
    if (!cfg.scenario.base) raise(Errc::config, "generate needs a base model");

    PaletteConfig pc{cfg.scenario.base, cfg.scenario.attributes, cfg.scenario.t,
                     cfg.scenario.mode, cfg.scenario.scale};
    SamplerConfig sampler = cfg.scenario.sampler;
    sampler.seed = cfg.scenario.master_seed;
    const GenerationTrace trace = generate(palette_strategy(std::move(pc)), cfg.scenario.prompt,
                                           cfg.scenario.max_tokens, sampler);
    std::cout << cfg.vocab->decode(trace.tokens) << "\n";

    if (!cfg.output.empty()) {
        nlohmann::ordered_json doc;
        doc["prompt"] = nlohmann::json::array();
        for (int32_t id : trace.prompt.tokens) doc["prompt"].push_back(cfg.vocab->token(id));
        doc["tokens"] = nlohmann::json::array();
        for (int32_t id : trace.tokens) doc["tokens"].push_back(cfg.vocab->token(id));
        doc["seed"] = sampler.seed;
        if (with_trace) {
            doc["steps"] = nlohmann::json::array();
            for (size_t i = 0; i < trace.step_distributions.size(); ++i) {
                nlohmann::ordered_json step;
                step["probs"] = trace.step_distributions[i].probs();
                if (i < trace.step_terms.size()) {
                    const auto& terms = trace.step_terms[i];
                    step["m1"] = terms.m1;
                    step["m2"] = terms.m2;
                    step["t"] = terms.t;
                    step["sign"] = terms.sign;
                    step["c"] = terms.c;
                    step["c_comp"] = terms.c_comp;
                }
                doc["steps"].push_back(std::move(step));
            }
        }
        write_file_atomic(cfg.output, doc.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_verify(const CommonOpts& opts) {
    verify::SuiteParams params;
    if (opts.seed) params.seed = *opts.seed;
    const auto results = verify::run_verification_suite(params);
    for (const auto& r : results) {
        const char* mark = r.pass ? "PASS" : "FAIL";
        if (!r.hard) mark = "INFO";
        std::cout << "[" << mark << "] " << r.name << ": " << r.detail << "\n";
    }
    const bool ok = verify::suite_passed(results);
    std::cout << (ok ? "verification passed" : "verification FAILED") << "\n";

    if (opts.out) {
        nlohmann::ordered_json doc;
        doc["seed"] = params.seed;
        doc["passed"] = ok;
        doc["claims"] = nlohmann::json::array();
        for (const auto& r : results) {
            doc["claims"].push_back({{"name", r.name},
                                     {"pass", r.pass},
                                     {"hard", r.hard},
                                     {"detail", r.detail}});
        }
        write_file_atomic(*opts.out, doc.dump(2) + "\n");
    }
    return ok ? kExitOk : kExitVerification;
}

int cmd_sweep_s(const CommonOpts& opts) {
    RunConfig cfg = load_config(opts);
    if (cfg.s_grid.empty()) raise(Errc::config, "scenario.s_grid is empty");
    const auto rows = eval::run_strength_sweep(cfg.scenario, cfg.s_grid, opts.jobs);
    write_report(cfg, rows);
    return kExitOk;
}

int cmd_sweep_t(const CommonOpts& opts) {
    RunConfig cfg = load_config(opts);
    if (cfg.t_grid.empty()) raise(Errc::config, "scenario.t_grid is empty");
    const auto rows = eval::run_t_sweep(cfg.scenario, cfg.t_grid, opts.jobs);
    write_report(cfg, rows);
    return kExitOk;
}

int cmd_conflict(const CommonOpts& opts) {
    RunConfig cfg = load_config(opts);
    if (cfg.ratio_grid.empty()) raise(Errc::config, "scenario.ratio_grid is empty");
    const auto table =
        eval::run_conflict_eval(cfg.scenario, cfg.strategies, cfg.ratio_grid, opts.jobs);
    write_report(cfg, table.rows);
    std::cout << "palette >= linear on " << eval::format_double(table.frac_palette_ge_linear)
              << " of grid points, >= union on "
              << eval::format_double(table.frac_palette_ge_union) << "\n";
    return kExitOk;
}

int cmd_train(const CommonOpts& opts) {
    RunConfig cfg = load_config(opts);
    if (!cfg.train) raise(Errc::config, "config has no train section");
    const TrainSpec& spec = *cfg.train;
    std::filesystem::path out = spec.output;
    if (opts.out) out = *opts.out;
    if (out.empty()) raise(Errc::config, "train-ngram needs an output path");

    const auto model =
        train_ngram(cfg.vocab, load_corpus(*cfg.vocab, spec.corpus), spec.order, spec.add_k);
    std::ostringstream buf;
    model->save(buf);
    write_file_atomic(out, buf.str());
    std::cout << "trained order-" << spec.order << " model (" << model->counts().size()
              << " histories) -> " << out.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"token-distribution combination workbench"};
    app.require_subcommand(1);

    CommonOpts generate_opts, verify_opts, sweep_s_opts, sweep_t_opts, conflict_opts, train_opts;
    bool with_trace = false;

    auto* generate = app.add_subcommand("generate", "one generation under the combined strategy");
    add_common(generate, generate_opts, true);
    generate->add_flag("--trace", with_trace, "include per-step distributions in --out");

    auto* verify = app.add_subcommand("verify", "run the numerical claim suite");
    add_common(verify, verify_opts, false);

    auto* sweep_s = app.add_subcommand("sweep-s", "strength sweep over scenario.s_grid");
    add_common(sweep_s, sweep_s_opts, true);

    auto* sweep_t = app.add_subcommand("sweep-t", "complement-coefficient sweep over t_grid");
    add_common(sweep_t, sweep_t_opts, true);

    auto* conflict = app.add_subcommand("conflict-eval",
                                        "strategy comparison over scenario.ratio_grid");
    add_common(conflict, conflict_opts, true);

    auto* train = app.add_subcommand("train-ngram", "train and serialize an n-gram model");
    add_common(train, train_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(generate_opts, with_trace);
        if (verify->parsed()) return cmd_verify(verify_opts);
        if (sweep_s->parsed()) return cmd_sweep_s(sweep_s_opts);
        if (sweep_t->parsed()) return cmd_sweep_t(sweep_t_opts);
        if (conflict->parsed()) return cmd_conflict(conflict_opts);
        if (train->parsed()) return cmd_train(train_opts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
