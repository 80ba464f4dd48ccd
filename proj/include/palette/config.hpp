#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "palette/eval.hpp"
#include "palette/report.hpp"

namespace palette {

/// Corpus/order/add_k request for the train-ngram subcommand.
struct TrainSpec {
    std::filesystem::path corpus;
    int order = 2;
    double add_k = 1.0;
    std::filesystem::path output;
};

/// A fully validated experiment configuration. All knobs live in one JSON
/// file; the CLI only overrides seed, output path and parallelism. Relative
/// paths resolve against the config file's directory.
struct RunConfig {
    VocabPtr vocab;
    std::map<std::string, ModelPtr> providers;
    eval::Scenario scenario;

    std::vector<double> s_grid;
    std::vector<double> t_grid;
    std::vector<double> ratio_grid;
    std::vector<eval::StrategyKind> strategies;

    std::filesystem::path output;
    eval::ReportFormat format = eval::ReportFormat::tabular;
    std::optional<TrainSpec> train;

    /// Parses and validates; every error is Errc::config (or Errc::io) and
    /// names the offending field or path.
    static RunConfig load(const std::filesystem::path& path);
};

/// Loads a whitespace-tokenized UTF-8 corpus file as one sequence per line.
std::vector<std::vector<int32_t>> load_corpus(const Vocabulary& vocab,
                                              const std::filesystem::path& path);

}  // namespace palette
