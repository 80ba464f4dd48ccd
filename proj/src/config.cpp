#include "palette/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "palette/remote.hpp"

namespace palette {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { raise(Errc::config, what); }

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        bad(where + ": missing field '" + key + "'");
    }
    return obj.at(key);
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = require(obj, key, where);
    if (!v.is_string()) bad(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

double get_number(const json& obj, const std::string& key, const std::string& where,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        bad(where + ": missing field '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) bad(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> get_grid(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return {};
    const auto& v = obj.at(key);
    if (!v.is_array()) bad(where + ": field '" + key + "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) bad(where + ": field '" + key + "' must contain numbers only");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<int32_t> parse_tokens(const Vocabulary& vocab, const json& v,
                                  const std::string& where) {
    try {
        if (v.is_string()) return vocab.tokenize(v.get<std::string>());
        if (v.is_array()) {
            std::vector<int32_t> out;
            out.reserve(v.size());
            for (const auto& x : v) {
                if (!x.is_string()) bad(where + ": token entries must be strings");
                out.push_back(vocab.index_of(x.get<std::string>()));
            }
            return out;
        }
    } catch (const Error& e) {
        if (e.code() == Errc::unknown_token) bad(where + ": " + e.what());
        throw;
    }
    bad(where + ": expected a string or an array of token strings");
}

ModelPtr build_provider(const std::string& name, const json& spec, const VocabPtr& vocab,
                        const fs::path& base_dir) {
    const std::string where = "providers." + name;
    const std::string kind = get_string(spec, "kind", where);
    if (kind == "ngram") {
        const fs::path corpus = base_dir / get_string(spec, "corpus", where);
        const int order = static_cast<int>(get_number(spec, "order", where, 2.0));
        const double add_k = get_number(spec, "add_k", where, 1.0);
        return train_ngram(vocab, load_corpus(*vocab, corpus), order, add_k);
    }
    if (kind == "ngram_file") {
        const fs::path path = base_dir / get_string(spec, "path", where);
        std::ifstream in(path);
        if (!in) raise(Errc::io, where + ": cannot open model file " + path.string());
        return NGramModel::load(in, vocab);
    }
    if (kind == "tabular") {
        const auto context_len =
            static_cast<size_t>(get_number(spec, "context_len", where, 1.0));
        auto parse_dist = [&](const json& arr, const std::string& slot) {
            if (!arr.is_array()) bad(where + ": " + slot + " must be an array of numbers");
            std::vector<double> probs;
            probs.reserve(arr.size());
            for (const auto& x : arr) {
                if (!x.is_number()) bad(where + ": " + slot + " must contain numbers only");
                probs.push_back(x.get<double>());
            }
            return TokenDistribution(vocab, std::move(probs));
        };
        TokenDistribution default_dist = spec.contains("default")
                                             ? parse_dist(spec.at("default"), "default")
                                             : TokenDistribution::uniform(vocab);
        TabularModel::Table table;
        if (spec.contains("table")) {
            if (!spec.at("table").is_array()) bad(where + ": table must be an array");
            for (const auto& entry : spec.at("table")) {
                auto key = parse_tokens(*vocab, require(entry, "context", where + ".table"),
                                        where + ".table.context");
                table.emplace(std::move(key),
                              parse_dist(require(entry, "probs", where + ".table"), "probs"));
            }
        }
        return std::make_shared<TabularModel>(vocab, context_len, std::move(table),
                                              std::move(default_dist));
    }
    if (kind == "remote") {
        const std::string endpoint = get_string(spec, "endpoint", where);
        const auto timeout_ms =
            static_cast<int64_t>(get_number(spec, "timeout_ms", where, 5000.0));
        return std::make_shared<RemoteLogitClient>(vocab, endpoint,
                                                   std::chrono::milliseconds(timeout_ms));
    }
    bad(where + ": unknown provider kind '" + kind + "'");
}

}  // namespace

std::vector<std::vector<int32_t>> load_corpus(const Vocabulary& vocab, const fs::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::io, "cannot open corpus file " + path.string());
    std::vector<std::vector<int32_t>> sequences;
    std::string line;
    while (std::getline(in, line)) {
        auto toks = vocab.tokenize(line);
        if (!toks.empty()) sequences.push_back(std::move(toks));
    }
    return sequences;
}

RunConfig RunConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::config, "cannot open config file " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) bad(path.string() + " is not valid JSON");
    const fs::path base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");

    RunConfig cfg;
    cfg.vocab = Vocabulary::load(base_dir / get_string(doc, "vocabulary", "config"));

    if (doc.contains("providers")) {
        const auto& provs = doc.at("providers");
        if (!provs.is_object()) bad("config: providers must be an object");
        for (const auto& [name, spec] : provs.items()) {
            cfg.providers.emplace(name, build_provider(name, spec, cfg.vocab, base_dir));
        }
    }

    auto lookup_provider = [&](const std::string& name, const std::string& where) -> ModelPtr {
        auto it = cfg.providers.find(name);
        if (it == cfg.providers.end()) bad(where + ": provider '" + name + "' is not declared");
        return it->second;
    };

    cfg.scenario.vocab = cfg.vocab;
    if (doc.contains("base")) {
        cfg.scenario.base = lookup_provider(get_string(doc, "base", "config"), "config.base");
    }

    if (doc.contains("attributes")) {
        const auto& attrs = doc.at("attributes");
        if (!attrs.is_array()) bad("config: attributes must be an array");
        for (size_t i = 0; i < attrs.size(); ++i) {
            const auto& a = attrs[i];
            const std::string where = "attributes[" + std::to_string(i) + "]";
            AttributeSpec spec;
            spec.id = get_string(a, "id", where);
            ModelPtr model = lookup_provider(get_string(a, "provider", where), where);
            if (a.contains("prompt")) {
                model = attribute_view(std::move(model),
                                       parse_tokens(*cfg.vocab, a.at("prompt"), where + ".prompt"));
            }
            spec.model = std::move(model);
            spec.strength = get_number(a, "s", where, 1.0);
            spec.complement_strength = get_number(a, "s_comp", where, spec.strength);
            if (a.contains("sign")) {
                const std::string sign = get_string(a, "sign", where);
                if (sign == "main") {
                    spec.sign = AttributeSign::main;
                } else if (sign == "anti") {
                    spec.sign = AttributeSign::anti;
                } else {
                    bad(where + ".sign: expected 'main' or 'anti'");
                }
            }
            if (a.contains("attribute_tokens")) {
                spec.attribute_tokens = parse_tokens(*cfg.vocab, a.at("attribute_tokens"),
                                                     where + ".attribute_tokens");
            }
            cfg.scenario.attributes.push_back(std::move(spec));
        }
    }

    if (doc.contains("combination")) {
        const auto& comb = doc.at("combination");
        const std::string mode = comb.contains("mode") ? get_string(comb, "mode", "combination")
                                                       : "sigmoid";
        if (mode == "exact") {
            cfg.scenario.mode = CombineMode::exact;
        } else if (mode == "sigmoid") {
            cfg.scenario.mode = CombineMode::sigmoid;
        } else {
            bad("combination.mode: expected 'exact' or 'sigmoid'");
        }
        const std::string scale = comb.contains("scale")
                                      ? get_string(comb, "scale", "combination")
                                      : "normalized";
        if (scale == "normalized") {
            cfg.scenario.scale = CombineScale::normalized;
        } else if (scale == "canonical") {
            cfg.scenario.scale = CombineScale::canonical;
        } else {
            bad("combination.scale: expected 'normalized' or 'canonical'");
        }
        cfg.scenario.t = get_number(comb, "t", "combination", 0.0);
    }

    if (doc.contains("sampler")) {
        const auto& s = doc.at("sampler");
        const std::string kind = s.contains("kind") ? get_string(s, "kind", "sampler")
                                                    : "temperature";
        if (kind == "greedy") {
            cfg.scenario.sampler.kind = SamplerKind::greedy;
        } else if (kind == "temperature") {
            cfg.scenario.sampler.kind = SamplerKind::temperature;
        } else if (kind == "top_k") {
            cfg.scenario.sampler.kind = SamplerKind::top_k;
        } else if (kind == "top_p") {
            cfg.scenario.sampler.kind = SamplerKind::top_p;
        } else {
            bad("sampler.kind: expected greedy|temperature|top_k|top_p");
        }
        cfg.scenario.sampler.temperature = get_number(s, "temperature", "sampler", 1.0);
        cfg.scenario.sampler.k = static_cast<int32_t>(get_number(s, "k", "sampler", 1.0));
        cfg.scenario.sampler.p = get_number(s, "p", "sampler", 1.0);
        try {
            cfg.scenario.sampler.validate();
        } catch (const Error& e) {
            bad(std::string("sampler: ") + e.what());
        }
    }

    if (doc.contains("scenario")) {
        const auto& sc = doc.at("scenario");
        if (sc.contains("prompt")) {
            cfg.scenario.prompt =
                Context(parse_tokens(*cfg.vocab, sc.at("prompt"), "scenario.prompt"));
        }
        cfg.scenario.max_tokens =
            static_cast<int>(get_number(sc, "max_tokens", "scenario", 24.0));
        cfg.scenario.generations_per_point =
            static_cast<int>(get_number(sc, "generations_per_point", "scenario", 50.0));
        cfg.scenario.swept_attribute =
            static_cast<size_t>(get_number(sc, "swept_attribute", "scenario", 0.0));
        cfg.s_grid = get_grid(sc, "s_grid", "scenario");
        cfg.t_grid = get_grid(sc, "t_grid", "scenario");
        cfg.ratio_grid = get_grid(sc, "ratio_grid", "scenario");
        if (sc.contains("lexicon")) {
            const auto& lex = sc.at("lexicon");
            if (!lex.is_object()) bad("scenario.lexicon must be an object of token -> polarity");
            for (const auto& [tok, pol] : lex.items()) {
                if (!pol.is_number_integer()) {
                    bad("scenario.lexicon." + tok + ": polarity must be an integer");
                }
                if (!cfg.vocab->find(tok)) {
                    bad("scenario.lexicon." + tok + ": token not in the vocabulary");
                }
                cfg.scenario.scorer.polarity[tok] = pol.get<int>();
            }
        }
        if (sc.contains("strategies")) {
            const auto& strats = sc.at("strategies");
            if (!strats.is_array()) bad("scenario.strategies must be an array");
            for (const auto& s : strats) {
                const std::string name = s.is_string() ? s.get<std::string>() : "";
                if (name == "palette") {
                    cfg.strategies.push_back(eval::StrategyKind::palette);
                } else if (name == "linear") {
                    cfg.strategies.push_back(eval::StrategyKind::linear);
                } else if (name == "union") {
                    cfg.strategies.push_back(eval::StrategyKind::union_deduct);
                } else {
                    bad("scenario.strategies: expected palette|linear|union");
                }
            }
        }
    }
    if (cfg.strategies.empty()) {
        cfg.strategies = {eval::StrategyKind::palette, eval::StrategyKind::linear,
                          eval::StrategyKind::union_deduct};
    }

    cfg.scenario.master_seed =
        static_cast<uint64_t>(get_number(doc, "seed", "config", 0.0));
    if (doc.contains("output")) {
        cfg.output = base_dir / get_string(doc, "output", "config");
    }
    if (doc.contains("format")) {
        const std::string f = get_string(doc, "format", "config");
        if (f == "csv") {
            cfg.format = eval::ReportFormat::tabular;
        } else if (f == "json") {
            cfg.format = eval::ReportFormat::structured;
        } else {
            bad("config.format: expected 'csv' or 'json'");
        }
    }

    if (doc.contains("train")) {
        const auto& tr = doc.at("train");
        TrainSpec spec;
        spec.corpus = base_dir / get_string(tr, "corpus", "train");
        spec.order = static_cast<int>(get_number(tr, "order", "train", 2.0));
        spec.add_k = get_number(tr, "add_k", "train", 1.0);
        if (tr.contains("output")) spec.output = base_dir / get_string(tr, "output", "train");
        cfg.train = std::move(spec);
    }

    // Surface validation problems (bad strengths, vocab mismatches) now
    // rather than mid-run.
    if (cfg.scenario.base) {
        PaletteConfig pc{cfg.scenario.base, cfg.scenario.attributes, cfg.scenario.t,
                         cfg.scenario.mode, cfg.scenario.scale};
        pc.validate();
    } else if (!cfg.scenario.attributes.empty()) {
        bad("config: attributes declared without a base model");
    }
    return cfg;
}

}  // namespace palette
