#include <doctest.h>

#include <cmath>
#include <random>

#include "palette/decode.hpp"

using namespace palette;

namespace {

VocabPtr vocab_ab() { return Vocabulary::from_tokens({"a", "b"}); }

ModelPtr constant_model(const VocabPtr& v, std::vector<double> probs) {
    return std::make_shared<TabularModel>(v, 0, TabularModel::Table{},
                                          TokenDistribution(v, std::move(probs)));
}

/// a -> b -> a -> b ... chain.
ModelPtr flip_chain(const VocabPtr& v) {
    TabularModel::Table table;
    table.emplace(std::vector<int32_t>{0}, TokenDistribution(v, {0.0, 1.0}));
    table.emplace(std::vector<int32_t>{1}, TokenDistribution(v, {1.0, 0.0}));
    return std::make_shared<TabularModel>(v, 1, std::move(table),
                                          TokenDistribution::uniform(v));
}

StepFn model_strategy(ModelPtr m) {
    return [m = std::move(m)](const Context& ctx) -> StepOutput {
        return {m->next_distribution(ctx), std::nullopt};
    };
}

}  // namespace

TEST_SUITE("decode") {

TEST_CASE("zero max_tokens yields an empty trace") {
    auto v = vocab_ab();
    auto trace = generate(model_strategy(constant_model(v, {0.5, 0.5})), Context{}, 0,
                          SamplerConfig{SamplerKind::greedy});
    CHECK(trace.tokens.empty());
    CHECK(trace.step_distributions.empty());
}

TEST_CASE("greedy walk over a deterministic chain") {
    auto v = vocab_ab();
    auto trace = generate(model_strategy(flip_chain(v)), Context({0}), 3,
                          SamplerConfig{SamplerKind::greedy});
    CHECK(trace.tokens == std::vector<int32_t>{1, 0, 1});
    CHECK(trace.step_distributions.size() == 3);
}

TEST_CASE("greedy ignores the seed") {
    auto v = vocab_ab();
    SamplerConfig s1{SamplerKind::greedy};
    s1.seed = 1;
    SamplerConfig s2{SamplerKind::greedy};
    s2.seed = 999;
    auto t1 = generate(model_strategy(flip_chain(v)), Context({0}), 5, s1);
    auto t2 = generate(model_strategy(flip_chain(v)), Context({0}), 5, s2);
    CHECK(t1.tokens == t2.tokens);
}

TEST_CASE("equal seeds reproduce the trace bit for bit") {
    auto v = vocab_ab();
    SamplerConfig sampler{SamplerKind::temperature};
    sampler.temperature = 1.3;
    sampler.seed = 42;
    auto t1 = generate(model_strategy(constant_model(v, {0.6, 0.4})), Context{}, 32, sampler);
    auto t2 = generate(model_strategy(constant_model(v, {0.6, 0.4})), Context{}, 32, sampler);
    CHECK(t1.tokens == t2.tokens);
    sampler.seed = 43;
    auto t3 = generate(model_strategy(constant_model(v, {0.6, 0.4})), Context{}, 32, sampler);
    CHECK(t1.tokens != t3.tokens);  // different stream for a different seed
}

TEST_CASE("trace replays step by step") {
    auto v = vocab_ab();
    auto strategy = model_strategy(flip_chain(v));
    SamplerConfig sampler{SamplerKind::temperature};
    sampler.seed = 5;
    auto trace = generate(strategy, Context({1}), 8, sampler);
    Context ctx({1});
    for (size_t i = 0; i < trace.tokens.size(); ++i) {
        auto replayed = strategy(ctx);
        CHECK(replayed.dist.probs() == trace.step_distributions[i].probs());
        ctx.tokens.push_back(trace.tokens[i]);
    }
}

TEST_CASE("generation stops after the end-of-text token") {
    auto v = Vocabulary::from_tokens({"a", "<eot>"});
    auto always_eot = constant_model(v, {0.0, 1.0});
    auto trace = generate(model_strategy(always_eot), Context{}, 10,
                          SamplerConfig{SamplerKind::greedy});
    CHECK(trace.tokens == std::vector<int32_t>{1});
}

TEST_CASE("provider failures carry the step index") {
    auto v = vocab_ab();
    StepFn failing = [&](const Context& ctx) -> StepOutput {
        if (ctx.tokens.size() >= 2) raise(Errc::transport, "backend gone");
        return {TokenDistribution::uniform(v), std::nullopt};
    };
    try {
        generate(failing, Context{}, 5, SamplerConfig{SamplerKind::greedy});
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::transport);
        CHECK(std::string(e.what()).find("step 2") != std::string::npos);
    }
}

TEST_CASE("sampler validation") {
    auto v = vocab_ab();
    auto d = TokenDistribution::uniform(v);
    std::mt19937_64 rng(1);
    SamplerConfig bad{SamplerKind::temperature};
    bad.temperature = 0.0;
    CHECK_THROWS_AS(sample_token(d, bad, rng), Error);
    SamplerConfig bad_k{SamplerKind::top_k};
    bad_k.k = 0;
    CHECK_THROWS_AS(sample_token(d, bad_k, rng), Error);
    SamplerConfig bad_p{SamplerKind::top_p};
    bad_p.p = 0.0;
    CHECK_THROWS_AS(sample_token(d, bad_p, rng), Error);
    CHECK_THROWS_AS(generate(model_strategy(constant_model(v, {0.5, 0.5})), Context{}, -1,
                             SamplerConfig{SamplerKind::greedy}),
                    Error);
}

TEST_CASE("top-k=1 always picks the argmax") {
    auto v = Vocabulary::from_tokens({"a", "b", "c"});
    auto d = TokenDistribution(v, {0.2, 0.5, 0.3});
    std::mt19937_64 rng(77);
    SamplerConfig sampler{SamplerKind::top_k};
    sampler.k = 1;
    for (int i = 0; i < 50; ++i) CHECK(sample_token(d, sampler, rng) == 1);
}

TEST_CASE("tight top-p keeps only the head of the distribution") {
    auto v = Vocabulary::from_tokens({"a", "b", "c"});
    auto d = TokenDistribution(v, {0.9, 0.05, 0.05});
    std::mt19937_64 rng(78);
    SamplerConfig sampler{SamplerKind::top_p};
    sampler.p = 0.5;
    for (int i = 0; i < 50; ++i) CHECK(sample_token(d, sampler, rng) == 0);
}

TEST_CASE("samplers cover the support at temperature 1") {
    auto v = vocab_ab();
    auto d = TokenDistribution(v, {0.5, 0.5});
    std::mt19937_64 rng(79);
    SamplerConfig sampler{SamplerKind::temperature};
    int seen[2] = {0, 0};
    for (int i = 0; i < 200; ++i) ++seen[sample_token(d, sampler, rng)];
    CHECK(seen[0] > 50);
    CHECK(seen[1] > 50);
}

TEST_CASE("perplexity of a uniform reference is the vocabulary size, exactly") {
    std::vector<std::string> toks;
    for (int i = 0; i < 8; ++i) toks.push_back("t" + std::to_string(i));
    auto v = Vocabulary::from_tokens(toks);
    auto uniform = constant_model(v, std::vector<double>(8, 0.125));
    const int32_t seq[] = {0, 3, 5, 7, 1};
    CHECK(perplexity(*uniform, seq, Context{}) == 8.0);
}

TEST_CASE("perplexity of a deterministic reference on its own output is one") {
    auto v = vocab_ab();
    auto chain = flip_chain(v);
    auto trace = generate(model_strategy(chain), Context({0}), 6,
                          SamplerConfig{SamplerKind::greedy});
    const double ppl = perplexity(*chain, trace.tokens, Context({0}));
    CHECK(ppl == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("perplexity of a skewed unigram") {
    auto v = vocab_ab();
    auto m = constant_model(v, {0.75, 0.25});
    const int32_t seq[] = {0, 1};
    CHECK(perplexity(*m, seq, Context{}) == doctest::Approx(2.309401076758503).epsilon(1e-12));
}

TEST_CASE("perplexity preconditions and lower bound") {
    auto v = vocab_ab();
    auto m = constant_model(v, {0.6, 0.4});
    try {
        perplexity(*m, {}, Context{});
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_sequence);
    }
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<int32_t> seq;
        for (int i = 0; i < 1 + static_cast<int>(rng() % 8); ++i) {
            seq.push_back(static_cast<int32_t>(rng() % 2));
        }
        CHECK(perplexity(*m, seq, Context{}) >= 1.0);
    }
}

}  // TEST_SUITE
