#include <doctest.h>

#include <cmath>
#include <random>

#include "palette/baselines.hpp"

using namespace palette;

namespace {

VocabPtr make_vocab(int n) {
    std::vector<std::string> toks;
    for (int i = 0; i < n; ++i) toks.push_back("t" + std::to_string(i));
    return Vocabulary::from_tokens(std::move(toks));
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("single unit-weight term is the identity") {
    auto v = make_vocab(3);
    auto d = TokenDistribution(v, {0.2, 0.5, 0.3});
    const double w = 1.0;
    auto out = weighted_log_linear(std::span(&d, 1), std::span(&w, 1));
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(out.prob(i) - d.prob(i)) <= 1e-12);
    }
}

TEST_CASE("negative weights deduct a term") {
    auto v = make_vocab(2);
    const TokenDistribution dists[] = {TokenDistribution(v, {0.5, 0.5}),
                                       TokenDistribution(v, {0.9, 0.1})};
    const double weights[] = {1.0, -0.6};
    auto out = weighted_log_linear(dists, weights);
    CHECK(out.prob(0) == doctest::Approx(0.21109548169995915).epsilon(1e-12));
    CHECK(out.prob(1) == doctest::Approx(0.7889045183000408).epsilon(1e-12));
}

TEST_CASE("all-zero weights yield the uniform distribution") {
    auto v = make_vocab(4);
    const TokenDistribution dists[] = {TokenDistribution(v, {0.7, 0.1, 0.1, 0.1}),
                                       TokenDistribution(v, {0.1, 0.7, 0.1, 0.1})};
    const double weights[] = {0.0, 0.0};
    auto out = weighted_log_linear(dists, weights);
    for (int i = 0; i < 4; ++i) CHECK(out.prob(i) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("weighted combination error paths") {
    auto v = make_vocab(2);
    try {
        weighted_log_linear({}, {});
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_terms);
    }
    const TokenDistribution mixed[] = {TokenDistribution(v, {0.5, 0.5}),
                                       TokenDistribution(make_vocab(2), {0.5, 0.5})};
    const double weights[] = {1.0, 1.0};
    try {
        weighted_log_linear(mixed, weights);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::vocab_mismatch);
    }
    const TokenDistribution one[] = {TokenDistribution(v, {0.5, 0.5})};
    const double bad_w[] = {INFINITY};
    CHECK_THROWS_AS(weighted_log_linear(one, bad_w), Error);
}

TEST_CASE("model-level formulas mix queried distributions") {
    auto v = make_vocab(2);
    auto m1 = std::make_shared<TabularModel>(v, 0, TabularModel::Table{},
                                             TokenDistribution(v, {0.5, 0.5}));
    auto m2 = std::make_shared<TabularModel>(v, 0, TabularModel::Table{},
                                             TokenDistribution(v, {0.9, 0.1}));
    WeightedFormula formula{{{m1, 1.0}, {m2, -0.6}}};
    auto out = formula.evaluate(Context{});
    CHECK(out.prob(0) == doctest::Approx(0.21109548169995915).epsilon(1e-12));

    WeightedFormula empty;
    CHECK_THROWS_AS(empty.validate(), Error);
    auto other_vocab = make_vocab(2);
    auto alien = std::make_shared<TabularModel>(other_vocab, 0, TabularModel::Table{},
                                                TokenDistribution::uniform(other_vocab));
    WeightedFormula mixed{{{m1, 1.0}, {alien, 1.0}}};
    CHECK_THROWS_AS(mixed.validate(), Error);
}

TEST_CASE("union of a distribution with itself") {
    auto v = make_vocab(3);
    auto d = TokenDistribution(v, {0.5, 0.3, 0.2});
    auto out = union_combine(d, d);
    for (int i = 0; i < 3; ++i) CHECK(out.prob(i) == doctest::Approx(d.prob(i)).epsilon(1e-12));
}

TEST_CASE("union takes the token-wise max and renormalizes") {
    auto v = make_vocab(3);
    auto out = union_combine(TokenDistribution(v, {0.7, 0.2, 0.1}),
                             TokenDistribution(v, {0.1, 0.6, 0.3}));
    CHECK(out.prob(0) == doctest::Approx(0.4375).epsilon(1e-12));
    CHECK(out.prob(1) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(out.prob(2) == doctest::Approx(0.1875).epsilon(1e-12));

    auto v2 = make_vocab(2);
    auto sym = union_combine(TokenDistribution(v2, {0.8, 0.2}),
                             TokenDistribution(v2, {0.2, 0.8}));
    CHECK(sym.prob(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("union is commutative") {
    std::mt19937_64 rng(3);
    auto v = make_vocab(6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p1(6), p2(6);
        for (auto& x : p1) x = 0.01 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
        for (auto& x : p2) x = 0.01 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
        auto a = TokenDistribution(v, p1);
        auto b = TokenDistribution(v, p2);
        CHECK(union_combine(a, b).probs() == union_combine(b, a).probs());
    }
}

TEST_CASE("classifier reweighting") {
    auto v = make_vocab(2);
    auto base = TokenDistribution(v, {0.5, 0.5});

    const double scores[] = {0.9, 0.1};
    auto out = classifier_guided(base, scores);
    CHECK(out.prob(0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(out.prob(1) == doctest::Approx(0.1).epsilon(1e-12));

    // A constant score vector changes nothing.
    const double flat[] = {0.4, 0.4};
    auto same = classifier_guided(base, flat);
    CHECK(same.prob(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("indicator scores are exact conditioning") {
    auto v = make_vocab(4);
    auto base = TokenDistribution(v, {0.4, 0.3, 0.2, 0.1});
    const double indicator[] = {1.0, 0.0, 1.0, 0.0};
    auto out = classifier_guided(base, indicator);
    CHECK(out.prob(0) == doctest::Approx(0.4 / 0.6).epsilon(1e-9));
    CHECK(out.prob(2) == doctest::Approx(0.2 / 0.6).epsilon(1e-9));
    CHECK(out.prob(1) <= kProbEpsilon * 2);
}

TEST_CASE("classifier error paths") {
    auto v = make_vocab(2);
    auto base = TokenDistribution(v, {0.5, 0.5});
    const double zeros[] = {0.0, 0.0};
    try {
        classifier_guided(base, zeros);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_product);
    }
    const double out_of_range[] = {1.5, 0.5};
    CHECK_THROWS_AS(classifier_guided(base, out_of_range), Error);
    const double short_vec[] = {1.0};
    CHECK_THROWS_AS(classifier_guided(base, short_vec), Error);
}

}  // TEST_SUITE
