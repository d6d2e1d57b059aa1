// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "oracles/fuzzy_oracle.hpp"
#include "qqmatch/embedding_store.hpp"
#include "qqmatch/errors.hpp"
#include "qqmatch/fuzzy_match.hpp"
#include "support.hpp"

namespace {

using namespace qqmatch;

struct RandomVocab {
    std::vector<std::string> words;  // in table
    std::vector<std::string> oov;    // not in table
    EmbeddingTable table{8};
    oracle::Vocabulary oracle_vocab;
};

RandomVocab make_vocab(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    RandomVocab v;
    const std::vector<std::string> stems = {"fee", "cost", "trade", "fund", "stock", "share", "bond",
                                            "rate", "cash", "loan"};
    const std::vector<std::string> suffixes = {"", "s", "d", "ing", "er"};
    for (const auto& s : stems) {
        for (const auto& x : suffixes) {
            v.words.push_back(s + x);
        }
    }
    for (const auto& w : v.words) {
        std::vector<double> e(8);
        double n = 0.0;
        for (auto& x : e) {
            x = normal(rng);
            n += x * x;
        }
        for (auto& x : e) {
            x /= std::sqrt(n);
        }
        v.table.add(w, e);
        v.oracle_vocab[w] = e;
    }
    v.oov = {"fess", "cots", "trde", "fnd", "stok", "xqz"};
    return v;
}

TokenSet random_set(std::mt19937_64& rng, const RandomVocab& v, std::size_t max_size)
{
    TokenSet s;
    const std::size_t n = 1 + rng() % max_size;
    while (s.size() < n) {
        if (rng() % 6 == 0) {
            s.insert(v.oov[rng() % v.oov.size()]);
        } else {
            s.insert(v.words[rng() % v.words.size()]);
        }
    }
    return s;
}

TEST(EditDistance, MatchesOracleAndKnownValues)
{
    EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
    EXPECT_EQ(edit_distance("", "abc"), 3u);
    EXPECT_EQ(edit_distance("factnol", "fractional"), 4u);
    EXPECT_DOUBLE_EQ(norm_levenshtein("factnol", "fractional"), 0.4);
    EXPECT_EQ(norm_levenshtein("", ""), 0.0);
    std::mt19937_64 rng(17);
    for (int n = 0; n < 2000; ++n) {
        std::string a;
        std::string b;
        for (std::size_t i = rng() % 9; i > 0; --i) {
            a += static_cast<char>('a' + rng() % 4);
        }
        for (std::size_t i = rng() % 9; i > 0; --i) {
            b += static_cast<char>('a' + rng() % 4);
        }
        ASSERT_EQ(edit_distance(a, b), oracle::levenshtein(a, b)) << a << " / " << b;
        EXPECT_EQ(edit_distance(a, b), edit_distance(b, a));
    }
}

TEST(ScaledCosine, RequiresBothWordsInTable)
{
    const auto v = make_vocab(1);
    EXPECT_THROW(scaled_cosine("fee", "xqz", v.table), ContractError);
    EXPECT_NEAR(scaled_cosine("fee", "fee", v.table), 1.0, 1e-12);
}

TEST(FuzzyRatio, AgreesWithLineByLineOracle)
{
    const auto v = make_vocab(20201210);
    const FuzzyConfig config;
    std::mt19937_64 rng(99);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int with_partial = 0;
    for (int n = 0; n < 1000; ++n) {
        auto s1 = random_set(rng, v, 8);
        auto s2 = random_set(rng, v, 8);
        if (n % 2 == 0) {
            s2.insert(*s1.begin());  // force an overlap half of the time
        }
        const auto got = fuzzy_intersection_ratio(s1, s2, config, v.table);
        const double want =
            oracle::fuzzy_set_ratio(s1, s2, config.threshold1, config.threshold2, v.oracle_vocab);
        worst = std::max(worst, std::abs(got.score - want));
        with_partial += got.partial_overlap > 0.0;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LE(worst, 1e-9);
    EXPECT_GT(with_partial, 100);
    EXPECT_LT(seconds, 5.0);
}

TEST(FuzzyRatio, BoundsGateAndEquality)
{
    const auto v = make_vocab(5);
    const FuzzyConfig config;
    std::mt19937_64 rng(123);
    for (int n = 0; n < 10000; ++n) {
        const auto s1 = random_set(rng, v, 7);
        auto s2 = n % 5 == 0 ? s1 : random_set(rng, v, 7);
        const auto r = fuzzy_intersection_ratio(s1, s2, config, v.table);
        ASSERT_GE(r.score, 0.0);
        ASSERT_LE(r.score, 1.0);
        bool overlap = false;
        for (const auto& w : s1) {
            overlap = overlap || s2.contains(w);
        }
        ASSERT_EQ(r.score == 0.0, !overlap);
        ASSERT_EQ(r.score == 1.0, s1 == s2);
    }
}

TEST(FuzzyRatio, MatchedWordMayBeReusedButIsCountedOnce)
{
    EmbeddingTable t(2);
    const FuzzyConfig config;
    // "fees" is the first close word for both "fee" and "feed".
    const TokenSet s1 = {"what", "fee", "feed"};
    const TokenSet s2 = {"what", "fees"};
    const auto r = fuzzy_intersection_ratio(s1, s2, config, t);
    ASSERT_EQ(r.matched_pairs.size(), 2u);
    EXPECT_EQ(r.matched_pairs[0].word2, "fees");
    EXPECT_EQ(r.matched_pairs[1].word2, "fees");
    const double partial = 0.75 + 0.75;
    EXPECT_NEAR(r.score, (1.0 + partial) / (1.0 + 2.0 + 0.0 + 0.0), 1e-15);
    oracle::Vocabulary empty;
    EXPECT_NEAR(r.score, oracle::fuzzy_set_ratio(s1, s2, 0.6, 0.55, empty), 1e-15);
}

TEST(FuzzyRatio, NoOverlapIsZero)
{
    EmbeddingTable t(2);
    const auto r = fuzzy_intersection_ratio({"zebra", "quantum"}, {"what", "fees"}, {}, t);
    EXPECT_EQ(r.score, 0.0);
    EXPECT_TRUE(r.matched_pairs.empty());
    EXPECT_EQ(fuzzy_intersection_ratio({}, {}, {}, t).score, 0.0);
}

class FractionalTradingScenario : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        const auto& world = testing_support::fixture_world();
        std::ifstream in(testing_support::fixtures_dir() / "scenario_expected.json");
        expected_ = new nlohmann::json(nlohmann::json::parse(in));
        query_ = new TokenSet(preprocess((*expected_)["query"].get<std::string>(),
                                         world.resources.normalization).fuzzy_token_set);
    }
    static void TearDownTestSuite()
    {
        delete expected_;
        delete query_;
    }
    static nlohmann::json* expected_;
    static TokenSet* query_;
};

nlohmann::json* FractionalTradingScenario::expected_ = nullptr;
TokenSet* FractionalTradingScenario::query_ = nullptr;

TEST_F(FractionalTradingScenario, TraceFollowsTheWorkedExample)
{
    const auto& world = testing_support::fixture_world();
    const auto target = preprocess("What are fees or charges for fractional trading?",
                                   world.resources.normalization);
    const auto r = fuzzy_intersection_ratio(*query_, target.fuzzy_token_set, world.resources.fuzzy,
                                            *world.resources.embeddings);
    EXPECT_EQ(r.exact_overlap_count, 3u);
    bool cost_semantic = false;
    bool factnol_syntactic = false;
    for (const auto& m : r.matched_pairs) {
        if (m.word1 == "cost") {
            cost_semantic = m.kind == MatchKind::semantic && (m.word2 == "charges" || m.word2 == "fees");
        }
        if (m.word1 == "factnol") {
            factnol_syntactic = m.kind == MatchKind::syntactic && m.word2 == "fractional" &&
                                std::abs(m.pair_score - 0.6) < 1e-12;
        }
    }
    EXPECT_TRUE(cost_semantic);
    EXPECT_TRUE(factnol_syntactic);
}

TEST_F(FractionalTradingScenario, ScoresMatchFrozenOracleValuesAndTargetWins)
{
    const auto& world = testing_support::fixture_world();
    oracle::Vocabulary vocab;
    const auto& table = *world.resources.embeddings;
    for (std::size_t r = 0; r < table.size(); ++r) {
        const auto row = table.row(r);
        vocab[table.tokens()[r]] = std::vector<double>(row.begin(), row.end());
    }
    const std::string target_id = (*expected_)["target"];
    const auto& frozen = (*expected_)["scores"];
    double target_score = -1.0;
    std::size_t rivals = 0;
    std::vector<double> rival_scores;
    for (const auto& rec : world.corpus) {
        const auto cand = preprocess(rec.question, world.resources.normalization).fuzzy_token_set;
        const double got = fuzzy_intersection_ratio(*query_, cand, world.resources.fuzzy, table).score;
        EXPECT_NEAR(got, frozen[rec.id].get<double>(), 1e-12) << rec.id;
        EXPECT_NEAR(got, oracle::fuzzy_set_ratio(*query_, cand, 0.6, 0.55, vocab), 1e-12) << rec.id;
        if (rec.id == target_id) {
            target_score = got;
        } else {
            rival_scores.push_back(got);
            ++rivals;
        }
    }
    EXPECT_GE(rivals, 10u);
    for (const double s : rival_scores) {
        EXPECT_LT(s, target_score);
    }
}

} // namespace
