// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "qqmatch/meta_classifier.hpp"
#include "support.hpp"

namespace {

using nlohmann::json;
using testing_support::fixture_config_json;
using testing_support::run_cli;
using testing_support::TempDir;
using testing_support::write_fixture_config;

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        doc_ = fixture_config_json(dir_.path());
        config_ = write_fixture_config(dir_.path(), doc_).string();
    }

    testing_support::CommandResult run(std::vector<std::string> args)
    {
        args.insert(args.begin(), {"--config", config_});
        return run_cli(args);
    }

    void build_index()
    {
        const auto r = run({"index"});
        ASSERT_EQ(r.exit_code, 0) << r.err;
    }

    TempDir dir_;
    json doc_;
    std::string config_;
};

TEST_F(Cli, IndexPrintsSummary)
{
    const auto r = run({"index"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["count"], 25);
    EXPECT_EQ(j["mode"], "M1");
    EXPECT_EQ(j["dims"]["hidden"], 6);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "index.qqix"));
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
}

TEST_F(Cli, MissingCorpusExitsTwoNamingThePath)
{
    doc_["corpus"] = (dir_ / "no-corpus.jsonl").string();
    write_fixture_config(dir_.path(), doc_);
    const auto r = run({"index"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ(json::parse(r.err)["path"], (dir_ / "no-corpus.jsonl").string());
}

TEST_F(Cli, DuplicateIdsExitOneWithList)
{
    testing_support::write_text(dir_ / "dup.jsonl", R"({"id":"x1","question":"a"})" "\n"
                                                    R"({"id":"x1","question":"b"})" "\n");
    doc_["corpus"] = (dir_ / "dup.jsonl").string();
    write_fixture_config(dir_.path(), doc_);
    const auto r = run({"index"});
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(json::parse(r.err)["error"].get<std::string>().find("x1"), std::string::npos);
}

TEST_F(Cli, QuerySelfMatchAndEmptyQuery)
{
    build_index();
    const auto r = run({"query", "How do I add a beneficiary?"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["matches"][0]["id"], "q11");
    for (const auto& v : j["matches"][0]["features"]) {
        EXPECT_NEAR(v.get<double>(), 1.0, 1e-6);
    }
    const auto empty = run({"query", ""});
    EXPECT_EQ(empty.exit_code, 0);
    EXPECT_EQ(empty.out, "{\"answered\":false,\"matches\":[]}\n");
}

TEST_F(Cli, UsageErrors)
{
    build_index();
    EXPECT_EQ(run({"query", "x", "--top-k", "0"}).exit_code, 64);
    EXPECT_EQ(run({"query", "x", "--top-k", "-3"}).exit_code, 64);
    EXPECT_EQ(run({"query"}).exit_code, 64);
    EXPECT_EQ(run({"frobnicate"}).exit_code, 64);
    EXPECT_EQ(run_cli({"query", "x"}).exit_code, 64);
    EXPECT_EQ(run({"train-meta", "--mode", "M7", "--pairs", "x"}).exit_code, 64);
}

TEST_F(Cli, MissingIndexExitsTwo)
{
    const auto r = run({"query", "fees"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ(json::parse(r.err)["path"], (dir_ / "index.qqix").string());
}

TEST_F(Cli, ConfigFromEnvironment)
{
    build_index();
    const auto r = run_cli({"query", "What is margin trading?"}, "QQMATCH_CONFIG=" + testing_support::shell_quote(config_));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["matches"][0]["id"], "q14");
}

TEST_F(Cli, ScorePair)
{
    build_index();
    const auto r = run({"score-pair", "What is margin trading?", "What is margin trading?"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["label"], "similar");
}

TEST_F(Cli, TrainMetaWritesFeasibleModel)
{
    const auto model_path = dir_ / "trained.json";
    const auto r = run({"train-meta", "--pairs", (testing_support::fixtures_dir() / "pairs.tsv").string(),
                        "--out", model_path.string()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["mode"], "M1");
    EXPECT_TRUE(j["report"].contains("macro_f1"));
    const auto m = qqmatch::MetaClassifier::load(model_path);
    double balance = 0.0;
    for (const double c : m.dual_coefs) {
        EXPECT_LE(std::abs(c), m.C * (1 + 1e-12));
        balance += c;
    }
    EXPECT_LE(std::abs(balance), 1e-6);
    EXPECT_EQ(m.C, 0.2);
    EXPECT_EQ(m.kernel_params.degree, 2);

    const auto eval = run({"evaluate", "--pairs", (testing_support::fixtures_dir() / "pairs.tsv").string(),
                           "--model", model_path.string(), "--threshold", "0.5"});
    ASSERT_EQ(eval.exit_code, 0) << eval.err;
    EXPECT_EQ(json::parse(eval.out)["threshold"], 0.5);
}

TEST_F(Cli, TrainMetaErrors)
{
    testing_support::write_text(dir_ / "bad.tsv", "a\tb\t1\nc\td\t0\nbroken row\n");
    const auto bad = run({"train-meta", "--pairs", (dir_ / "bad.tsv").string(), "--out", (dir_ / "m.json").string()});
    EXPECT_EQ(bad.exit_code, 65);
    EXPECT_NE(json::parse(bad.err)["error"].get<std::string>().find("bad.tsv:3"), std::string::npos);

    testing_support::write_text(dir_ / "one.tsv", "a\tb\t1\nc\td\t1\n");
    EXPECT_EQ(run({"train-meta", "--pairs", (dir_ / "one.tsv").string(), "--out", (dir_ / "m.json").string()})
                  .exit_code,
              1);

    const auto m5 = run({"train-meta", "--mode", "M5", "--pairs",
                         (testing_support::fixtures_dir() / "pairs.tsv").string(), "--out",
                         (dir_ / "m5.json").string()});
    EXPECT_EQ(m5.exit_code, 1);
    const auto msg = json::parse(m5.err)["error"].get<std::string>();
    EXPECT_NE(msg.find("M5"), std::string::npos);
    EXPECT_NE(msg.find("disabled"), std::string::npos);
}

TEST_F(Cli, TrainMetaFromQqpCsv)
{
    std::string csv = "id,question1,question2,is_duplicate\n";
    const auto pairs = testing_support::read_text(testing_support::fixtures_dir() / "pairs.tsv");
    std::istringstream in(pairs);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 + 1);
        csv += std::to_string(n++) + ",\"" + line.substr(0, t1) + "\",\"" + line.substr(t1 + 1, t2 - t1 - 1) +
               "\"," + line.substr(t2 + 1) + "\n";
    }
    testing_support::write_text(dir_ / "qqp.csv", csv);
    const auto r = run({"train-meta", "--qqp", (dir_ / "qqp.csv").string(), "--out", (dir_ / "q.json").string()});
    EXPECT_EQ(r.exit_code, 0) << r.err;
}

} // namespace
