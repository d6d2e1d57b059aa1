// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit and acceptance tests.

#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <string>

#include <nlohmann/json.hpp>

#include "qqmatch/engine.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path fixtures_dir()
{
    return QQMATCH_FIXTURES_DIR;
}

inline fs::path data_dir()
{
    return QQMATCH_DATA_DIR;
}

inline fs::path cli_path()
{
    return QQMATCH_CLI;
}

/// A fresh directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = fs::temp_directory_path() / ("qqmatch-test-" + std::to_string(rng()));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// The fixture config document with every path made absolute and the index
/// redirected into dir.
inline nlohmann::json fixture_config_json(const fs::path& dir)
{
    std::ifstream in(fixtures_dir() / "config.json");
    nlohmann::json doc = nlohmann::json::parse(in);
    const auto absolutize = [](nlohmann::json& node) {
        for (auto& [key, value] : node.items()) {
            if (value.is_string()) {
                value = (fixtures_dir() / value.get<std::string>()).lexically_normal().string();
            }
        }
    };
    absolutize(doc["normalization"]);
    absolutize(doc["siamese"]["unnormalized"]);
    absolutize(doc["meta_models"]);
    for (const char* key : {"embeddings", "corpus"}) {
        doc[key] = (fixtures_dir() / doc[key].get<std::string>()).lexically_normal().string();
    }
    doc["index"] = (dir / "index.qqix").string();
    return doc;
}

inline fs::path write_fixture_config(const fs::path& dir, const nlohmann::json& doc)
{
    const fs::path path = dir / "config.json";
    write_text(path, doc.dump(2));
    return path;
}

inline qqmatch::EngineConfig fixture_config(const fs::path& dir)
{
    return qqmatch::EngineConfig::from_json(fixture_config_json(dir), dir);
}

/// Resources and index for the fixture corpus, built once per process.
struct FixtureWorld {
    qqmatch::EngineConfig config;
    qqmatch::Resources resources;
    std::vector<qqmatch::QuestionRecord> corpus;
    qqmatch::QuestionIndex index;
    qqmatch::MetaModels models;
};

inline const FixtureWorld& fixture_world()
{
    static const FixtureWorld world = [] {
        FixtureWorld w;
        w.config = fixture_config(fs::temp_directory_path());
        w.resources = qqmatch::load_resources(w.config);
        w.corpus = qqmatch::load_corpus(w.config.corpus);
        w.index = qqmatch::build_index(w.corpus, w.resources);
        w.models.m1 = qqmatch::MetaClassifier::load(w.config.meta_m1);
        return w;
    }();
    return world;
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s)
{
    std::string q = "'";
    for (const char c : s) {
        if (c == '\'') {
            q += "'\\''";
        } else {
            q += c;
        }
    }
    return q + "'";
}

/// Runs the CLI with the given arguments, capturing stdout and stderr.
inline CommandResult run_cli(const std::vector<std::string>& args, const std::string& env = {})
{
    TempDir capture;
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += shell_quote(cli_path().string());
    for (const auto& a : args) {
        cmd += " " + shell_quote(a);
    }
    const fs::path out = capture / "out";
    const fs::path err = capture / "err";
    cmd += " >" + shell_quote(out.string()) + " 2>" + shell_quote(err.string());
    const int status = std::system(cmd.c_str());
    CommandResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(out);
    r.err = read_text(err);
    return r;
}

} // namespace testing_support
