// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qqmatch/evaluation.hpp"
#include "qqmatch/retrieval_index.hpp"

namespace qqmatch {

/// Settings read from the engine's JSON config file. Relative paths are
/// resolved against the directory holding the config file.
struct EngineConfig {
    struct SiamesePaths {
        std::filesystem::path weights;
        std::filesystem::path token_index;
    };

    NormalizationConfig::Paths normalization;
    std::filesystem::path embeddings;
    SiamesePaths siamese_unnormalized;
    SiamesePaths siamese_normalized;  // same files as unnormalized when omitted
    SiameseDot siamese_dot = SiameseDot::cosine;
    std::filesystem::path corpus;
    std::filesystem::path index;
    std::filesystem::path meta_m1;
    std::filesystem::path meta_m5;

    ProviderKind sentence_kind = ProviderKind::disabled;
    std::filesystem::path sentence_cache;
    std::string sentence_endpoint;
    std::size_t sentence_dim = 0;
    int sentence_timeout_ms = 500;

    FuzzyConfig fuzzy;
    std::optional<double> classification_threshold;  // overrides the models' stored threshold
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t top_k = 5;
    std::size_t prefilter_top_n = 0;

    static EngineConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
    static EngineConfig load(const std::filesystem::path& path);

    /// Throws FormatError on out-of-range settings.
    void validate() const;
};

/// Throws ResourceError naming the first referenced scorer input that does
/// not exist, then loads every scorer resource.
Resources load_resources(const EngineConfig& config);

/// Loaded index, models and resources ready to answer queries.
class Engine {
public:
    Engine(Resources resources, QuestionIndex index, MetaModels models);

    /// Validates every referenced file before loading anything.
    static Engine open(const EngineConfig& config);

    MatchResponse match(std::string_view query, std::size_t top_k) const;

    struct PairResult {
        FeatureVector features;
        double probability = 0.0;
        Label label = Label::not_similar;
        bool degraded = false;
    };
    PairResult score(std::string_view question1, std::string_view question2) const;

    const Resources& resources() const noexcept { return resources_; }
    const QuestionIndex& index() const noexcept { return index_; }
    const MetaModels& models() const noexcept { return models_; }

private:
    Resources resources_;
    QuestionIndex index_;
    MetaModels models_;
};

nlohmann::json to_json(const MatchResponse& response);
nlohmann::json to_json(const Engine::PairResult& result);
nlohmann::json health_json(const Engine& engine);

/// Serialized form shared by the CLI and the HTTP service: compact JSON
/// followed by a newline.
std::string render(const nlohmann::json& doc);

/// Computes the feature vector of each pair for the given mode. Throws
/// DomainError when M5 is requested and the provider cannot serve a pair.
std::vector<FeatureVector> pair_features(std::span<const LabeledPair> pairs,
                                         const Resources& resources, FeatureMode mode);

} // namespace qqmatch
