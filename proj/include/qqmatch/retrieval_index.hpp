// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qqmatch/embedding_store.hpp"
#include "qqmatch/fuzzy_match.hpp"
#include "qqmatch/meta_classifier.hpp"
#include "qqmatch/sentence_embed.hpp"
#include "qqmatch/siamese_lstm.hpp"
#include "qqmatch/textnorm.hpp"

namespace qqmatch {

struct QuestionRecord {
    std::string id;
    std::string question;
    std::string answer;

    bool operator==(const QuestionRecord&) const = default;
};

/// Reads the JSON-lines corpus ({"id", "question", "answer"} per line).
std::vector<QuestionRecord> load_corpus(const std::filesystem::path& path);

/// Everything needed to score one text against another.
struct Resources {
    NormalizationConfig normalization;
    std::shared_ptr<const EmbeddingTable> embeddings;
    std::shared_ptr<const SiameseWeights> unnormalized_weights;
    std::shared_ptr<const SiameseWeights> normalized_weights;
    std::shared_ptr<const SentenceEmbeddingProvider> sentence =
        std::make_shared<DisabledProvider>();
    SiameseDot siamese_dot = SiameseDot::cosine;
    FuzzyConfig fuzzy;
    // Score only the N best candidates by average-embedding cosine; 0 = all.
    std::size_t prefilter_top_n = 0;

    /// Throws ContractError when a component is missing or the two Siamese
    /// variants disagree on hidden size.
    void validate() const;
};

/// Precomputed vectors of one text. Siamese and average vectors are unit
/// length or exactly zero (Siamese vectors stay raw in raw-dot mode);
/// sent_vec is empty when no sentence vector was produced.
struct Representation {
    std::vector<float> unnorm_rep;
    std::vector<float> norm_rep;
    std::vector<float> avg_vec;
    std::vector<float> sent_vec;
    TokenSet fuzzy_tokens;

    bool has_sentence() const noexcept { return !sent_vec.empty(); }
};

/// Builds the representation of preprocessed text. With want_sentence the
/// provider is queried; a ProviderError is reported through sentence_error
/// (when given) and leaves sent_vec empty.
Representation represent(const PreprocessedQuery& text, const Resources& resources,
                         bool want_sentence, std::string* sentence_error = nullptr);

/// Feature vector between a query and a candidate representation; the
/// fifth feature is included only when use_sentence is set.
FeatureVector features_between(const Representation& query, const Representation& candidate,
                               const Resources& resources, bool use_sentence);

struct IndexedQuestion {
    QuestionRecord record;
    Representation rep;
};

/// Precomputed corpus. Saved in the little-endian "QQIX" container.
class QuestionIndex {
public:
    static constexpr std::uint32_t kVersion = 1;

    FeatureMode mode = FeatureMode::M1;
    SiameseDot siamese_dot = SiameseDot::cosine;
    std::uint32_t hidden_dim = 0;
    std::uint32_t avg_dim = 0;
    std::uint32_t sentence_dim = 0;
    std::vector<IndexedQuestion> entries;

    std::size_t size() const noexcept { return entries.size(); }

    void save(const std::filesystem::path& path) const;
    static QuestionIndex load(const std::filesystem::path& path);

    /// Throws ContractError when the resources cannot score against this
    /// index (dimension or dot-mode mismatch).
    void check_compatible(const Resources& resources) const;
};

/// Throws DomainError on an empty corpus or duplicate ids. Every question is
/// run through the provider when it is available; a provider failure aborts
/// the build.
QuestionIndex build_index(const std::vector<QuestionRecord>& corpus, const Resources& resources);

struct PairFeatures {
    FeatureVector features;
    bool degraded = false;  // the provider was configured but failed
};

PairFeatures score_pair(std::string_view q1_text, std::string_view q2_text,
                        const Resources& resources);

struct MetaModels {
    std::optional<MetaClassifier> m1;
    std::optional<MetaClassifier> m5;
};

struct MatchResult {
    QuestionRecord record;
    FeatureVector features;
    double probability = 0.0;
    std::size_t rank = 0;
};

struct MatchResponse {
    std::vector<MatchResult> matches;
    bool answered = false;
    bool degraded = false;
    FeatureMode mode = FeatureMode::M1;
};

/// Throws ContractError/DomainError when the index, resources and models
/// cannot serve queries together.
void validate_setup(const QuestionIndex& index, const Resources& resources,
                    const MetaModels& models);

/// Scores the query against every indexed question and returns the top_k by
/// probability (ties by id). answered is set when the best probability
/// reaches the model threshold.
MatchResponse match_query(std::string_view query_text, const QuestionIndex& index,
                          const Resources& resources, const MetaModels& models,
                          std::size_t top_k);

} // namespace qqmatch
