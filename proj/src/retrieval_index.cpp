// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/retrieval_index.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "file_util.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

namespace {

constexpr std::string_view kIndexMagic = "QQIX";
constexpr std::uint32_t kRawDotFlag = 0x100;

std::vector<float> to_float(std::span<const double> v)
{
    return {v.begin(), v.end()};
}

double dot_f(std::span<const float> a, std::span<const float> b)
{
    if (a.size() != b.size()) {
        throw ContractError("stored vector dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
    }
    return s;
}

double unit_dot(std::span<const float> a, std::span<const float> b)
{
    return std::clamp(dot_f(a, b), -1.0, 1.0);
}

std::vector<float> encode_variant(std::span<const std::string> tokens, const SiameseWeights& weights,
                                  TextVariant variant, SiameseDot mode)
{
    const auto rep = encode(vectorize(tokens, weights), weights, variant);
    return mode == SiameseDot::cosine ? to_float(unit_or_zero(rep.values)) : to_float(rep.values);
}

} // namespace

std::vector<QuestionRecord> load_corpus(const std::filesystem::path& path)
{
    std::vector<QuestionRecord> out;
    const auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (detail::trim(lines[n]).empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(n + 1);
        try {
            const auto row = nlohmann::json::parse(lines[n]);
            QuestionRecord r{row.at("id").get<std::string>(), row.at("question").get<std::string>(),
                             row.value("answer", std::string{})};
            if (r.id.empty() || detail::trim(r.question).empty()) {
                throw FormatError(where + ": id and question must be non-empty");
            }
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return out;
}

void Resources::validate() const
{
    if (!embeddings || !unnormalized_weights || !normalized_weights || !sentence) {
        throw ContractError("resources are incomplete");
    }
    if (unnormalized_weights->dims().hidden_dim != normalized_weights->dims().hidden_dim) {
        throw ContractError("unnormalized and normalized Siamese weights differ in hidden size");
    }
    fuzzy.validate();
}

Representation represent(const PreprocessedQuery& text, const Resources& resources,
                         bool want_sentence, std::string* sentence_error)
{
    Representation r;
    r.unnorm_rep = encode_variant(text.unnorm_tokens, *resources.unnormalized_weights,
                                  TextVariant::unnormalized, resources.siamese_dot);
    r.norm_rep = encode_variant(text.norm_tokens, *resources.normalized_weights,
                                TextVariant::normalized, resources.siamese_dot);
    r.avg_vec = to_float(unit_or_zero(average_embedding(text.unnorm_tokens, *resources.embeddings)));
    r.fuzzy_tokens = text.fuzzy_token_set;
    if (want_sentence && resources.sentence->available()) {
        try {
            const auto v = resources.sentence->embed(text.unnormalized);
            if (v.size() != resources.sentence->dim()) {
                throw ProviderError(ProviderError::Reason::protocol, "sentence vector has wrong dim");
            }
            r.sent_vec = to_float(unit_or_zero(v));
        } catch (const ProviderError& e) {
            if (sentence_error) {
                *sentence_error = e.what();
            }
        }
    }
    return r;
}

FeatureVector features_between(const Representation& query, const Representation& candidate,
                               const Resources& resources, bool use_sentence)
{
    const bool cos_mode = resources.siamese_dot == SiameseDot::cosine;
    std::vector<double> f;
    f.reserve(5);
    f.push_back(cos_mode ? unit_dot(query.unnorm_rep, candidate.unnorm_rep)
                         : dot_f(query.unnorm_rep, candidate.unnorm_rep));
    f.push_back(cos_mode ? unit_dot(query.norm_rep, candidate.norm_rep)
                         : dot_f(query.norm_rep, candidate.norm_rep));
    f.push_back(unit_dot(query.avg_vec, candidate.avg_vec));
    f.push_back(fuzzy_intersection_ratio(query.fuzzy_tokens, candidate.fuzzy_tokens, resources.fuzzy,
                                         *resources.embeddings)
                    .score);
    if (use_sentence) {
        if (!query.has_sentence() || !candidate.has_sentence()) {
            throw ContractError("sentence feature requested without sentence vectors");
        }
        f.push_back(unit_dot(query.sent_vec, candidate.sent_vec));
    }
    return FeatureVector(std::move(f));
}

void QuestionIndex::save(const std::filesystem::path& path) const
{
    detail::ByteWriter out;
    out.bytes(kIndexMagic);
    out.u32(kVersion);
    out.u32(static_cast<std::uint32_t>(feature_count(mode)) |
            (siamese_dot == SiameseDot::raw ? kRawDotFlag : 0));
    out.u32(hidden_dim);
    out.u32(avg_dim);
    out.u32(mode == FeatureMode::M5 ? sentence_dim : 0);
    out.u32(static_cast<std::uint32_t>(entries.size()));
    for (const auto& e : entries) {
        const auto& r = e.rep;
        if (r.unnorm_rep.size() != hidden_dim || r.norm_rep.size() != hidden_dim ||
            r.avg_vec.size() != avg_dim ||
            (mode == FeatureMode::M5 && r.sent_vec.size() != sentence_dim)) {
            throw ContractError("index entry '" + e.record.id + "' does not match header dims");
        }
        out.str(e.record.id);
        out.str(e.record.question);
        out.str(e.record.answer);
        out.f32s(r.unnorm_rep);
        out.f32s(r.norm_rep);
        out.f32s(r.avg_vec);
        if (mode == FeatureMode::M5) {
            out.f32s(r.sent_vec);
        }
        out.u32(static_cast<std::uint32_t>(r.fuzzy_tokens.size()));
        for (const auto& t : r.fuzzy_tokens) {
            out.str(t);
        }
    }
    detail::write_file(path, out.data());
}

QuestionIndex QuestionIndex::load(const std::filesystem::path& path)
{
    const std::string where = path.string();
    const std::string raw = detail::read_file(path);
    detail::ByteReader in(raw, where);
    if (in.bytes(4) != kIndexMagic) {
        throw FormatError(where + ": bad magic, not a QQIX index");
    }
    if (const auto v = in.u32(); v != kVersion) {
        throw FormatError(where + ": unsupported index version " + std::to_string(v));
    }
    QuestionIndex index;
    const std::uint32_t flag = in.u32();
    const std::uint32_t features = flag & 0xFF;
    if ((flag & ~(0xFFu | kRawDotFlag)) != 0 || (features != 4 && features != 5)) {
        throw FormatError(where + ": bad mode flag " + std::to_string(flag));
    }
    index.mode = static_cast<FeatureMode>(features);
    index.siamese_dot = (flag & kRawDotFlag) ? SiameseDot::raw : SiameseDot::cosine;
    index.hidden_dim = in.u32();
    index.avg_dim = in.u32();
    index.sentence_dim = in.u32();
    if (index.hidden_dim == 0 || index.avg_dim == 0 ||
        (index.mode == FeatureMode::M5) != (index.sentence_dim != 0)) {
        throw FormatError(where + ": dims inconsistent with the mode flag");
    }
    const std::uint32_t count = in.u32();
    index.entries.reserve(std::min<std::size_t>(count, in.remaining()));
    for (std::uint32_t n = 0; n < count; ++n) {
        IndexedQuestion e;
        e.record.id = in.str();
        e.record.question = in.str();
        e.record.answer = in.str();
        auto& r = e.rep;
        r.unnorm_rep.resize(index.hidden_dim);
        r.norm_rep.resize(index.hidden_dim);
        r.avg_vec.resize(index.avg_dim);
        in.f32s(r.unnorm_rep);
        in.f32s(r.norm_rep);
        in.f32s(r.avg_vec);
        if (index.mode == FeatureMode::M5) {
            r.sent_vec.resize(index.sentence_dim);
            in.f32s(r.sent_vec);
        }
        const std::uint32_t tokens = in.u32();
        for (std::uint32_t t = 0; t < tokens; ++t) {
            r.fuzzy_tokens.insert(in.str());
        }
        index.entries.push_back(std::move(e));
    }
    if (in.remaining() != 0) {
        throw FormatError(where + ": " + std::to_string(in.remaining()) + " trailing bytes");
    }
    return index;
}

void QuestionIndex::check_compatible(const Resources& resources) const
{
    resources.validate();
    const auto h = resources.unnormalized_weights->dims().hidden_dim;
    if (h != hidden_dim) {
        throw ContractError("dim mismatch: index hidden_dim " + std::to_string(hidden_dim) +
                            " but Siamese weights have " + std::to_string(h));
    }
    if (resources.embeddings->dim() != avg_dim) {
        throw ContractError("dim mismatch: index embedding dim " + std::to_string(avg_dim) +
                            " but table has " + std::to_string(resources.embeddings->dim()));
    }
    if (mode == FeatureMode::M5 && resources.sentence->available() &&
        resources.sentence->dim() != sentence_dim) {
        throw ContractError("dim mismatch: index sentence dim " + std::to_string(sentence_dim) +
                            " but provider serves " + std::to_string(resources.sentence->dim()));
    }
    if (resources.siamese_dot != siamese_dot) {
        throw ContractError("index was built with a different Siamese dot mode");
    }
}

QuestionIndex build_index(const std::vector<QuestionRecord>& corpus, const Resources& resources)
{
    resources.validate();
    if (corpus.empty()) {
        throw DomainError("cannot build an index from an empty corpus");
    }
    std::map<std::string, std::size_t> seen;
    for (const auto& r : corpus) {
        ++seen[r.id];
    }
    std::string duplicates;
    for (const auto& [id, n] : seen) {
        if (n > 1) {
            duplicates += (duplicates.empty() ? "" : ", ") + id;
        }
    }
    if (!duplicates.empty()) {
        throw DomainError("duplicate question ids: " + duplicates);
    }

    QuestionIndex index;
    const bool with_sentence = resources.sentence->available();
    index.mode = with_sentence ? FeatureMode::M5 : FeatureMode::M1;
    index.siamese_dot = resources.siamese_dot;
    index.hidden_dim = resources.unnormalized_weights->dims().hidden_dim;
    index.avg_dim = static_cast<std::uint32_t>(resources.embeddings->dim());
    index.sentence_dim = with_sentence ? static_cast<std::uint32_t>(resources.sentence->dim()) : 0;
    index.entries.reserve(corpus.size());
    for (const auto& record : corpus) {
        const auto text = preprocess(record.question, resources.normalization);
        std::string error;
        auto rep = represent(text, resources, with_sentence, &error);
        if (with_sentence && !rep.has_sentence()) {
            throw ProviderError(ProviderError::Reason::transport,
                                "sentence vector for question '" + record.id + "': " + error);
        }
        index.entries.push_back({record, std::move(rep)});
    }
    return index;
}

PairFeatures score_pair(std::string_view q1_text, std::string_view q2_text, const Resources& resources)
{
    resources.validate();
    const bool want = resources.sentence->available();
    const auto r1 = represent(preprocess(q1_text, resources.normalization), resources, want);
    const auto r2 = represent(preprocess(q2_text, resources.normalization), resources, want);
    const bool use_sentence = want && r1.has_sentence() && r2.has_sentence();
    return {features_between(r1, r2, resources, use_sentence), want && !use_sentence};
}

void validate_setup(const QuestionIndex& index, const Resources& resources, const MetaModels& models)
{
    index.check_compatible(resources);
    if (models.m1 && models.m1->mode != FeatureMode::M1) {
        throw ContractError("mode mismatch: the M1 model slot holds a " +
                            std::string(to_string(models.m1->mode)) + " model");
    }
    if (models.m5 && models.m5->mode != FeatureMode::M5) {
        throw ContractError("mode mismatch: the M5 model slot holds a " +
                            std::string(to_string(models.m5->mode)) + " model");
    }
    const bool m5_usable = index.mode == FeatureMode::M5 && models.m5 && resources.sentence->available();
    if (!m5_usable && !models.m1) {
        throw DomainError(std::string("mode mismatch: index is ") + std::string(to_string(index.mode)) +
                          (resources.sentence->available() ? "" : " with the sentence provider disabled") +
                          " and no M1 model is configured");
    }
}

MatchResponse match_query(std::string_view query_text, const QuestionIndex& index,
                          const Resources& resources, const MetaModels& models, std::size_t top_k)
{
    if (top_k == 0) {
        throw ContractError("top_k must be at least 1");
    }
    MatchResponse response;
    const auto text = preprocess(query_text, resources.normalization);
    if (text.unnorm_tokens.empty()) {
        return response;
    }

    const bool try_m5 = index.mode == FeatureMode::M5 && models.m5 && resources.sentence->available();
    std::string error;
    const Representation query = represent(text, resources, try_m5, &error);
    const bool use_m5 = try_m5 && query.has_sentence();
    response.degraded = try_m5 && !use_m5;
    response.mode = use_m5 ? FeatureMode::M5 : FeatureMode::M1;
    const MetaClassifier* model = use_m5 ? &*models.m5 : (models.m1 ? &*models.m1 : nullptr);
    if (!model) {
        throw DomainError("no M1 model available to score this query (" +
                          (error.empty() ? std::string("index is M1-only") : error) + ")");
    }

    std::vector<std::size_t> candidates(index.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    if (resources.prefilter_top_n > 0 && resources.prefilter_top_n < candidates.size()) {
        std::vector<double> avg(index.size());
        for (std::size_t i = 0; i < index.size(); ++i) {
            avg[i] = unit_dot(query.avg_vec, index.entries[i].rep.avg_vec);
        }
        const auto keep = static_cast<std::ptrdiff_t>(resources.prefilter_top_n);
        std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (avg[a] != avg[b]) {
                                  return avg[a] > avg[b];
                              }
                              return index.entries[a].record.id < index.entries[b].record.id;
                          });
        candidates.resize(static_cast<std::size_t>(keep));
    }

    struct Scored {
        std::size_t entry;
        FeatureVector features;
        double probability;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (const auto i : candidates) {
        FeatureVector f = features_between(query, index.entries[i].rep, resources, use_m5);
        const double p = model->predict_proba(f);
        scored.push_back({i, std::move(f), p});
    }
    const std::size_t keep = std::min(top_k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                      [&](const Scored& a, const Scored& b) {
                          if (a.probability != b.probability) {
                              return a.probability > b.probability;
                          }
                          return index.entries[a.entry].record.id < index.entries[b.entry].record.id;
                      });
    std::vector<MatchResult> matches;
    matches.reserve(keep);
    for (std::size_t r = 0; r < keep; ++r) {
        matches.push_back({index.entries[scored[r].entry].record, std::move(scored[r].features),
                           scored[r].probability, r + 1});
    }
    response.answered = !matches.empty() && matches.front().probability >= model->threshold;
    response.matches = std::move(matches);
    return response;
}

} // namespace qqmatch
