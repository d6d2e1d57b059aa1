// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/engine.hpp"

#include "file_util.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const json& node, std::string_view key,
                              const std::filesystem::path& base)
{
    if (!node.is_object() || !node.contains(key)) {
        return {};
    }
    const auto& v = node.at(std::string(key));
    if (v.is_null()) {
        return {};
    }
    if (!v.is_string()) {
        throw FormatError("config: '" + std::string(key) + "' must be a path string");
    }
    std::filesystem::path p = v.get<std::string>();
    if (p.empty() || p.is_absolute()) {
        return p;
    }
    return base / p;
}

void require_file(const std::filesystem::path& path, std::string_view what)
{
    if (path.empty()) {
        throw ResourceError("config does not name a " + std::string(what) + " file", "");
    }
    if (!std::filesystem::exists(path)) {
        throw ResourceError(std::string(what) + " file not found: " + path.string(), path.string());
    }
}

void require_if_set(const std::filesystem::path& path, std::string_view what)
{
    if (!path.empty()) {
        require_file(path, what);
    }
}

std::optional<MetaClassifier> load_model(const std::filesystem::path& path,
                                         const std::optional<double>& threshold)
{
    if (path.empty()) {
        return std::nullopt;
    }
    require_file(path, "meta model");
    auto m = MetaClassifier::load(path);
    if (threshold) {
        m.threshold = *threshold;
    }
    return m;
}

} // namespace

EngineConfig EngineConfig::from_json(const json& doc, const std::filesystem::path& base)
{
    if (!doc.is_object()) {
        throw FormatError("config: top level must be a JSON object");
    }
    EngineConfig c;
    try {
        const json empty = json::object();
        const auto& norm = doc.value("normalization", empty);
        c.normalization.contractions = resolve(norm, "contractions", base);
        c.normalization.products = resolve(norm, "products", base);
        c.normalization.acronyms = resolve(norm, "acronyms", base);
        c.normalization.verb_lexicon = resolve(norm, "verb_lexicon", base);
        c.normalization.noun_lexicon = resolve(norm, "noun_lexicon", base);
        c.normalization.verb_exceptions = resolve(norm, "verb_exceptions", base);
        c.normalization.noun_exceptions = resolve(norm, "noun_exceptions", base);
        c.normalization.stop_tokens = resolve(norm, "stop_tokens", base);

        c.embeddings = resolve(doc, "embeddings", base);

        const auto& siamese = doc.value("siamese", empty);
        const auto& unnorm = siamese.value("unnormalized", empty);
        c.siamese_unnormalized = {resolve(unnorm, "weights", base), resolve(unnorm, "token_index", base)};
        if (siamese.contains("normalized")) {
            const auto& norm_variant = siamese.at("normalized");
            c.siamese_normalized = {resolve(norm_variant, "weights", base),
                                    resolve(norm_variant, "token_index", base)};
        } else {
            c.siamese_normalized = c.siamese_unnormalized;
        }
        const std::string dot = siamese.value("dot", std::string("cosine"));
        if (dot != "cosine" && dot != "raw") {
            throw FormatError("config: siamese.dot must be \"cosine\" or \"raw\"");
        }
        c.siamese_dot = dot == "raw" ? SiameseDot::raw : SiameseDot::cosine;

        c.corpus = resolve(doc, "corpus", base);
        c.index = resolve(doc, "index", base);
        const auto& models = doc.value("meta_models", empty);
        c.meta_m1 = resolve(models, "M1", base);
        c.meta_m5 = resolve(models, "M5", base);

        const auto& sentence = doc.value("sentence", empty);
        const std::string kind = sentence.value("kind", std::string("disabled"));
        if (kind == "disabled") {
            c.sentence_kind = ProviderKind::disabled;
        } else if (kind == "file_cache") {
            c.sentence_kind = ProviderKind::file_cache;
        } else if (kind == "remote") {
            c.sentence_kind = ProviderKind::remote;
        } else {
            throw FormatError("config: sentence.kind must be disabled, file_cache or remote");
        }
        c.sentence_cache = resolve(sentence, "cache", base);
        c.sentence_endpoint = sentence.value("endpoint", std::string{});
        c.sentence_dim = sentence.value("dim", std::size_t{0});
        c.sentence_timeout_ms = sentence.value("timeout_ms", 500);

        const auto& fuzzy = doc.value("fuzzy", empty);
        c.fuzzy.threshold1 = fuzzy.value("threshold1", 0.6);
        c.fuzzy.threshold2 = fuzzy.value("threshold2", 0.55);
        if (doc.contains("classification_threshold") && !doc["classification_threshold"].is_null()) {
            c.classification_threshold = doc["classification_threshold"].get<double>();
        }
        const auto& service = doc.value("service", empty);
        c.host = service.value("host", c.host);
        c.port = service.value("port", c.port);
        c.top_k = doc.value("top_k", c.top_k);
        c.prefilter_top_n = doc.value("retrieval", empty).value("prefilter_top_n", std::size_t{0});
    } catch (const json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) {
        throw ResourceError("config file not found: " + path.string(), path.string());
    }
    try {
        return from_json(detail::read_json(path), path.parent_path());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void EngineConfig::validate() const
{
    try {
        fuzzy.validate();
    } catch (const ContractError& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    if (classification_threshold && !(*classification_threshold >= 0.0 && *classification_threshold <= 1.0)) {
        throw FormatError("config: classification_threshold must lie in [0, 1]");
    }
    if (top_k == 0) {
        throw FormatError("config: top_k must be at least 1");
    }
    if (port < 0 || port > 65535) {
        throw FormatError("config: service.port out of range");
    }
    if (sentence_kind == ProviderKind::remote && (sentence_endpoint.empty() || sentence_dim == 0)) {
        throw FormatError("config: a remote sentence provider needs endpoint and dim");
    }
    if (sentence_timeout_ms <= 0) {
        throw FormatError("config: sentence.timeout_ms must be positive");
    }
}

Resources load_resources(const EngineConfig& config)
{
    const auto& n = config.normalization;
    for (const auto* p : {&n.contractions, &n.products, &n.acronyms, &n.verb_lexicon, &n.noun_lexicon,
                          &n.verb_exceptions, &n.noun_exceptions, &n.stop_tokens}) {
        require_if_set(*p, "normalization data");
    }
    require_file(config.embeddings, "embedding table");
    require_file(config.siamese_unnormalized.weights, "Siamese weights");
    require_file(config.siamese_unnormalized.token_index, "Siamese token index");
    require_file(config.siamese_normalized.weights, "Siamese weights");
    require_file(config.siamese_normalized.token_index, "Siamese token index");
    if (config.sentence_kind == ProviderKind::file_cache) {
        require_file(config.sentence_cache, "sentence cache");
    }

    Resources r;
    r.normalization = NormalizationConfig::load(config.normalization);
    r.embeddings = std::make_shared<EmbeddingTable>(EmbeddingTable::load(config.embeddings));
    r.unnormalized_weights = std::make_shared<SiameseWeights>(SiameseWeights::load(
        config.siamese_unnormalized.weights, config.siamese_unnormalized.token_index));
    if (config.siamese_normalized.weights == config.siamese_unnormalized.weights &&
        config.siamese_normalized.token_index == config.siamese_unnormalized.token_index) {
        r.normalized_weights = r.unnormalized_weights;
    } else {
        r.normalized_weights = std::make_shared<SiameseWeights>(SiameseWeights::load(
            config.siamese_normalized.weights, config.siamese_normalized.token_index));
    }
    switch (config.sentence_kind) {
    case ProviderKind::disabled:
        r.sentence = std::make_shared<DisabledProvider>();
        break;
    case ProviderKind::file_cache:
        r.sentence = std::make_shared<FileCacheProvider>(FileCacheProvider::load(config.sentence_cache));
        break;
    case ProviderKind::remote:
        r.sentence = std::make_shared<RemoteProvider>(
            config.sentence_endpoint, config.sentence_dim,
            std::chrono::milliseconds(config.sentence_timeout_ms));
        break;
    }
    r.siamese_dot = config.siamese_dot;
    r.fuzzy = config.fuzzy;
    r.prefilter_top_n = config.prefilter_top_n;
    r.validate();
    return r;
}

Engine::Engine(Resources resources, QuestionIndex index, MetaModels models)
    : resources_(std::move(resources)), index_(std::move(index)), models_(std::move(models))
{
    validate_setup(index_, resources_, models_);
}

Engine Engine::open(const EngineConfig& config)
{
    require_file(config.index, "index");
    require_if_set(config.meta_m1, "meta model");
    require_if_set(config.meta_m5, "meta model");
    Resources resources = load_resources(config);
    QuestionIndex index = QuestionIndex::load(config.index);
    MetaModels models{load_model(config.meta_m1, config.classification_threshold),
                      load_model(config.meta_m5, config.classification_threshold)};
    return Engine(std::move(resources), std::move(index), std::move(models));
}

MatchResponse Engine::match(std::string_view query, std::size_t top_k) const
{
    return match_query(query, index_, resources_, models_, top_k);
}

Engine::PairResult Engine::score(std::string_view question1, std::string_view question2) const
{
    auto scored = score_pair(question1, question2, resources_);
    PairResult out;
    out.degraded = scored.degraded;
    const MetaClassifier* model = nullptr;
    if (scored.features.mode() == FeatureMode::M5 && models_.m5) {
        model = &*models_.m5;
        out.features = std::move(scored.features);
    } else if (models_.m1) {
        model = &*models_.m1;
        out.features = scored.features.mode() == FeatureMode::M5 ? scored.features.without_sentence()
                                                                : std::move(scored.features);
    } else {
        throw DomainError("no meta model can score this pair");
    }
    out.probability = model->predict_proba(out.features);
    out.label = out.probability >= model->threshold ? Label::similar : Label::not_similar;
    return out;
}

json to_json(const MatchResponse& response)
{
    json matches = json::array();
    for (const auto& m : response.matches) {
        matches.push_back({
            {"rank", m.rank},
            {"id", m.record.id},
            {"question", m.record.question},
            {"answer", m.record.answer},
            {"probability", m.probability},
            {"features", std::vector<double>(m.features.values().begin(), m.features.values().end())},
        });
    }
    json out = {{"matches", std::move(matches)}, {"answered", response.answered}};
    if (response.degraded) {
        out["degraded"] = true;
    }
    return out;
}

json to_json(const Engine::PairResult& result)
{
    json out = {
        {"features", std::vector<double>(result.features.values().begin(), result.features.values().end())},
        {"probability", result.probability},
        {"label", result.label == Label::similar ? "similar" : "not_similar"},
    };
    if (result.degraded) {
        out["degraded"] = true;
    }
    return out;
}

json health_json(const Engine& engine)
{
    return {{"status", "ok"},
            {"mode", to_string(engine.index().mode)},
            {"corpus_size", engine.index().size()}};
}

std::string render(const json& doc)
{
    return doc.dump() + "\n";
}

std::vector<FeatureVector> pair_features(std::span<const LabeledPair> pairs, const Resources& resources,
                                         FeatureMode mode)
{
    if (mode == FeatureMode::M5 && !resources.sentence->available()) {
        throw DomainError("mode M5 needs a sentence provider, but the provider is disabled");
    }
    std::vector<FeatureVector> out;
    out.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto scored = score_pair(pairs[i].question1, pairs[i].question2, resources);
        if (mode == FeatureMode::M5 && scored.features.mode() != FeatureMode::M5) {
            throw DomainError("pair " + std::to_string(i + 1) +
                              ": sentence provider could not embed the texts");
        }
        out.push_back(mode == FeatureMode::M1 && scored.features.mode() == FeatureMode::M5
                          ? scored.features.without_sentence()
                          : std::move(scored.features));
    }
    return out;
}

} // namespace qqmatch
