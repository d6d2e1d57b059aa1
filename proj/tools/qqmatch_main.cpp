// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Results go to stdout and errors to stderr, each
// as one JSON object per line.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qqmatch/engine.hpp"
#include "qqmatch/errors.hpp"
#include "qqmatch/evaluation.hpp"
#include "qqmatch/service.hpp"

namespace {

using nlohmann::json;
using namespace qqmatch;

enum Exit : int {
    kOk = 0,
    kDomain = 1,
    kResource = 2,
    kUsage = 64,
    kDataFormat = 65,
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int fail(int code, const std::string& message, const std::string& path = {})
{
    json err = {{"error", message}};
    if (!path.empty()) {
        err["path"] = path;
    }
    std::cerr << render(err);
    return code;
}

EngineConfig load_config(const std::string& flag)
{
    std::string path = flag;
    if (path.empty()) {
        if (const char* env = std::getenv("QQMATCH_CONFIG")) {
            path = env;
        }
    }
    if (path.empty()) {
        throw UsageError("no config given: pass --config or set QQMATCH_CONFIG");
    }
    return EngineConfig::load(path);
}

FeatureMode parse_mode(const std::string& s)
{
    try {
        return feature_mode_from_string(s);
    } catch (const Error&) {
        throw UsageError("--mode must be M1 or M5");
    }
}

std::vector<LabeledPair> read_pairs(const std::string& tsv, const std::string& qqp)
{
    if (tsv.empty() == qqp.empty()) {
        throw UsageError("give exactly one of --pairs or --qqp");
    }
    return tsv.empty() ? read_qqp_csv(qqp) : read_labeled_pairs(tsv);
}

int cmd_index(const EngineConfig& config, const std::string& out_flag)
{
    const std::filesystem::path out = out_flag.empty() ? config.index : std::filesystem::path(out_flag);
    if (out.empty()) {
        throw UsageError("no index output path: set \"index\" in the config or pass --out");
    }
    if (config.corpus.empty() || !std::filesystem::exists(config.corpus)) {
        throw ResourceError("corpus file not found: " + config.corpus.string(), config.corpus.string());
    }
    const Resources resources = load_resources(config);
    const auto corpus = load_corpus(config.corpus);
    const QuestionIndex index = build_index(corpus, resources);
    index.save(out);
    std::cout << render({{"count", index.size()},
                         {"mode", to_string(index.mode)},
                         {"dims", {{"hidden", index.hidden_dim},
                                   {"avg", index.avg_dim},
                                   {"sentence", index.sentence_dim}}},
                         {"index", out.string()}});
    return kOk;
}

int cmd_query(const EngineConfig& config, const std::string& text, std::optional<long long> top_k)
{
    const long long k = top_k.value_or(static_cast<long long>(config.top_k));
    if (k < 1) {
        throw UsageError("--top-k must be at least 1");
    }
    const Engine engine = Engine::open(config);
    std::cout << render(to_json(engine.match(text, static_cast<std::size_t>(k))));
    return kOk;
}

int cmd_score_pair(const EngineConfig& config, const std::string& q1, const std::string& q2)
{
    const Engine engine = Engine::open(config);
    std::cout << render(to_json(engine.score(q1, q2)));
    return kOk;
}

int cmd_train_meta(const EngineConfig& config, const std::vector<LabeledPair>& pairs, FeatureMode mode,
                   const std::string& out_flag, const TrainOptions& options)
{
    std::filesystem::path out = out_flag;
    if (out.empty()) {
        out = mode == FeatureMode::M5 ? config.meta_m5 : config.meta_m1;
    }
    if (out.empty()) {
        throw UsageError("no model output path: pass --out or set meta_models in the config");
    }
    if (pairs.empty()) {
        throw DomainError("no labeled pairs to train on");
    }
    const Resources resources = load_resources(config);
    const auto features = pair_features(pairs, resources, mode);
    std::vector<int> labels;
    labels.reserve(pairs.size());
    for (const auto& p : pairs) {
        labels.push_back(p.label);
    }
    const TrainResult result = train_meta_classifier(features, labels, options);
    result.model.save(out);

    const auto& held_out = result.calibration_indices.empty() ? result.train_indices
                                                              : result.calibration_indices;
    std::vector<int> predicted;
    std::vector<int> actual;
    for (const auto i : held_out) {
        predicted.push_back(result.model.classify(features[i]) == Label::similar ? 1 : 0);
        actual.push_back(labels[i]);
    }
    const auto report =
        report_from_confusion(confusion_from_predictions(predicted, actual), result.model.threshold);
    std::cout << render({{"model", out.string()},
                         {"mode", to_string(mode)},
                         {"train_size", result.train_indices.size()},
                         {"calibration_size", result.calibration_indices.size()},
                         {"support_vectors", result.model.support_vectors.size()},
                         {"iterations", result.solution.iterations},
                         {"converged", result.solution.converged},
                         {"report", report.to_json()}});
    return kOk;
}

int cmd_evaluate(const EngineConfig& config, const std::vector<LabeledPair>& pairs, FeatureMode mode,
                 const std::string& model_flag, std::optional<double> threshold)
{
    std::filesystem::path model_path = model_flag;
    if (model_path.empty()) {
        model_path = mode == FeatureMode::M5 ? config.meta_m5 : config.meta_m1;
    }
    if (model_path.empty()) {
        throw UsageError("no model: pass --model or set meta_models in the config");
    }
    if (!std::filesystem::exists(model_path)) {
        throw ResourceError("meta model file not found: " + model_path.string(), model_path.string());
    }
    const MetaClassifier model = MetaClassifier::load(model_path);
    if (model.mode != mode) {
        throw DomainError("model at " + model_path.string() + " is " + std::string(to_string(model.mode)) +
                          ", not " + std::string(to_string(mode)));
    }
    const Resources resources = load_resources(config);
    if (mode == FeatureMode::M5 && !resources.sentence->available()) {
        throw DomainError("mode M5 needs a sentence provider, but the provider is disabled");
    }
    const double thr = threshold.value_or(config.classification_threshold.value_or(model.threshold));
    if (!(thr >= 0.0 && thr <= 1.0)) {
        throw UsageError("--threshold must lie in [0, 1]");
    }
    std::cout << render(evaluate(pairs, model, resources, thr).to_json());
    return kOk;
}

Service* g_service = nullptr;

extern "C" void on_signal(int)
{
    if (g_service) {
        g_service->stop();
    }
}

int cmd_serve(const EngineConfig& config, const std::string& host_flag, std::optional<int> port_flag)
{
    auto engine = std::make_shared<const Engine>(Engine::open(config));
    Service service(engine, config.top_k);
    const std::string host = host_flag.empty() ? config.host : host_flag;
    const int port = port_flag.value_or(config.port);
    int bound = port;
    if (port == 0) {
        bound = service.bind_any(host);
        if (bound < 0) {
            return fail(kResource, "cannot bind " + host);
        }
    }
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << render({{"listening", host + ":" + std::to_string(bound)},
                         {"mode", to_string(engine->index().mode)},
                         {"corpus_size", engine->index().size()}})
              << std::flush;
    const bool ok = port == 0 ? service.run() : service.listen(host, port);
    g_service = nullptr;
    if (!ok) {
        return fail(kResource, "cannot serve on " + host + ":" + std::to_string(port));
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qqmatch: question-to-question matching engine"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("-c,--config", config_path, "Engine config JSON (default: $QQMATCH_CONFIG)");

    auto* index_cmd = app.add_subcommand("index", "Build the question index from the corpus");
    std::string index_out;
    index_cmd->add_option("--out", index_out, "Index output path (default: config \"index\")");

    auto* query_cmd = app.add_subcommand("query", "Match a query against the index");
    std::string query_text;
    std::optional<long long> top_k;
    query_cmd->add_option("text", query_text, "Query text")->required();
    query_cmd->add_option("-k,--top-k", top_k, "Number of matches to return");

    auto* pair_cmd = app.add_subcommand("score-pair", "Score two questions against each other");
    std::string q1;
    std::string q2;
    pair_cmd->add_option("question1", q1)->required();
    pair_cmd->add_option("question2", q2)->required();

    auto* train_cmd = app.add_subcommand("train-meta", "Train the meta-classifier on labeled pairs");
    std::string train_pairs;
    std::string train_qqp;
    std::string train_mode = "M1";
    std::string train_out;
    TrainOptions train_opts;
    train_cmd->add_option("--pairs", train_pairs, "Labeled pairs TSV");
    train_cmd->add_option("--qqp", train_qqp, "QQP-format CSV");
    train_cmd->add_option("--mode", train_mode, "Feature mode, M1 or M5");
    train_cmd->add_option("--out", train_out, "Model output path");
    train_cmd->add_option("--seed", train_opts.seed, "Calibration split seed");
    train_cmd->add_option("--C", train_opts.C, "Box constraint");

    auto* eval_cmd = app.add_subcommand("evaluate", "Report accuracy and macro F1 on labeled pairs");
    std::string eval_pairs;
    std::string eval_qqp;
    std::string eval_mode = "M1";
    std::string eval_model;
    std::optional<double> eval_threshold;
    eval_cmd->add_option("--pairs", eval_pairs, "Labeled pairs TSV");
    eval_cmd->add_option("--qqp", eval_qqp, "QQP-format CSV");
    eval_cmd->add_option("--mode", eval_mode, "Feature mode, M1 or M5");
    eval_cmd->add_option("--model", eval_model, "Model path (default: from config)");
    eval_cmd->add_option("--threshold", eval_threshold, "Probability threshold");

    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    std::string host;
    std::optional<int> port;
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port, 0 for any free port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kUsage, e.what());
    }

    try {
        if (*index_cmd) {
            return cmd_index(load_config(config_path), index_out);
        }
        if (*query_cmd) {
            if (top_k && *top_k < 1) {
                throw UsageError("--top-k must be at least 1");
            }
            return cmd_query(load_config(config_path), query_text, top_k);
        }
        if (*pair_cmd) {
            return cmd_score_pair(load_config(config_path), q1, q2);
        }
        if (*train_cmd) {
            const FeatureMode mode = parse_mode(train_mode);
            const auto config = load_config(config_path);
            return cmd_train_meta(config, read_pairs(train_pairs, train_qqp), mode, train_out, train_opts);
        }
        if (*eval_cmd) {
            const FeatureMode mode = parse_mode(eval_mode);
            const auto config = load_config(config_path);
            return cmd_evaluate(config, read_pairs(eval_pairs, eval_qqp), mode, eval_model, eval_threshold);
        }
        if (*serve_cmd) {
            return cmd_serve(load_config(config_path), host, port);
        }
    } catch (const UsageError& e) {
        return fail(kUsage, e.what());
    } catch (const ResourceError& e) {
        return fail(kResource, e.what(), e.path());
    } catch (const FormatError& e) {
        return fail(kDataFormat, e.what());
    } catch (const Error& e) {
        return fail(kDomain, e.what());
    } catch (const std::exception& e) {
        return fail(kDomain, e.what());
    }
    return fail(kUsage, "no subcommand");
}
