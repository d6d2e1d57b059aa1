// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

// Python bindings. Responses cross the boundary as the same JSON text the
// CLI and HTTP service emit; the Python package decodes them.

#include <memory>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qqmatch/engine.hpp"
#include "qqmatch/errors.hpp"

namespace py = pybind11;
using namespace qqmatch;

namespace {

nlohmann::json fuzzy_json(const FuzzyResult& r)
{
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.matched_pairs) {
        pairs.push_back({{"word1", p.word1},
                         {"word2", p.word2},
                         {"kind", p.kind == MatchKind::syntactic ? "syntactic" : "semantic"},
                         {"score", p.pair_score}});
    }
    return {{"score", r.score},
            {"exact_overlap_count", r.exact_overlap_count},
            {"partial_overlap", r.partial_overlap},
            {"matched_pairs", pairs}};
}

} // namespace

PYBIND11_MODULE(_qqmatch, m)
{
    m.doc() = "qqmatch engine bindings";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    m.def("basic_clean", [](const std::string& s) { return basic_clean(s); });
    m.def("edit_distance", [](const std::string& a, const std::string& b) { return edit_distance(a, b); });
    m.def("norm_levenshtein", [](const std::string& a, const std::string& b) { return norm_levenshtein(a, b); });

    m.def(
        "build_index",
        [](const std::filesystem::path& config_path, const std::filesystem::path& out) {
            const auto config = EngineConfig::load(config_path);
            const auto target = out.empty() ? config.index : out;
            const auto resources = load_resources(config);
            const auto index = build_index(load_corpus(config.corpus), resources);
            index.save(target);
            return index.size();
        },
        py::arg("config"), py::arg("out") = std::filesystem::path());

    py::class_<Resources, std::shared_ptr<Resources>>(m, "Resources")
        .def(py::init([](const std::filesystem::path& config_path) {
                 return std::make_shared<Resources>(load_resources(EngineConfig::load(config_path)));
             }),
             py::arg("config"))
        .def("preprocess_json",
             [](const Resources& r, const std::string& text) {
                 const auto q = preprocess(text, r.normalization);
                 return nlohmann::json{{"unnormalized", q.unnormalized},
                                       {"normalized", q.normalized},
                                       {"fuzzy_token_set", q.fuzzy_token_set}}
                     .dump();
             })
        .def("fuzzy_json",
             [](const Resources& r, const std::string& q1, const std::string& q2) {
                 const auto a = preprocess(q1, r.normalization).fuzzy_token_set;
                 const auto b = preprocess(q2, r.normalization).fuzzy_token_set;
                 return fuzzy_json(fuzzy_intersection_ratio(a, b, r.fuzzy, *r.embeddings)).dump();
             })
        .def("fuzzy_tokens_json", [](const Resources& r, const TokenSet& a, const TokenSet& b) {
            return fuzzy_json(fuzzy_intersection_ratio(a, b, r.fuzzy, *r.embeddings)).dump();
        });

    py::class_<Engine, std::shared_ptr<Engine>>(m, "Engine")
        .def(py::init([](const std::filesystem::path& config_path) {
                 return std::make_shared<Engine>(Engine::open(EngineConfig::load(config_path)));
             }),
             py::arg("config"))
        .def(
            "match_json",
            [](const Engine& e, const std::string& query, std::size_t top_k) {
                if (top_k < 1) {
                    throw ContractError("top_k must be at least 1");
                }
                std::string out;
                {
                    py::gil_scoped_release release;
                    out = render(to_json(e.match(query, top_k)));
                }
                return out;
            },
            py::arg("query"), py::arg("top_k") = 5)
        .def("score_json",
             [](const Engine& e, const std::string& q1, const std::string& q2) {
                 py::gil_scoped_release release;
                 return render(to_json(e.score(q1, q2)));
             })
        .def("health_json", [](const Engine& e) { return render(health_json(e)); })
        .def_property_readonly("corpus_size", [](const Engine& e) { return e.index().size(); });
}
