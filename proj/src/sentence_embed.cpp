// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/sentence_embed.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "file_util.hpp"

namespace qqmatch {

namespace {

DenseVector parse_vector(const nlohmann::json& value, const std::string& where)
{
    if (!value.is_array()) {
        throw FormatError(where + ": vector is not an array");
    }
    DenseVector out;
    out.reserve(value.size());
    for (const auto& x : value) {
        if (!x.is_number()) {
            throw FormatError(where + ": vector has a non-numeric entry");
        }
        const double v = x.get<double>();
        if (!std::isfinite(v)) {
            throw FormatError(where + ": vector has a non-finite entry");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace

DenseVector DisabledProvider::embed(const std::string&) const
{
    throw ProviderError(ProviderError::Reason::disabled, "sentence embedding provider is disabled");
}

FileCacheProvider::FileCacheProvider(std::unordered_map<std::string, DenseVector> entries,
                                     std::size_t dim)
    : entries_(std::move(entries)), dim_(dim)
{
    if (dim_ == 0) {
        throw ContractError("sentence embedding dim must be positive");
    }
    for (const auto& [text, v] : entries_) {
        if (v.size() != dim_) {
            throw FormatError("cache vector for '" + text + "' has dim " + std::to_string(v.size()) +
                              ", expected " + std::to_string(dim_));
        }
    }
}

FileCacheProvider FileCacheProvider::load(const std::filesystem::path& path)
{
    std::unordered_map<std::string, DenseVector> entries;
    std::size_t dim = 0;
    const auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (detail::trim(lines[n]).empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(n + 1);
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(lines[n]);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(where + ": " + e.what());
        }
        if (!row.is_object() || !row.contains("text") || !row["text"].is_string() ||
            !row.contains("vector")) {
            throw FormatError(where + ": expected {\"text\": ..., \"vector\": [...]}");
        }
        DenseVector v = parse_vector(row["vector"], where);
        if (dim == 0) {
            dim = v.size();
        }
        if (v.size() != dim || dim == 0) {
            throw FormatError(where + ": vector dim " + std::to_string(v.size()) +
                              " differs from " + std::to_string(dim));
        }
        entries.insert_or_assign(row["text"].get<std::string>(), std::move(v));
    }
    if (entries.empty()) {
        throw FormatError(path.string() + ": sentence cache is empty");
    }
    return FileCacheProvider(std::move(entries), dim);
}

DenseVector FileCacheProvider::embed(const std::string& text) const
{
    if (auto it = entries_.find(text); it != entries_.end()) {
        return it->second;
    }
    throw ProviderError(ProviderError::Reason::miss, "sentence cache miss for '" + text + "'");
}

RemoteProvider::RemoteProvider(std::string endpoint, std::size_t dim,
                               std::chrono::milliseconds timeout)
    : dim_(dim), timeout_(timeout)
{
    if (dim_ == 0) {
        throw ContractError("remote sentence provider needs a positive dim");
    }
    const auto scheme = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        base_ = endpoint;
        path_ = "/embed";
    } else {
        base_ = endpoint.substr(0, path_start);
        path_ = endpoint.substr(path_start);
        if (path_ == "/") {
            path_ = "/embed";
        }
    }
}

std::vector<DenseVector> RemoteProvider::embed_batch(const std::vector<std::string>& texts) const
{
    httplib::Client client(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const nlohmann::json body = {{"texts", texts}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) {
        throw ProviderError(ProviderError::Reason::transport,
                            "sentence sidecar " + base_ + path_ + " unreachable: " +
                                httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ProviderError(ProviderError::Reason::transport,
                            "sentence sidecar returned HTTP " + std::to_string(res->status));
    }
    try {
        const auto doc = nlohmann::json::parse(res->body);
        const auto& vectors = doc.at("vectors");
        if (!vectors.is_array() || vectors.size() != texts.size()) {
            throw ProviderError(ProviderError::Reason::protocol,
                                "sentence sidecar returned a wrong number of vectors");
        }
        if (doc.contains("dim") && doc["dim"].get<std::size_t>() != dim_) {
            throw ProviderError(ProviderError::Reason::protocol,
                                "sentence sidecar dim " + doc["dim"].dump() + " != expected " +
                                    std::to_string(dim_));
        }
        std::vector<DenseVector> out;
        out.reserve(texts.size());
        for (const auto& v : vectors) {
            out.push_back(parse_vector(v, "sentence sidecar"));
            if (out.back().size() != dim_) {
                throw ProviderError(ProviderError::Reason::protocol,
                                    "sentence sidecar returned a vector of dim " +
                                        std::to_string(out.back().size()));
            }
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(ProviderError::Reason::protocol,
                            std::string("malformed sidecar response: ") + e.what());
    } catch (const FormatError& e) {
        throw ProviderError(ProviderError::Reason::protocol, e.what());
    }
}

DenseVector RemoteProvider::embed(const std::string& text) const
{
    return std::move(embed_batch({text}).front());
}

double sentence_score(std::span<const double> v1, std::span<const double> v2)
{
    return cosine(v1, v2);
}

} // namespace qqmatch
