// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qqmatch/embedding_store.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

enum class ProviderKind { disabled, file_cache, remote };

/// Raised when a provider cannot serve a vector; callers fall back to the
/// four-feature model for that request.
class ProviderError : public Error {
public:
    enum class Reason { disabled, miss, transport, protocol };

    ProviderError(Reason reason, const std::string& what) : Error(what), reason_(reason) {}
    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

/// Source of pooled sentence vectors for the fifth feature.
class SentenceEmbeddingProvider {
public:
    virtual ~SentenceEmbeddingProvider() = default;

    virtual ProviderKind kind() const noexcept = 0;
    virtual std::size_t dim() const noexcept = 0;

    /// Vector for the preprocessed (unnormalized) text. Throws ProviderError.
    virtual DenseVector embed(const std::string& text) const = 0;

    bool available() const noexcept { return kind() != ProviderKind::disabled; }
};

class DisabledProvider final : public SentenceEmbeddingProvider {
public:
    ProviderKind kind() const noexcept override { return ProviderKind::disabled; }
    std::size_t dim() const noexcept override { return 0; }
    DenseVector embed(const std::string& text) const override;
};

/// Exact-text lookup in a JSON-lines file of {"text": ..., "vector": [...]}.
class FileCacheProvider final : public SentenceEmbeddingProvider {
public:
    FileCacheProvider(std::unordered_map<std::string, DenseVector> entries, std::size_t dim);

    static FileCacheProvider load(const std::filesystem::path& path);

    ProviderKind kind() const noexcept override { return ProviderKind::file_cache; }
    std::size_t dim() const noexcept override { return dim_; }
    DenseVector embed(const std::string& text) const override;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::unordered_map<std::string, DenseVector> entries_;
    std::size_t dim_;
};

/// Client for a sidecar answering POST /embed {"texts": [...]} with
/// {"vectors": [[...]], "dim": n}. Each call opens its own connection,
/// so concurrent use needs no locking.
class RemoteProvider final : public SentenceEmbeddingProvider {
public:
    /// endpoint: "http://host:port" optionally followed by a path
    /// (defaults to /embed). dim: the vector length the sidecar must return.
    RemoteProvider(std::string endpoint, std::size_t dim,
                   std::chrono::milliseconds timeout = std::chrono::milliseconds(500));

    ProviderKind kind() const noexcept override { return ProviderKind::remote; }
    std::size_t dim() const noexcept override { return dim_; }
    DenseVector embed(const std::string& text) const override;
    std::vector<DenseVector> embed_batch(const std::vector<std::string>& texts) const;

private:
    std::string base_;
    std::string path_;
    std::size_t dim_;
    std::chrono::milliseconds timeout_;
};

double sentence_score(std::span<const double> v1, std::span<const double> v2);

} // namespace qqmatch
