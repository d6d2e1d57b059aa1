// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qqmatch {

using DenseVector = std::vector<double>;

/// Word-vector table loaded from the whitespace-separated text format:
/// a "<count> <dim>" header followed by one "<token> <f1> ... <f_dim>" row
/// per token. Immutable after construction.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim);

    static EmbeddingTable load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Appends a row; throws FormatError on duplicates or a wrong length.
    void add(std::string token, std::span<const double> values);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    bool contains(std::string_view token) const;

    std::optional<std::span<const double>> find(std::string_view token) const;

    /// L2 norm of a stored row, cached at insertion.
    double norm(std::size_t row) const { return norms_[row]; }
    std::optional<std::size_t> row_of(std::string_view token) const;
    std::span<const double> row(std::size_t index) const;

    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept
        {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::size_t dim_;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> vocab_;
    std::vector<double> matrix_;
    std::vector<double> norms_;
};

/// Mean of the in-vocabulary token vectors; zero when none are known.
DenseVector average_embedding(std::span<const std::string> tokens, const EmbeddingTable& table);

double dot(std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> v);

/// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
/// Throws ContractError on a dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Returns v scaled to unit length, or v unchanged when it is all zeros.
DenseVector unit_or_zero(std::span<const double> v);

} // namespace qqmatch
