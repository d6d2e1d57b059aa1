// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "file_util.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

namespace {

std::vector<std::string_view> split_spaces(std::string_view line)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (pos < line.size()) {
        const auto start = line.find_first_not_of(" \t", pos);
        if (start == std::string_view::npos) {
            break;
        }
        auto end = line.find_first_of(" \t", start);
        if (end == std::string_view::npos) {
            end = line.size();
        }
        parts.push_back(line.substr(start, end - start));
        pos = end;
    }
    return parts;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

} // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim)
{
    if (dim == 0) {
        throw ContractError("embedding dimension must be positive");
    }
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path)
{
    const auto lines = detail::read_lines(path);
    const std::string where = path.string();
    if (lines.empty() || detail::trim(lines.front()).empty()) {
        throw FormatError(where + ":1: missing \"<count> <dim>\" header");
    }
    const auto header = split_spaces(lines.front());
    std::size_t count = 0;
    std::size_t dim = 0;
    if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) ||
        dim == 0) {
        throw FormatError(where + ":1: malformed header '" + lines.front() + "'");
    }

    EmbeddingTable table(dim);
    table.tokens_.reserve(count);
    table.matrix_.reserve(count * dim);
    std::vector<double> row(dim);
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (detail::trim(lines[n]).empty()) {
            continue;
        }
        const auto parts = split_spaces(lines[n]);
        const std::string line_ref = where + ":" + std::to_string(n + 1);
        if (parts.size() != dim + 1) {
            throw FormatError(line_ref + ": expected " + std::to_string(dim) + " values, found " +
                              std::to_string(parts.size() - 1));
        }
        for (std::size_t k = 0; k < dim; ++k) {
            if (!parse_number(parts[k + 1], row[k]) || !std::isfinite(row[k])) {
                throw FormatError(line_ref + ": bad number '" + std::string(parts[k + 1]) + "'");
            }
        }
        if (table.contains(parts[0])) {
            throw FormatError(line_ref + ": duplicate token '" + std::string(parts[0]) + "'");
        }
        table.add(std::string(parts[0]), row);
    }
    if (table.size() != count) {
        throw FormatError(where + ": header declares " + std::to_string(count) + " rows, found " +
                          std::to_string(table.size()));
    }
    return table;
}

void EmbeddingTable::save(const std::filesystem::path& path) const
{
    std::ostringstream out;
    out << size() << ' ' << dim_ << '\n';
    out << std::setprecision(17);
    for (std::size_t r = 0; r < size(); ++r) {
        out << tokens_[r];
        for (double v : row(r)) {
            out << ' ' << v;
        }
        out << '\n';
    }
    detail::write_file(path, out.str());
}

void EmbeddingTable::add(std::string token, std::span<const double> values)
{
    if (values.size() != dim_) {
        throw FormatError("row for '" + token + "' has " + std::to_string(values.size()) +
                          " values, table dim is " + std::to_string(dim_));
    }
    if (vocab_.contains(token)) {
        throw FormatError("duplicate token '" + token + "'");
    }
    vocab_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    matrix_.insert(matrix_.end(), values.begin(), values.end());
    norms_.push_back(l2_norm(values));
}

bool EmbeddingTable::contains(std::string_view token) const
{
    return vocab_.find(token) != vocab_.end();
}

std::optional<std::size_t> EmbeddingTable::row_of(std::string_view token) const
{
    if (auto it = vocab_.find(token); it != vocab_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::span<const double> EmbeddingTable::row(std::size_t index) const
{
    return std::span<const double>(matrix_).subspan(index * dim_, dim_);
}

std::optional<std::span<const double>> EmbeddingTable::find(std::string_view token) const
{
    if (auto r = row_of(token)) {
        return row(*r);
    }
    return std::nullopt;
}

DenseVector average_embedding(std::span<const std::string> tokens, const EmbeddingTable& table)
{
    DenseVector sum(table.dim(), 0.0);
    std::size_t known = 0;
    for (const auto& token : tokens) {
        if (auto v = table.find(token)) {
            for (std::size_t k = 0; k < sum.size(); ++k) {
                sum[k] += (*v)[k];
            }
            ++known;
        }
    }
    if (known > 0) {
        for (auto& x : sum) {
            x /= static_cast<double>(known);
        }
    }
    return sum;
}

double dot(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size()) {
        throw ContractError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                            std::to_string(v.size()));
    }
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        s += u[k] * v[k];
    }
    return s;
}

double l2_norm(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

double cosine(std::span<const double> u, std::span<const double> v)
{
    const double d = dot(u, v);
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) {
        return 0.0;
    }
    return std::clamp(d / (nu * nv), -1.0, 1.0);
}

DenseVector unit_or_zero(std::span<const double> v)
{
    DenseVector out(v.begin(), v.end());
    const double n = l2_norm(v);
    if (n > 0.0) {
        for (auto& x : out) {
            x /= n;
        }
    }
    return out;
}

} // namespace qqmatch
