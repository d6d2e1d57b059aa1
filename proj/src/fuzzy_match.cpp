// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/fuzzy_match.hpp"

#include <algorithm>
#include <numeric>

#include "qqmatch/embedding_store.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

void FuzzyConfig::validate() const
{
    if (!(threshold1 >= 0.0 && threshold1 <= 1.0) || !(threshold2 >= 0.0 && threshold2 <= 1.0)) {
        throw ContractError("fuzzy thresholds must lie in [0, 1]");
    }
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    if (a.size() > b.size()) {
        std::swap(a, b);
    }
    std::vector<std::size_t> row(a.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t j = 1; j <= b.size(); ++j) {
        std::size_t diagonal = row[0];
        row[0] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            const std::size_t above = row[i];
            row[i] = a[i - 1] == b[j - 1] ? diagonal
                                          : 1 + std::min({row[i - 1], row[i], diagonal});
            diagonal = above;
        }
    }
    return row[a.size()];
}

double norm_levenshtein(std::string_view word1, std::string_view word2)
{
    const std::size_t longest = std::max(word1.size(), word2.size());
    if (longest == 0) {
        return 0.0;
    }
    return static_cast<double>(edit_distance(word1, word2)) / static_cast<double>(longest);
}

double scaled_cosine(std::string_view word1, std::string_view word2, const EmbeddingTable& table)
{
    const auto r1 = table.row_of(word1);
    const auto r2 = table.row_of(word2);
    if (!r1 || !r2) {
        throw ContractError("scaled_cosine: '" + std::string(r1 ? word2 : word1) +
                            "' is not in the vocabulary");
    }
    const double n1 = table.norm(*r1);
    const double n2 = table.norm(*r2);
    double c = 0.0;
    if (n1 > 0.0 && n2 > 0.0) {
        c = std::clamp(dot(table.row(*r1), table.row(*r2)) / (n1 * n2), -1.0, 1.0);
    }
    return (c + 1.0) / 2.0;
}

FuzzyResult fuzzy_intersection_ratio(const TokenSet& q1_tokens, const TokenSet& q2_tokens,
                                     const FuzzyConfig& config, const EmbeddingTable& table)
{
    FuzzyResult result;
    std::vector<std::string_view> overlap;
    std::vector<std::string_view> exclusive1;
    std::vector<std::string_view> exclusive2;
    std::set_intersection(q1_tokens.begin(), q1_tokens.end(), q2_tokens.begin(), q2_tokens.end(),
                          std::back_inserter(overlap));
    result.exact_overlap_count = overlap.size();
    if (overlap.empty()) {
        return result;
    }
    std::set_difference(q1_tokens.begin(), q1_tokens.end(), q2_tokens.begin(), q2_tokens.end(),
                        std::back_inserter(exclusive1));
    std::set_difference(q2_tokens.begin(), q2_tokens.end(), q1_tokens.begin(), q1_tokens.end(),
                        std::back_inserter(exclusive2));

    std::vector<bool> matched1(exclusive1.size(), false);
    std::vector<bool> matched2(exclusive2.size(), false);
    for (std::size_t a = 0; a < exclusive1.size(); ++a) {
        const std::string_view word1 = exclusive1[a];
        const bool word1_known = table.contains(word1);
        for (std::size_t b = 0; b < exclusive2.size(); ++b) {
            const std::string_view word2 = exclusive2[b];
            const double syntactic = 1.0 - norm_levenshtein(word1, word2);
            MatchKind kind;
            double score;
            if (syntactic >= config.threshold1) {
                kind = MatchKind::syntactic;
                score = syntactic;
            } else if (word1_known && table.contains(word2)) {
                score = scaled_cosine(word1, word2, table);
                if (score < config.threshold2) {
                    continue;
                }
                kind = MatchKind::semantic;
            } else {
                continue;
            }
            result.partial_overlap += score;
            matched1[a] = true;
            matched2[b] = true;
            result.matched_pairs.push_back({std::string(word1), std::string(word2), kind, score});
            break;
        }
    }

    const auto l0 = static_cast<double>(overlap.size());
    const auto l1 = static_cast<double>(std::count(matched1.begin(), matched1.end(), true));
    const auto l2 = static_cast<double>(exclusive1.size()) - l1;
    const auto l3 = static_cast<double>(std::count(matched2.begin(), matched2.end(), false));
    result.score = (l0 + result.partial_overlap) / (l0 + l1 + l2 + l3);
    return result;
}

} // namespace qqmatch
