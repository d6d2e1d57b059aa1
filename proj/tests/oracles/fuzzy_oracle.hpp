// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

// Line-by-line transcription of the fuzzy intersection ratio, with its own
// edit distance and vector cosine. Shares no code with the engine.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Vocabulary = std::map<std::string, std::vector<double>>;

inline std::size_t levenshtein(const std::string& a, const std::string& b)
{
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) {
        d[i][0] = i;
    }
    for (std::size_t j = 0; j <= b.size(); ++j) {
        d[0][j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d[a.size()][b.size()];
}

inline double norm_levenshtein_distance(const std::string& a, const std::string& b)
{
    const std::size_t n = std::max(a.size(), b.size());
    return n == 0 ? 0.0 : static_cast<double>(levenshtein(a, b)) / static_cast<double>(n);
}

inline double norm_cosine_similarity(const std::vector<double>& u, const std::vector<double>& v)
{
    double uv = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        uv += u[k] * v[k];
        uu += u[k] * u[k];
        vv += v[k] * v[k];
    }
    double c = 0.0;
    if (uu > 0.0 && vv > 0.0) {
        c = uv / (std::sqrt(uu) * std::sqrt(vv));
    }
    c = std::max(-1.0, std::min(1.0, c));
    return (c + 1.0) / 2.0;
}

inline double fuzzy_set_ratio(const std::set<std::string>& s1, const std::set<std::string>& s2,
                              double threshold1, double threshold2, const Vocabulary& vocabulary)
{
    std::set<std::string> overlap;
    for (const auto& w : s1) {
        if (s2.count(w)) {
            overlap.insert(w);
        }
    }
    if (overlap.empty()) {
        return 0.0;
    }
    std::set<std::string> exclusive_s1;
    std::set<std::string> exclusive_s2;
    for (const auto& w : s1) {
        if (!s2.count(w)) {
            exclusive_s1.insert(w);
        }
    }
    for (const auto& w : s2) {
        if (!s1.count(w)) {
            exclusive_s2.insert(w);
        }
    }
    std::set<std::string> rem_s1;
    std::set<std::string> rem_s2;
    double partial_overlap = 0.0;
    for (const auto& word1 : exclusive_s1) {
        for (const auto& word2 : exclusive_s2) {
            const double dist = norm_levenshtein_distance(word1, word2);
            const double syntactic_similarity = 1.0 - dist;
            if (syntactic_similarity >= threshold1) {
                partial_overlap += syntactic_similarity;
                rem_s1.insert(word1);
                rem_s2.insert(word2);
                break;
            } else if (vocabulary.count(word1) && vocabulary.count(word2)) {
                const double semantic_score =
                    norm_cosine_similarity(vocabulary.at(word1), vocabulary.at(word2));
                if (semantic_score >= threshold2) {
                    partial_overlap += semantic_score;
                    rem_s1.insert(word1);
                    rem_s2.insert(word2);
                    break;
                }
            }
        }
    }
    std::set<std::string> unmatched_s1;
    std::set<std::string> unmatched_s2;
    for (const auto& w : exclusive_s1) {
        if (!rem_s1.count(w)) {
            unmatched_s1.insert(w);
        }
    }
    for (const auto& w : exclusive_s2) {
        if (!rem_s2.count(w)) {
            unmatched_s2.insert(w);
        }
    }
    const double l0 = static_cast<double>(overlap.size());
    const double l1 = static_cast<double>(rem_s1.size());
    const double l2 = static_cast<double>(unmatched_s1.size());
    const double l3 = static_cast<double>(unmatched_s2.size());
    return (l0 + partial_overlap) / (l0 + l1 + l2 + l3);
}

} // namespace oracle
