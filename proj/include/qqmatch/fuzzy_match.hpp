// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qqmatch {

class EmbeddingTable;

/// Ordered so that iteration (and therefore matching) is lexicographic.
using TokenSet = std::set<std::string>;

struct FuzzyConfig {
    double threshold1 = 0.6;   // syntactic: 1 - normalized Levenshtein
    double threshold2 = 0.55;  // semantic: cosine rescaled to [0, 1]

    /// Throws ContractError unless both thresholds lie in [0, 1].
    void validate() const;
};

enum class MatchKind { syntactic, semantic };

struct MatchedPair {
    std::string word1;
    std::string word2;
    MatchKind kind = MatchKind::syntactic;
    double pair_score = 0.0;
};

struct FuzzyResult {
    double score = 0.0;
    std::size_t exact_overlap_count = 0;
    double partial_overlap = 0.0;
    std::vector<MatchedPair> matched_pairs;
};

std::size_t edit_distance(std::string_view a, std::string_view b);

/// edit_distance / max(len); 0 for two empty words.
double norm_levenshtein(std::string_view word1, std::string_view word2);

/// (cosine + 1) / 2 of the two word vectors. Both words must be in the
/// table; throws ContractError otherwise.
double scaled_cosine(std::string_view word1, std::string_view word2, const EmbeddingTable& table);

/// Fuzzy intersection ratio between a query token set and a candidate
/// question token set.
///
/// Zero when the sets share no token. Otherwise every word exclusive to q1
/// is compared, in order, with the words exclusive to q2: the first q2 word
/// that is syntactically close (1 - normalized Levenshtein >= threshold1)
/// or, failing that, semantically close (scaled cosine >= threshold2, both
/// words in the table) is matched and the scan moves on to the next q1
/// word. Matched words leave the exclusive sets only after the scan, so one
/// q2 word may absorb several q1 words. The score is
///   (|overlap| + sum of match scores) /
///   (|overlap| + |matched q1 words| + |unmatched q1| + |unmatched q2|).
FuzzyResult fuzzy_intersection_ratio(const TokenSet& q1_tokens, const TokenSet& q2_tokens,
                                     const FuzzyConfig& config, const EmbeddingTable& table);

} // namespace qqmatch
