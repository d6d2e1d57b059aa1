// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace qqmatch {

/// One suffix-stripping rule. A rule whose replacement equals its suffix
/// is a guard: the token is kept as-is and no later rule is tried.
struct SuffixRule {
    std::string suffix;
    std::string replacement;
    bool undouble = false;  // "stopped" -> "stopp" -> "stop"
};

std::vector<SuffixRule> default_verb_suffix_rules();
std::vector<SuffixRule> default_noun_suffix_rules();

/// Replacement tables and lexicons driving the text pipeline.
///
/// Keys are stored cleaned (lower-case, punctuation replaced by spaces);
/// contraction keys keep their apostrophes. Product keys may span several
/// tokens, acronym keys are single tokens.
struct NormalizationConfig {
    std::unordered_map<std::string, std::string> contractions;
    std::unordered_map<std::string, std::string> products;
    std::unordered_map<std::string, std::string> acronyms;
    std::unordered_map<std::string, std::string> verb_exceptions;
    std::unordered_map<std::string, std::string> noun_exceptions;
    std::vector<SuffixRule> verb_suffix_rules = default_verb_suffix_rules();
    std::vector<SuffixRule> noun_suffix_rules = default_noun_suffix_rules();
    std::unordered_set<std::string> verb_lexicon;
    std::unordered_set<std::string> noun_lexicon;
    std::unordered_set<std::string> stop_tokens;

    /// Files backing a config; any path may be empty.
    struct Paths {
        std::filesystem::path contractions;     // JSON object
        std::filesystem::path products;         // JSON object
        std::filesystem::path acronyms;         // JSON object
        std::filesystem::path verb_lexicon;     // one token per line
        std::filesystem::path noun_lexicon;     // one token per line
        std::filesystem::path verb_exceptions;  // inflected<TAB>base
        std::filesystem::path noun_exceptions;  // plural<TAB>singular
        std::filesystem::path stop_tokens;      // one token per line
    };

    static NormalizationConfig load(const Paths& paths);

    /// Inserts entries with their keys and values cleaned the same way the
    /// pipeline cleans input text.
    void add_contraction(std::string_view key, std::string_view expansion);
    void add_product(std::string_view surface, std::string_view canonical);
    void add_acronym(std::string_view acronym, std::string_view expansion);

    /// Throws FormatError when a replacement value would itself be rewritten
    /// by a later stage, or a lexicon overlaps the stop tokens.
    void validate() const;

    std::size_t longest_product_key() const noexcept { return longest_product_; }

private:
    std::size_t longest_product_ = 0;
};

/// Output of the full pipeline for one piece of text.
struct PreprocessedQuery {
    std::string raw;
    std::string unnormalized;
    std::string normalized;
    std::vector<std::string> unnorm_tokens;
    std::vector<std::string> norm_tokens;
    std::set<std::string> fuzzy_token_set;
};

/// Lower-cases ASCII, replaces every character outside [a-z0-9] with a space,
/// collapses whitespace runs and trims. Bytes of multi-byte UTF-8 sequences
/// count as punctuation.
std::string basic_clean(std::string_view text);

/// Same as basic_clean but keeps apostrophes (typographic ones are folded
/// to "'") so contraction keys survive the first pass.
std::string basic_clean_keep_apostrophes(std::string_view text);

std::vector<std::string> split_tokens(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);

std::string expand_contractions(std::string_view text, const NormalizationConfig& config);
std::string normalize_products(std::string_view text, const NormalizationConfig& config);
std::string expand_acronyms(std::string_view text, const NormalizationConfig& config);

std::vector<std::string> lemmatize_verbs(std::span<const std::string> tokens,
                                         const NormalizationConfig& config);
std::vector<std::string> singularize_nouns(std::span<const std::string> tokens,
                                           const NormalizationConfig& config);

PreprocessedQuery preprocess(std::string_view raw_text, const NormalizationConfig& config);

} // namespace qqmatch
