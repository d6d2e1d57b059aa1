// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/textnorm.hpp"

#include <algorithm>

#include "file_util.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

namespace {

bool is_word_char(unsigned char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

std::string clean_impl(std::string_view text, bool keep_apostrophes)
{
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<unsigned char>(c - 'A' + 'a');
        }
        bool apostrophe = c == '\'';
        // U+2018 / U+2019 (E2 80 98 / E2 80 99)
        if (keep_apostrophes && c == 0xE2 && i + 2 < text.size() &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
             static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            apostrophe = true;
            c = '\'';
            i += 2;
        }
        if (is_word_char(c) || (keep_apostrophes && apostrophe)) {
            if (pending_space && !out.empty()) {
                out.push_back(' ');
            }
            pending_space = false;
            out.push_back(static_cast<char>(c));
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::string apply_suffix_rules(const std::string& token, const std::vector<SuffixRule>& rules)
{
    for (const auto& rule : rules) {
        if (token.size() <= rule.suffix.size() ||
            token.compare(token.size() - rule.suffix.size(), rule.suffix.size(), rule.suffix) != 0) {
            continue;
        }
        if (rule.replacement == rule.suffix) {
            return token;
        }
        std::string stem = token.substr(0, token.size() - rule.suffix.size());
        if (stem.size() < 2) {
            continue;
        }
        if (rule.undouble && stem.size() >= 3 && stem.back() == stem[stem.size() - 2] &&
            std::string_view("aeioulsz").find(stem.back()) == std::string_view::npos) {
            stem.pop_back();
        }
        return stem + rule.replacement;
    }
    return token;
}

std::unordered_map<std::string, std::string> read_json_map(const std::filesystem::path& path)
{
    std::unordered_map<std::string, std::string> out;
    if (path.empty()) {
        return out;
    }
    const auto doc = detail::read_json(path);
    if (!doc.is_object()) {
        throw FormatError(path.string() + ": expected a JSON object of string pairs");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string()) {
            throw FormatError(path.string() + ": value for '" + key + "' is not a string");
        }
        out.emplace(key, value.get<std::string>());
    }
    return out;
}

std::unordered_set<std::string> read_lexicon(const std::filesystem::path& path)
{
    std::unordered_set<std::string> out;
    if (path.empty()) {
        return out;
    }
    for (const auto& raw : detail::read_lines(path)) {
        const std::string line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        out.insert(basic_clean(line));
    }
    return out;
}

std::unordered_map<std::string, std::string> read_exceptions(const std::filesystem::path& path)
{
    std::unordered_map<std::string, std::string> out;
    if (path.empty()) {
        return out;
    }
    const auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string line = detail::trim(lines[n]);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw FormatError(path.string() + ":" + std::to_string(n + 1) +
                              ": expected two tab-separated columns");
        }
        const std::string from = basic_clean(line.substr(0, tab));
        const std::string to = basic_clean(line.substr(tab + 1));
        if (from.empty() || to.empty() || from.find(' ') != std::string::npos ||
            to.find(' ') != std::string::npos) {
            throw FormatError(path.string() + ":" + std::to_string(n + 1) +
                              ": both columns must be single tokens");
        }
        out[from] = to;
    }
    return out;
}

} // namespace

std::vector<SuffixRule> default_verb_suffix_rules()
{
    return {
        {"ies", "y", false},
        {"ied", "y", false},
        {"ing", "", true},
        {"ed", "", true},
        {"ss", "ss", false},
        {"s", "", false},
    };
}

std::vector<SuffixRule> default_noun_suffix_rules()
{
    return {
        {"sses", "ss", false},
        {"ies", "y", false},
        {"xes", "x", false},
        {"ches", "ch", false},
        {"shes", "sh", false},
        {"ss", "ss", false},
        {"us", "us", false},
        {"is", "is", false},
        {"s", "", false},
    };
}

std::string basic_clean(std::string_view text)
{
    return clean_impl(text, false);
}

std::string basic_clean_keep_apostrophes(std::string_view text)
{
    return clean_impl(text, true);
}

std::vector<std::string> split_tokens(std::string_view text)
{
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto start = text.find_first_not_of(" \t\r\n", pos);
        if (start == std::string_view::npos) {
            break;
        }
        auto end = text.find_first_of(" \t\r\n", start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        tokens.emplace_back(text.substr(start, end - start));
        pos = end;
    }
    return tokens;
}

std::string join_tokens(std::span<const std::string> tokens)
{
    std::string out;
    for (const auto& t : tokens) {
        if (t.empty()) {
            continue;
        }
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

void NormalizationConfig::add_contraction(std::string_view key, std::string_view expansion)
{
    contractions[basic_clean_keep_apostrophes(key)] = basic_clean(expansion);
}

void NormalizationConfig::add_product(std::string_view surface, std::string_view canonical)
{
    const std::string key = basic_clean(surface);
    if (key.empty()) {
        throw FormatError("empty product surface form");
    }
    products[key] = basic_clean(canonical);
    longest_product_ = std::max(longest_product_, split_tokens(key).size());
}

void NormalizationConfig::add_acronym(std::string_view acronym, std::string_view expansion)
{
    const std::string key = basic_clean(acronym);
    if (key.empty() || key.find(' ') != std::string::npos) {
        throw FormatError("acronym key '" + std::string(acronym) + "' must be a single token");
    }
    acronyms[key] = basic_clean(expansion);
}

NormalizationConfig NormalizationConfig::load(const Paths& paths)
{
    NormalizationConfig config;
    for (const auto& [k, v] : read_json_map(paths.contractions)) {
        config.add_contraction(k, v);
    }
    for (const auto& [k, v] : read_json_map(paths.products)) {
        config.add_product(k, v);
    }
    for (const auto& [k, v] : read_json_map(paths.acronyms)) {
        config.add_acronym(k, v);
    }
    config.verb_lexicon = read_lexicon(paths.verb_lexicon);
    config.noun_lexicon = read_lexicon(paths.noun_lexicon);
    config.verb_exceptions = read_exceptions(paths.verb_exceptions);
    config.noun_exceptions = read_exceptions(paths.noun_exceptions);
    config.stop_tokens = read_lexicon(paths.stop_tokens);
    config.validate();
    return config;
}

void NormalizationConfig::validate() const
{
    for (const auto& [key, value] : contractions) {
        if (expand_contractions(value, *this) != value) {
            throw FormatError("contraction expansion '" + value + "' contains a contraction key");
        }
    }
    const auto downstream_fixed = [this](const std::string& value) {
        return expand_contractions(value, *this) == value &&
               normalize_products(value, *this) == value && expand_acronyms(value, *this) == value;
    };
    for (const auto& [key, value] : products) {
        if (!downstream_fixed(value)) {
            throw FormatError("product canonical form '" + value + "' would be rewritten again");
        }
    }
    for (const auto& [key, value] : acronyms) {
        if (!downstream_fixed(value)) {
            throw FormatError("acronym expansion '" + value + "' would be rewritten again");
        }
    }
    for (const auto* lexicon : {&verb_lexicon, &noun_lexicon}) {
        for (const auto& token : *lexicon) {
            if (stop_tokens.contains(token)) {
                throw FormatError("lexicon token '" + token + "' is also a stop token");
            }
        }
    }
}

std::string expand_contractions(std::string_view text, const NormalizationConfig& config)
{
    std::vector<std::string> out;
    for (auto& token : split_tokens(text)) {
        auto it = config.contractions.find(token);
        if (it == config.contractions.end()) {
            const auto first = token.find_first_not_of('\'');
            const auto last = token.find_last_not_of('\'');
            if (first != std::string::npos && (first != 0 || last != token.size() - 1)) {
                it = config.contractions.find(token.substr(first, last - first + 1));
            }
        }
        out.push_back(it != config.contractions.end() ? it->second : std::move(token));
    }
    return join_tokens(out);
}

std::string normalize_products(std::string_view text, const NormalizationConfig& config)
{
    const auto tokens = split_tokens(basic_clean(text));
    if (config.products.empty()) {
        return join_tokens(tokens);
    }
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const std::size_t max_len = std::min(config.longest_product_key(), tokens.size() - i);
        bool matched = false;
        for (std::size_t len = max_len; len >= 1; --len) {
            const std::string key =
                join_tokens(std::span<const std::string>(tokens).subspan(i, len));
            if (auto it = config.products.find(key); it != config.products.end()) {
                out.push_back(it->second);
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.push_back(tokens[i]);
            ++i;
        }
    }
    return join_tokens(out);
}

std::string expand_acronyms(std::string_view text, const NormalizationConfig& config)
{
    const auto tokens = split_tokens(basic_clean(text));
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const std::string& token = tokens[i];
        ++i;
        auto it = config.acronyms.find(token);
        if (it == config.acronyms.end() || config.products.contains(token)) {
            out.push_back(token);
            continue;
        }
        const auto expansion = split_tokens(it->second);
        const auto n = expansion.size();
        // "individual retirement account ira" collapses onto the spelled-out form.
        if (out.size() >= n && std::equal(expansion.begin(), expansion.end(), out.end() - n)) {
            continue;
        }
        out.insert(out.end(), expansion.begin(), expansion.end());
        // "ira individual retirement account" likewise.
        if (tokens.size() - i >= n && std::equal(expansion.begin(), expansion.end(), tokens.begin() + i)) {
            i += n;
        }
    }
    return join_tokens(out);
}

std::vector<std::string> lemmatize_verbs(std::span<const std::string> tokens,
                                         const NormalizationConfig& config)
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (auto it = config.verb_exceptions.find(token); it != config.verb_exceptions.end()) {
            out.push_back(it->second);
        } else if (config.verb_lexicon.contains(token)) {
            out.push_back(apply_suffix_rules(token, config.verb_suffix_rules));
        } else {
            out.push_back(token);
        }
    }
    return out;
}

std::vector<std::string> singularize_nouns(std::span<const std::string> tokens,
                                           const NormalizationConfig& config)
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (auto it = config.noun_exceptions.find(token); it != config.noun_exceptions.end()) {
            out.push_back(it->second);
        } else if (config.noun_lexicon.contains(token)) {
            out.push_back(apply_suffix_rules(token, config.noun_suffix_rules));
        } else {
            out.push_back(token);
        }
    }
    return out;
}

PreprocessedQuery preprocess(std::string_view raw_text, const NormalizationConfig& config)
{
    PreprocessedQuery q;
    q.raw = std::string(raw_text);

    std::string text = basic_clean_keep_apostrophes(raw_text);
    text = expand_contractions(text, config);
    text = normalize_products(text, config);
    text = expand_acronyms(text, config);
    q.unnormalized = basic_clean(text);

    q.unnorm_tokens = split_tokens(q.unnormalized);
    q.norm_tokens = singularize_nouns(lemmatize_verbs(q.unnorm_tokens, config), config);
    q.normalized = join_tokens(q.norm_tokens);
    q.fuzzy_token_set = {q.unnorm_tokens.begin(), q.unnorm_tokens.end()};
    return q;
}

} // namespace qqmatch
