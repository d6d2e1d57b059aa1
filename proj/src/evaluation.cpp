// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/evaluation.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "file_util.hpp"
#include "qqmatch/errors.hpp"
#include "qqmatch/meta_classifier.hpp"
#include "qqmatch/retrieval_index.hpp"

namespace qqmatch {

namespace {

double ratio(std::size_t num, std::size_t den)
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1(double precision, double recall)
{
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

int parse_label(const std::string& raw, const std::string& where)
{
    const std::string v = detail::trim(raw);
    if (v == "0") {
        return 0;
    }
    if (v == "1") {
        return 1;
    }
    throw FormatError(where + ": label must be 0 or 1, got '" + v + "'");
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& where)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            field_started = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (field_started || !field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            field_started = false;
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) {
        throw FormatError(where + ": unterminated quoted field");
    }
    if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<LabeledPair> read_labeled_pairs(const std::filesystem::path& path)
{
    std::vector<LabeledPair> out;
    const auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (detail::trim(lines[n]).empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(n + 1);
        const auto& line = lines[n];
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw FormatError(where + ": expected 3 tab-separated columns");
        }
        out.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                       parse_label(line.substr(t2 + 1), where)});
    }
    return out;
}

std::vector<LabeledPair> read_qqp_csv(const std::filesystem::path& path)
{
    const std::string where = path.string();
    const auto rows = parse_csv(detail::read_file(path), where);
    if (rows.empty()) {
        throw FormatError(where + ": empty CSV");
    }
    const auto& header = rows.front();
    const auto column = [&](std::string_view name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw FormatError(where + ": missing column '" + std::string(name) + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto c1 = column("question1");
    const auto c2 = column("question2");
    const auto cl = column("is_duplicate");
    std::vector<LabeledPair> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string row_ref = where + ": record " + std::to_string(r);
        if (row.size() != header.size()) {
            throw FormatError(row_ref + ": expected " + std::to_string(header.size()) + " fields");
        }
        out.push_back({row[c1], row[c2], parse_label(row[cl], row_ref)});
    }
    return out;
}

nlohmann::json EvalReport::to_json() const
{
    return {
        {"accuracy", accuracy},
        {"macro_f1", macro_f1},
        {"precision_pos", precision_pos},
        {"recall_pos", recall_pos},
        {"confusion",
         {{"tp", confusion.tp}, {"fp", confusion.fp}, {"tn", confusion.tn}, {"fn", confusion.fn}}},
        {"threshold", threshold},
    };
}

EvalReport report_from_confusion(const Confusion& c, double threshold)
{
    EvalReport r;
    r.confusion = c;
    r.threshold = threshold;
    r.accuracy = ratio(c.tp + c.tn, c.total());
    r.precision_pos = ratio(c.tp, c.tp + c.fp);
    r.recall_pos = ratio(c.tp, c.tp + c.fn);
    const double precision_neg = ratio(c.tn, c.tn + c.fn);
    const double recall_neg = ratio(c.tn, c.tn + c.fp);
    r.macro_f1 = (f1(r.precision_pos, r.recall_pos) + f1(precision_neg, recall_neg)) / 2.0;
    return r;
}

Confusion confusion_from_predictions(std::span<const int> predicted, std::span<const int> actual)
{
    if (predicted.size() != actual.size()) {
        throw ContractError("predictions and labels differ in length");
    }
    Confusion c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == 1) {
            ++(actual[i] == 1 ? c.tp : c.fp);
        } else {
            ++(actual[i] == 1 ? c.fn : c.tn);
        }
    }
    return c;
}

EvalReport evaluate(std::span<const LabeledPair> pairs, const MetaClassifier& model,
                    const Resources& resources, double threshold)
{
    if (pairs.empty()) {
        throw ContractError("evaluate: no pairs given");
    }
    std::vector<int> predicted;
    std::vector<int> actual;
    predicted.reserve(pairs.size());
    actual.reserve(pairs.size());
    for (const auto& pair : pairs) {
        auto scored = score_pair(pair.question1, pair.question2, resources);
        FeatureVector f = std::move(scored.features);
        if (model.mode == FeatureMode::M1 && f.mode() == FeatureMode::M5) {
            f = f.without_sentence();
        }
        if (f.mode() != model.mode) {
            throw DomainError("evaluate: " + std::string(to_string(model.mode)) +
                              " model needs sentence vectors the provider could not supply");
        }
        predicted.push_back(model.classify(f, threshold) == Label::similar ? 1 : 0);
        actual.push_back(pair.label);
    }
    return report_from_confusion(confusion_from_predictions(predicted, actual), threshold);
}

} // namespace qqmatch
