// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qqmatch {

class MetaClassifier;
struct Resources;

struct LabeledPair {
    std::string question1;
    std::string question2;
    int label = 0;
};

/// question1<TAB>question2<TAB>label, no header. Throws FormatError naming
/// the offending line.
std::vector<LabeledPair> read_labeled_pairs(const std::filesystem::path& path);

/// QQP-style CSV with a header containing question1, question2 and
/// is_duplicate (RFC 4180 quoting, embedded newlines allowed).
std::vector<LabeledPair> read_qqp_csv(const std::filesystem::path& path);

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double precision_pos = 0.0;
    double recall_pos = 0.0;
    Confusion confusion;
    double threshold = 0.7;

    nlohmann::json to_json() const;
};

/// Metrics from confusion counts. Precision, recall and F1 of a class with
/// an empty denominator are 0.
EvalReport report_from_confusion(const Confusion& confusion, double threshold);

Confusion confusion_from_predictions(std::span<const int> predicted, std::span<const int> actual);

/// Scores every pair, classifies at the threshold and reports metrics.
/// Throws ContractError on an empty pair list.
EvalReport evaluate(std::span<const LabeledPair> pairs, const MetaClassifier& model,
                    const Resources& resources, double threshold);

} // namespace qqmatch
