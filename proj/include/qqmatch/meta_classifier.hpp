// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qqmatch {

/// M1 fuses four scores, M5 adds the sentence-embedding score.
enum class FeatureMode { M1 = 4, M5 = 5 };

std::string_view to_string(FeatureMode mode) noexcept;
FeatureMode feature_mode_from_string(std::string_view name);
constexpr std::size_t feature_count(FeatureMode mode) noexcept
{
    return static_cast<std::size_t>(mode);
}

inline constexpr std::array<std::string_view, 5> kFeatureNames = {
    "unnormalized_score", "normalized_score", "avg_embedding_score", "fuzzy_score",
    "sentence_score"};

/// Similarity scores in fixed order:
/// [unnormalized, normalized, avg-embedding, fuzzy, (sentence)].
class FeatureVector {
public:
    FeatureVector() = default;
    /// Throws ContractError unless 4 or 5 finite values are given.
    explicit FeatureVector(std::vector<double> values);

    FeatureMode mode() const noexcept { return static_cast<FeatureMode>(values_.size()); }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    /// The first four features, for scoring with an M1 model.
    FeatureVector without_sentence() const;

    bool operator==(const FeatureVector&) const = default;

private:
    std::vector<double> values_;
};

struct KernelParams {
    int degree = 2;
    double gamma = 1.0;
    double coef0 = 0.0;
};

/// (gamma * <x, y> + coef0)^degree. Throws ContractError on a mode mismatch.
double kernel(const FeatureVector& x, const FeatureVector& y, const KernelParams& params);

struct PlattParams {
    double A = 0.0;
    double B = 0.0;
};

/// Maximum-likelihood sigmoid fit P(y=1|d) = 1 / (1 + exp(A*d + B)) using
/// Newton's method with backtracking and the usual smoothed targets.
PlattParams fit_platt(std::span<const double> decisions, std::span<const int> labels);

struct SmoOptions {
    double C = 0.2;
    double tolerance = 1e-3;
    std::size_t max_iterations = 10000;
};

/// Dual solution over the training points that were passed in.
struct SmoSolution {
    std::vector<double> alphas;
    double bias = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Solves the C-SVM dual with the two-variable SMO decomposition using the
/// maximal violating pair (lowest index on ties). labels are 0/1.
SmoSolution solve_svm_dual(std::span<const FeatureVector> features, std::span<const int> labels,
                           const KernelParams& kernel_params, const SmoOptions& options);

enum class Label { not_similar, similar };

/// Polynomial-kernel SVM with Platt calibration.
class MetaClassifier {
public:
    FeatureMode mode = FeatureMode::M1;
    double C = 0.2;
    KernelParams kernel_params;
    double bias = 0.0;
    PlattParams platt;
    double threshold = 0.7;
    std::vector<FeatureVector> support_vectors;
    std::vector<double> dual_coefs;  // y_i * alpha_i, labels mapped to -1/+1

    double decision(const FeatureVector& x) const;
    double predict_proba(const FeatureVector& x) const;
    Label classify(const FeatureVector& x) const { return classify(x, threshold); }
    Label classify(const FeatureVector& x, double custom_threshold) const;

    /// Throws FormatError when any stored invariant is broken.
    void validate() const;

    nlohmann::json to_json() const;
    static MetaClassifier from_json(const nlohmann::json& doc);
    void save(const std::filesystem::path& path) const;
    static MetaClassifier load(const std::filesystem::path& path);
};

double platt_probability(double decision, const PlattParams& platt);

struct TrainOptions {
    double C = 0.2;
    int degree = 2;
    double coef0 = 0.0;
    double gamma = 0.0;  // <= 0 selects 1 / (n_features * variance)
    double tolerance = 1e-3;
    std::size_t max_iterations = 10000;
    double calibration_fraction = 0.2;
    std::uint64_t seed = 20201210;
    double threshold = 0.7;
};

struct TrainResult {
    MetaClassifier model;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> calibration_indices;  // empty when calibrated on training data
    SmoSolution solution;                           // over train_indices
};

/// Trains the meta-classifier. A stratified calibration split is held out
/// for the Platt fit when every class has at least five examples; otherwise
/// the SVM and the sigmoid both use all examples.
/// Throws DomainError for single-class data, ContractError for mixed modes
/// or non-finite features.
TrainResult train_meta_classifier(std::span<const FeatureVector> features,
                                  std::span<const int> labels, const TrainOptions& options = {});

} // namespace qqmatch
