// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/meta_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "file_util.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

namespace {

constexpr double kTau = 1e-12;

bool finite_all(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Fisher-Yates driven directly by the engine output so the permutation is
/// the same on every standard library.
void deterministic_shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng)
{
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace

std::string_view to_string(FeatureMode mode) noexcept
{
    return mode == FeatureMode::M5 ? "M5" : "M1";
}

FeatureMode feature_mode_from_string(std::string_view name)
{
    if (name == "M1") {
        return FeatureMode::M1;
    }
    if (name == "M5") {
        return FeatureMode::M5;
    }
    throw ContractError("unknown feature mode '" + std::string(name) + "' (expected M1 or M5)");
}

FeatureVector::FeatureVector(std::vector<double> values) : values_(std::move(values))
{
    if (values_.size() != 4 && values_.size() != 5) {
        throw ContractError("feature vector must have 4 or 5 entries, got " +
                            std::to_string(values_.size()));
    }
    if (!finite_all(values_)) {
        throw ContractError("feature vector has a non-finite entry");
    }
}

FeatureVector FeatureVector::without_sentence() const
{
    return FeatureVector(std::vector<double>(values_.begin(), values_.begin() + 4));
}

double kernel(const FeatureVector& x, const FeatureVector& y, const KernelParams& params)
{
    if (x.size() != y.size()) {
        throw ContractError("kernel: feature mode mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()) + ")");
    }
    double inner = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        inner += x[k] * y[k];
    }
    const double base = params.gamma * inner + params.coef0;
    double out = 1.0;
    for (int d = 0; d < params.degree; ++d) {
        out *= base;
    }
    return out;
}

double platt_probability(double decision, const PlattParams& platt)
{
    const double f = decision * platt.A + platt.B;
    // Written so that exp never overflows.
    return f >= 0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
}

PlattParams fit_platt(std::span<const double> decisions, std::span<const int> labels)
{
    if (decisions.size() != labels.size() || decisions.empty()) {
        throw ContractError("fit_platt: need equally sized, non-empty inputs");
    }
    const std::size_t n = decisions.size();
    double prior1 = 0.0;
    double prior0 = 0.0;
    for (int y : labels) {
        (y > 0 ? prior1 : prior0) += 1.0;
    }
    const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_target = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = labels[i] > 0 ? hi_target : lo_target;
    }

    const auto objective = [&](double A, double B) {
        double f = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = decisions[i] * A + B;
            f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return f;
    };

    constexpr int kMaxIter = 100;
    constexpr double kMinStep = 1e-10;
    constexpr double kSigma = 1e-12;
    constexpr double kEps = 1e-5;

    double A = 0.0;
    double B = std::log((prior0 + 1.0) / (prior1 + 1.0));
    double fval = objective(A, B);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double h11 = kSigma;
        double h22 = kSigma;
        double h21 = 0.0;
        double g1 = 0.0;
        double g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = decisions[i] * A + B;
            double p;
            double q;
            if (z >= 0) {
                p = std::exp(-z) / (1.0 + std::exp(-z));
                q = 1.0 / (1.0 + std::exp(-z));
            } else {
                p = 1.0 / (1.0 + std::exp(z));
                q = std::exp(z) / (1.0 + std::exp(z));
            }
            const double d2 = p * q;
            h11 += decisions[i] * decisions[i] * d2;
            h22 += d2;
            h21 += decisions[i] * d2;
            const double d1 = t[i] - p;
            g1 += decisions[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < kEps && std::abs(g2) < kEps) {
            break;
        }
        const double det = h11 * h22 - h21 * h21;
        const double dA = -(h22 * g1 - h21 * g2) / det;
        const double dB = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * dA + g2 * dB;

        double step = 1.0;
        while (step >= kMinStep) {
            const double newA = A + step * dA;
            const double newB = B + step * dB;
            const double newf = objective(newA, newB);
            if (newf < fval + 0.0001 * step * gd) {
                A = newA;
                B = newB;
                fval = newf;
                break;
            }
            step /= 2.0;
        }
        if (step < kMinStep) {
            break;  // line search failed
        }
    }
    return {A, B};
}

SmoSolution solve_svm_dual(std::span<const FeatureVector> features, std::span<const int> labels,
                           const KernelParams& kernel_params, const SmoOptions& options)
{
    const std::size_t n = features.size();
    if (labels.size() != n || n == 0) {
        throw ContractError("solve_svm_dual: need equally sized, non-empty inputs");
    }
    const double C = options.C;
    std::vector<double> y(n);
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = labels[i] > 0 ? 1.0 : -1.0;
        qd[i] = kernel(features[i], features[i], kernel_params);
    }

    SmoSolution sol;
    sol.alphas.assign(n, 0.0);
    auto& alpha = sol.alphas;
    std::vector<double> grad(n, -1.0);
    std::vector<double> kernel_i(n);
    std::vector<double> kernel_j(n);

    const auto in_up = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
    };
    const auto in_low = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
    };

    while (true) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i == n || j == n || gmax - gmin < options.tolerance) {
            sol.converged = true;
            break;
        }
        if (sol.iterations >= options.max_iterations) {
            break;
        }
        ++sol.iterations;

        for (std::size_t t = 0; t < n; ++t) {
            kernel_i[t] = kernel(features[i], features[t], kernel_params);
            kernel_j[t] = kernel(features[j], features[t], kernel_params);
        }
        const double q_ij = y[i] * y[j] * kernel_i[j];
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = qd[i] + qd[j] + 2.0 * q_ij;
            if (quad <= 0) {
                quad = kTau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = qd[i] + qd[j] - 2.0 * q_ij;
            if (quad <= 0) {
                quad = kTau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += y[t] * (y[i] * kernel_i[t] * dai + y[j] * kernel_j[t] * daj);
        }
    }

    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= C) {
            if (y[t] < 0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (alpha[t] <= 0) {
            if (y[t] > 0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            ++free_count;
            sum_free += yg;
        }
    }
    const double rho = free_count > 0 ? sum_free / static_cast<double>(free_count) : (ub + lb) / 2.0;
    sol.bias = -rho;
    return sol;
}

double MetaClassifier::decision(const FeatureVector& x) const
{
    if (x.mode() != mode) {
        throw ContractError("decision: model is " + std::string(to_string(mode)) +
                            " but features are " + std::string(to_string(x.mode())));
    }
    double sum = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) {
        sum += dual_coefs[i] * kernel(support_vectors[i], x, kernel_params);
    }
    return sum;
}

double MetaClassifier::predict_proba(const FeatureVector& x) const
{
    return platt_probability(decision(x), platt);
}

Label MetaClassifier::classify(const FeatureVector& x, double custom_threshold) const
{
    return predict_proba(x) >= custom_threshold ? Label::similar : Label::not_similar;
}

void MetaClassifier::validate() const
{
    if (support_vectors.empty()) {
        throw FormatError("meta model has no support vectors");
    }
    if (support_vectors.size() != dual_coefs.size()) {
        throw FormatError("meta model: support_vectors and dual_coefs differ in length");
    }
    if (!(C > 0) || !std::isfinite(C)) {
        throw FormatError("meta model: C must be positive");
    }
    if (kernel_params.degree < 1) {
        throw FormatError("meta model: degree must be a positive integer");
    }
    if (!std::isfinite(kernel_params.gamma) || !std::isfinite(kernel_params.coef0) ||
        !std::isfinite(bias) || !std::isfinite(platt.A) || !std::isfinite(platt.B)) {
        throw FormatError("meta model: non-finite parameter");
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw FormatError("meta model: threshold must lie in [0, 1]");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < dual_coefs.size(); ++i) {
        if (support_vectors[i].mode() != mode) {
            throw FormatError("meta model: support vector " + std::to_string(i) +
                              " does not match mode " + std::string(to_string(mode)));
        }
        if (!std::isfinite(dual_coefs[i]) || std::abs(dual_coefs[i]) > C * (1.0 + 1e-12)) {
            throw FormatError("meta model: |dual_coef[" + std::to_string(i) + "]| exceeds C");
        }
        total += dual_coefs[i];
    }
    if (std::abs(total) > 1e-6) {
        throw FormatError("meta model: dual coefficients do not sum to zero");
    }
}

nlohmann::json MetaClassifier::to_json() const
{
    nlohmann::json svs = nlohmann::json::array();
    for (const auto& sv : support_vectors) {
        svs.push_back(std::vector<double>(sv.values().begin(), sv.values().end()));
    }
    std::vector<std::string> order(kFeatureNames.begin(),
                                   kFeatureNames.begin() + static_cast<std::ptrdiff_t>(feature_count(mode)));
    return {
        {"mode", to_string(mode)},
        {"C", C},
        {"degree", kernel_params.degree},
        {"gamma", kernel_params.gamma},
        {"coef0", kernel_params.coef0},
        {"bias", bias},
        {"platt_A", platt.A},
        {"platt_B", platt.B},
        {"threshold", threshold},
        {"support_vectors", std::move(svs)},
        {"dual_coefs", dual_coefs},
        {"feature_order", std::move(order)},
    };
}

MetaClassifier MetaClassifier::from_json(const nlohmann::json& doc)
{
    MetaClassifier m;
    try {
        m.mode = feature_mode_from_string(doc.at("mode").get<std::string>());
        m.C = doc.at("C").get<double>();
        m.kernel_params.degree = doc.at("degree").get<int>();
        m.kernel_params.gamma = doc.at("gamma").get<double>();
        m.kernel_params.coef0 = doc.at("coef0").get<double>();
        m.bias = doc.at("bias").get<double>();
        m.platt.A = doc.at("platt_A").get<double>();
        m.platt.B = doc.at("platt_B").get<double>();
        m.threshold = doc.at("threshold").get<double>();
        for (const auto& sv : doc.at("support_vectors")) {
            m.support_vectors.emplace_back(sv.get<std::vector<double>>());
        }
        m.dual_coefs = doc.at("dual_coefs").get<std::vector<double>>();
        const auto order = doc.at("feature_order").get<std::vector<std::string>>();
        if (order.size() != feature_count(m.mode) ||
            !std::equal(order.begin(), order.end(), kFeatureNames.begin())) {
            throw FormatError("meta model: feature_order does not match mode " +
                              std::string(to_string(m.mode)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("meta model schema mismatch: ") + e.what());
    } catch (const ContractError& e) {
        throw FormatError(std::string("meta model schema mismatch: ") + e.what());
    }
    m.validate();
    return m;
}

void MetaClassifier::save(const std::filesystem::path& path) const
{
    detail::write_file(path, to_json().dump(2) + "\n");
}

MetaClassifier MetaClassifier::load(const std::filesystem::path& path)
{
    try {
        return from_json(detail::read_json(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

TrainResult train_meta_classifier(std::span<const FeatureVector> features,
                                  std::span<const int> labels, const TrainOptions& options)
{
    if (features.size() != labels.size() || features.empty()) {
        throw ContractError("train: need one label per feature vector");
    }
    const FeatureMode mode = features.front().mode();
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].mode() != mode) {
            throw ContractError("train: mixed feature modes");
        }
        if (!finite_all(features[i].values())) {
            throw ContractError("train: non-finite feature values");
        }
        if (labels[i] != 0 && labels[i] != 1) {
            throw ContractError("train: labels must be 0 or 1");
        }
        (labels[i] == 1 ? positives : negatives).push_back(i);
    }
    if (positives.empty() || negatives.empty()) {
        throw DomainError("train: training data contains a single class");
    }

    KernelParams kp{options.degree, options.gamma, options.coef0};
    if (kp.gamma <= 0) {
        double mean = 0.0;
        double count = 0.0;
        for (const auto& f : features) {
            for (double v : f.values()) {
                mean += v;
                count += 1.0;
            }
        }
        mean /= count;
        double var = 0.0;
        for (const auto& f : features) {
            for (double v : f.values()) {
                var += (v - mean) * (v - mean);
            }
        }
        var /= count;
        kp.gamma = var > 0 ? 1.0 / (static_cast<double>(feature_count(mode)) * var) : 1.0;
    }

    TrainResult result;
    constexpr std::size_t kMinPerClassForSplit = 5;
    if (options.calibration_fraction > 0 && positives.size() >= kMinPerClassForSplit &&
        negatives.size() >= kMinPerClassForSplit) {
        std::mt19937_64 rng(options.seed);
        for (auto* cls : {&negatives, &positives}) {
            deterministic_shuffle(*cls, rng);
            const auto held = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(options.calibration_fraction * cls->size())),
                1, cls->size() - 1);
            result.calibration_indices.insert(result.calibration_indices.end(), cls->begin(),
                                              cls->begin() + static_cast<std::ptrdiff_t>(held));
            result.train_indices.insert(result.train_indices.end(),
                                        cls->begin() + static_cast<std::ptrdiff_t>(held), cls->end());
        }
        std::sort(result.calibration_indices.begin(), result.calibration_indices.end());
        std::sort(result.train_indices.begin(), result.train_indices.end());
    } else {
        result.train_indices.resize(features.size());
        for (std::size_t i = 0; i < features.size(); ++i) {
            result.train_indices[i] = i;
        }
    }

    std::vector<FeatureVector> train_x;
    std::vector<int> train_y;
    for (auto i : result.train_indices) {
        train_x.push_back(features[i]);
        train_y.push_back(labels[i]);
    }
    result.solution = solve_svm_dual(train_x, train_y, kp,
                                     SmoOptions{options.C, options.tolerance, options.max_iterations});

    MetaClassifier& m = result.model;
    m.mode = mode;
    m.C = options.C;
    m.kernel_params = kp;
    m.bias = result.solution.bias;
    m.threshold = options.threshold;
    for (std::size_t k = 0; k < train_x.size(); ++k) {
        const double a = result.solution.alphas[k];
        if (a > 0) {
            m.support_vectors.push_back(train_x[k]);
            m.dual_coefs.push_back(train_y[k] == 1 ? a : -a);
        }
    }

    const auto& calib = result.calibration_indices.empty() ? result.train_indices
                                                           : result.calibration_indices;
    std::vector<double> decisions;
    std::vector<int> calib_labels;
    for (auto i : calib) {
        decisions.push_back(m.decision(features[i]));
        calib_labels.push_back(labels[i]);
    }
    m.platt = fit_platt(decisions, calib_labels);
    m.validate();
    return result;
}

} // namespace qqmatch
