// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qqmatch {

/// Shape of one Siamese arm: embedding lookup followed by a single LSTM layer.
struct LstmDims {
    std::uint32_t vocab_size = 0;  // includes the padding row 0
    std::uint32_t embed_dim = 0;
    std::uint32_t hidden_dim = 0;
    std::uint32_t seq_len = 0;

    std::uint64_t embedding_parameters() const noexcept
    {
        return std::uint64_t{vocab_size} * embed_dim;
    }
    /// Kernel + recurrent + bias, i.e. 4*h*(e + h + 1).
    std::uint64_t lstm_parameters() const noexcept
    {
        return 4ULL * hidden_dim * (std::uint64_t{embed_dim} + hidden_dim + 1);
    }
    std::uint64_t payload_floats() const noexcept
    {
        return embedding_parameters() + lstm_parameters();
    }

    bool operator==(const LstmDims&) const = default;
};

/// Reads only the "SLW1" magic and the four dimension words.
LstmDims read_weights_header(const std::filesystem::path& path);

enum class TextVariant { unnormalized, normalized };

enum class SiameseDot { cosine, raw };

/// Final hidden state of one arm for one text.
struct SentenceRep {
    std::vector<double> values;
    TextVariant source_variant = TextVariant::unnormalized;
};

/// Trained parameters of the shared-weight encoder. Gate blocks inside the
/// kernel, recurrent matrix and bias are ordered (input, forget, candidate,
/// output). Immutable after construction.
class SiameseWeights {
public:
    SiameseWeights(LstmDims dims, std::vector<float> embedding, std::vector<float> kernel,
                   std::vector<float> recurrent, std::vector<float> bias,
                   std::vector<std::string> tokens);

    /// Loads the weights container and its companion token file
    /// (token on line n has index n).
    static SiameseWeights load(const std::filesystem::path& weights_path,
                               const std::filesystem::path& token_index_path);

    void save(const std::filesystem::path& weights_path,
              const std::filesystem::path& token_index_path) const;

    const LstmDims& dims() const noexcept { return dims_; }
    std::optional<std::uint32_t> index_of(std::string_view token) const;
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    std::span<const float> embedding() const noexcept { return embedding_; }
    std::span<const float> kernel() const noexcept { return kernel_; }
    std::span<const float> recurrent() const noexcept { return recurrent_; }
    std::span<const float> bias() const noexcept { return bias_; }

private:
    LstmDims dims_;
    std::vector<float> embedding_;   // V x E
    std::vector<float> kernel_;      // E x 4H
    std::vector<float> recurrent_;   // H x 4H
    std::vector<float> bias_;        // 4H
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::uint32_t> token_index_;
};

/// Maps tokens to indices (unknown ones dropped), keeps the last seq_len and
/// left-pads with 0.
std::vector<std::uint32_t> vectorize(std::span<const std::string> tokens,
                                     const SiameseWeights& weights);

/// Runs the LSTM from a zero state over an index sequence of length seq_len
/// and returns the last hidden state.
SentenceRep encode(std::span<const std::uint32_t> sequence, const SiameseWeights& weights,
                   TextVariant variant = TextVariant::unnormalized);

/// Cosine (or raw dot) of two representations of the same variant.
double pair_score(const SentenceRep& a, const SentenceRep& b, SiameseDot mode = SiameseDot::cosine);

} // namespace qqmatch
