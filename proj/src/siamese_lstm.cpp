// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/siamese_lstm.hpp"

#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "file_util.hpp"
#include "qqmatch/embedding_store.hpp"
#include "qqmatch/errors.hpp"

namespace qqmatch {

namespace {

constexpr std::string_view kMagic = "SLW1";
constexpr std::size_t kHeaderBytes = 4 + 4 * 4;

LstmDims parse_header(detail::ByteReader& in, const std::string& where)
{
    const auto magic = in.bytes(4);
    if (magic != kMagic) {
        if (magic.substr(0, 3) == kMagic.substr(0, 3)) {
            throw FormatError(where + ": unsupported weights version '" + std::string(magic) +
                              "' (expected SLW1)");
        }
        throw FormatError(where + ": bad magic, not an SLW weights file");
    }
    LstmDims d;
    d.vocab_size = in.u32();
    d.embed_dim = in.u32();
    d.hidden_dim = in.u32();
    d.seq_len = in.u32();
    if (d.vocab_size == 0 || d.embed_dim == 0 || d.hidden_dim == 0 || d.seq_len == 0) {
        throw FormatError(where + ": dimension inconsistency, all dimensions must be positive");
    }
    return d;
}

double sigmoid(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

} // namespace

LstmDims read_weights_header(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ResourceError("cannot open " + path.string(), path.string());
    }
    std::string raw(kHeaderBytes, '\0');
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    raw.resize(static_cast<std::size_t>(in.gcount()));
    detail::ByteReader reader(raw, path.string());
    return parse_header(reader, path.string());
}

SiameseWeights::SiameseWeights(LstmDims dims, std::vector<float> embedding,
                               std::vector<float> kernel, std::vector<float> recurrent,
                               std::vector<float> bias, std::vector<std::string> tokens)
    : dims_(dims),
      embedding_(std::move(embedding)),
      kernel_(std::move(kernel)),
      recurrent_(std::move(recurrent)),
      bias_(std::move(bias)),
      tokens_(std::move(tokens))
{
    const std::uint64_t gates = 4ULL * dims_.hidden_dim;
    if (dims_.vocab_size == 0 || dims_.embed_dim == 0 || dims_.hidden_dim == 0 ||
        dims_.seq_len == 0) {
        throw FormatError("dimension inconsistency: all dimensions must be positive");
    }
    if (embedding_.size() != dims_.embedding_parameters() ||
        kernel_.size() != dims_.embed_dim * gates || recurrent_.size() != dims_.hidden_dim * gates ||
        bias_.size() != gates) {
        throw FormatError("dimension inconsistency: payload sizes do not match the header");
    }
    for (std::uint32_t k = 0; k < dims_.embed_dim; ++k) {
        if (embedding_[k] != 0.0f) {
            throw FormatError("embedding row 0 (padding) must be all zeros");
        }
    }
    if (tokens_.size() + 1 > dims_.vocab_size) {
        throw FormatError("dimension inconsistency: token index has " +
                          std::to_string(tokens_.size()) + " entries but vocab_size is " +
                          std::to_string(dims_.vocab_size));
    }
    token_index_.reserve(tokens_.size());
    for (std::size_t n = 0; n < tokens_.size(); ++n) {
        if (!token_index_.emplace(tokens_[n], static_cast<std::uint32_t>(n + 1)).second) {
            throw FormatError("duplicate token '" + tokens_[n] + "' in token index");
        }
    }
}

SiameseWeights SiameseWeights::load(const std::filesystem::path& weights_path,
                                    const std::filesystem::path& token_index_path)
{
    const std::string where = weights_path.string();
    const std::string raw = detail::read_file(weights_path);
    detail::ByteReader in(raw, where);
    const LstmDims d = parse_header(in, where);

    const std::uint64_t expected = d.payload_floats() * sizeof(float);
    if (in.remaining() < expected) {
        throw FormatError(where + ": truncated payload (header implies " + std::to_string(expected) +
                          " bytes, file has " + std::to_string(in.remaining()) + ")");
    }
    if (in.remaining() > expected) {
        throw FormatError(where + ": dimension inconsistency, " +
                          std::to_string(in.remaining() - expected) + " trailing bytes");
    }
    const std::uint64_t gates = 4ULL * d.hidden_dim;
    std::vector<float> embedding(d.embedding_parameters());
    std::vector<float> kernel(d.embed_dim * gates);
    std::vector<float> recurrent(d.hidden_dim * gates);
    std::vector<float> bias(gates);
    in.f32s(embedding);
    in.f32s(kernel);
    in.f32s(recurrent);
    in.f32s(bias);

    std::vector<std::string> tokens;
    for (auto& line : detail::read_lines(token_index_path)) {
        tokens.push_back(std::move(line));
    }
    while (!tokens.empty() && tokens.back().empty()) {
        tokens.pop_back();
    }
    try {
        return SiameseWeights(d, std::move(embedding), std::move(kernel), std::move(recurrent),
                              std::move(bias), std::move(tokens));
    } catch (const FormatError& e) {
        throw FormatError(where + ": " + e.what());
    }
}

void SiameseWeights::save(const std::filesystem::path& weights_path,
                          const std::filesystem::path& token_index_path) const
{
    detail::ByteWriter out;
    out.bytes(kMagic);
    out.u32(dims_.vocab_size);
    out.u32(dims_.embed_dim);
    out.u32(dims_.hidden_dim);
    out.u32(dims_.seq_len);
    out.f32s(embedding_);
    out.f32s(kernel_);
    out.f32s(recurrent_);
    out.f32s(bias_);
    detail::write_file(weights_path, out.data());

    std::string lines;
    for (const auto& t : tokens_) {
        lines += t;
        lines += '\n';
    }
    detail::write_file(token_index_path, lines);
}

std::optional<std::uint32_t> SiameseWeights::index_of(std::string_view token) const
{
    if (auto it = token_index_.find(std::string(token)); it != token_index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::vector<std::uint32_t> vectorize(std::span<const std::string> tokens,
                                     const SiameseWeights& weights)
{
    std::vector<std::uint32_t> known;
    known.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (auto idx = weights.index_of(t)) {
            known.push_back(*idx);
        }
    }
    const std::size_t len = weights.dims().seq_len;
    std::vector<std::uint32_t> seq(len, 0);
    const std::size_t keep = std::min(len, known.size());
    std::copy(known.end() - static_cast<std::ptrdiff_t>(keep), known.end(),
              seq.end() - static_cast<std::ptrdiff_t>(keep));
    return seq;
}

SentenceRep encode(std::span<const std::uint32_t> sequence, const SiameseWeights& weights,
                   TextVariant variant)
{
    const auto& d = weights.dims();
    if (sequence.size() != d.seq_len) {
        throw ContractError("sequence length " + std::to_string(sequence.size()) +
                            " does not match seq_len " + std::to_string(d.seq_len));
    }
    const std::size_t hidden = d.hidden_dim;
    const std::size_t gates = 4 * hidden;
    const auto embedding = weights.embedding();
    const auto kernel = weights.kernel();
    const auto recurrent = weights.recurrent();
    const auto bias = weights.bias();

    std::vector<double> h(hidden, 0.0);
    std::vector<double> c(hidden, 0.0);
    std::vector<double> z(gates);
    for (const std::uint32_t idx : sequence) {
        if (idx >= d.vocab_size) {
            throw ContractError("token index " + std::to_string(idx) + " out of range");
        }
        std::copy(bias.begin(), bias.end(), z.begin());
        if (idx != 0) {
            const float* x = embedding.data() + std::size_t{idx} * d.embed_dim;
            for (std::size_t k = 0; k < d.embed_dim; ++k) {
                const double xk = x[k];
                const float* w = kernel.data() + k * gates;
                for (std::size_t j = 0; j < gates; ++j) {
                    z[j] += xk * w[j];
                }
            }
        }
        for (std::size_t k = 0; k < hidden; ++k) {
            const double hk = h[k];
            const float* r = recurrent.data() + k * gates;
            for (std::size_t j = 0; j < gates; ++j) {
                z[j] += hk * r[j];
            }
        }
        for (std::size_t j = 0; j < hidden; ++j) {
            const double in_gate = sigmoid(z[j]);
            const double forget = sigmoid(z[hidden + j]);
            const double candidate = std::tanh(z[2 * hidden + j]);
            const double out_gate = sigmoid(z[3 * hidden + j]);
            c[j] = forget * c[j] + in_gate * candidate;
            h[j] = out_gate * std::tanh(c[j]);
        }
    }
    return SentenceRep{std::move(h), variant};
}

double pair_score(const SentenceRep& a, const SentenceRep& b, SiameseDot mode)
{
    if (a.source_variant != b.source_variant) {
        throw ContractError("pair_score across different text variants");
    }
    if (a.values.size() != b.values.size()) {
        throw ContractError("pair_score dimension mismatch");
    }
    return mode == SiameseDot::cosine ? cosine(a.values, b.values) : dot(a.values, b.values);
}

} // namespace qqmatch
