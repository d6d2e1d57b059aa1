// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

// Reference LSTM forward pass, one timestep at a time with every gate
// written out separately. Shares no code with the engine.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

struct LstmParams {
    std::size_t vocab = 0;
    std::size_t embed = 0;
    std::size_t hidden = 0;
    std::vector<double> embedding;  // vocab x embed
    std::vector<double> W;          // embed x 4*hidden, gate blocks i, f, g, o
    std::vector<double> R;          // hidden x 4*hidden
    std::vector<double> b;          // 4*hidden
};

inline double logistic(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

inline std::vector<double> lstm_last_hidden(const LstmParams& p, const std::vector<std::uint32_t>& seq)
{
    const std::size_t H = p.hidden;
    std::vector<double> h(H, 0.0);
    std::vector<double> c(H, 0.0);
    const auto pre = [&](std::size_t gate, std::size_t unit, const double* x, const std::vector<double>& hp) {
        const std::size_t col = gate * H + unit;
        double z = p.b[col];
        for (std::size_t e = 0; e < p.embed; ++e) {
            z += x[e] * p.W[e * 4 * H + col];
        }
        for (std::size_t k = 0; k < H; ++k) {
            z += hp[k] * p.R[k * 4 * H + col];
        }
        return z;
    };
    for (const auto token : seq) {
        const double* x = &p.embedding[token * p.embed];
        std::vector<double> h_next(H);
        std::vector<double> c_next(H);
        for (std::size_t u = 0; u < H; ++u) {
            const double in_gate = logistic(pre(0, u, x, h));
            const double forget_gate = logistic(pre(1, u, x, h));
            const double candidate = std::tanh(pre(2, u, x, h));
            const double out_gate = logistic(pre(3, u, x, h));
            c_next[u] = forget_gate * c[u] + in_gate * candidate;
            h_next[u] = out_gate * std::tanh(c_next[u]);
        }
        h = h_next;
        c = c_next;
    }
    return h;
}

} // namespace oracle
