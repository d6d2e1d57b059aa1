// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qqmatch/errors.hpp"

namespace qqmatch::detail {

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian; big-endian hosts need byte swapping");

/// Appends little-endian scalars to a byte buffer.
class ByteWriter {
public:
    void bytes(std::string_view raw) { buffer_.append(raw); }

    void u32(std::uint32_t v) { put(v); }

    void f32(float v) { put(v); }

    void f32s(std::span<const float> values)
    {
        buffer_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
    }

    /// u32 length prefix followed by the raw bytes.
    void str(std::string_view s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        buffer_.append(s);
    }

    const std::string& data() const noexcept { return buffer_; }

private:
    template <typename T>
    void put(T v)
    {
        char raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        buffer_.append(raw, sizeof(T));
    }

    std::string buffer_;
};

/// Bounds-checked reader; every short read raises FormatError("truncated ...").
class ByteReader {
public:
    ByteReader(std::string_view data, std::string context)
        : data_(data), context_(std::move(context)) {}

    std::string_view bytes(std::size_t n)
    {
        require(n);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint32_t u32() { return get<std::uint32_t>(); }
    float f32() { return get<float>(); }

    void f32s(std::span<float> out)
    {
        auto raw = bytes(out.size_bytes());
        std::memcpy(out.data(), raw.data(), raw.size());
    }

    std::string str()
    {
        const auto n = u32();
        return std::string(bytes(n));
    }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }

private:
    void require(std::size_t n) const
    {
        if (data_.size() - pos_ < n) {
            throw FormatError(context_ + ": truncated payload (need " + std::to_string(n) +
                              " bytes at offset " + std::to_string(pos_) + ", have " +
                              std::to_string(data_.size() - pos_) + ")");
        }
    }

    template <typename T>
    T get()
    {
        auto raw = bytes(sizeof(T));
        T v;
        std::memcpy(&v, raw.data(), sizeof(T));
        return v;
    }

    std::string_view data_;
    std::size_t pos_ = 0;
    std::string context_;
};

} // namespace qqmatch::detail
