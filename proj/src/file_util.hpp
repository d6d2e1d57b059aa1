// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qqmatch::detail {

/// Reads a whole file; throws ResourceError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Lines without their terminators ("\r\n" tolerated).
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Parses a JSON document, wrapping parser failures in FormatError.
nlohmann::json read_json(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const std::string& contents);

std::string trim(const std::string& s);

} // namespace qqmatch::detail
