// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qqmatch {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file or payload does not follow its documented layout.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation precondition (dimension mismatch, bad length).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A referenced file or remote resource could not be reached.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::string path)
        : Error(what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Well-formed input that the domain rules reject (single-class training
/// data, duplicate ids, mode conflicts).
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace qqmatch
