// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "qqmatch/engine.hpp"

namespace httplib {
class Server;
}

namespace qqmatch {

/// HTTP front end over a shared, read-only Engine.
///
///   POST /v1/match       {"query", "top_k"?}
///   POST /v1/score-pair  {"question1", "question2"}
///   GET  /healthz
class Service {
public:
    Service(std::shared_ptr<const Engine> engine, std::size_t default_top_k);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves until stop(). Returns false when the bind fails.
    bool listen(const std::string& host, int port);

    /// Binds to a free port and returns it, or -1. Call run() afterwards.
    int bind_any(const std::string& host);
    bool run();

    void stop();
    void wait_until_ready() const;

private:
    void install_routes();

    std::shared_ptr<const Engine> engine_;
    std::size_t default_top_k_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace qqmatch
