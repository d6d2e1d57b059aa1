// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include "qqmatch/service.hpp"

#include <httplib.h>

#include "qqmatch/errors.hpp"

namespace qqmatch {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(render(body), kJson);
}

void reply_error(httplib::Response& res, int status, const std::string& message)
{
    reply(res, status, json{{"error", message}});
}

std::string required_string(const json& body, const char* key)
{
    if (!body.contains(key) || !body[key].is_string()) {
        throw ContractError(std::string("field '") + key + "' must be a string");
    }
    return body[key].get<std::string>();
}

} // namespace

Service::Service(std::shared_ptr<const Engine> engine, std::size_t default_top_k)
    : engine_(std::move(engine)), default_top_k_(default_top_k), server_(std::make_unique<httplib::Server>())
{
    install_routes();
}

Service::~Service() = default;

void Service::install_routes()
{
    const auto guarded = [](auto handler) {
        return [handler](const httplib::Request& req, httplib::Response& res) {
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::parse_error& e) {
                reply_error(res, 400, std::string("malformed JSON: ") + e.what());
                return;
            }
            if (!body.is_object()) {
                reply_error(res, 400, "request body must be a JSON object");
                return;
            }
            try {
                handler(body, res);
            } catch (const ContractError& e) {
                reply_error(res, 400, e.what());
            } catch (const json::exception& e) {
                reply_error(res, 400, e.what());
            } catch (const std::exception& e) {
                reply_error(res, 500, e.what());
            }
        };
    };

    server_->Post("/v1/match", guarded([this](const json& body, httplib::Response& res) {
        const std::string query = required_string(body, "query");
        std::size_t top_k = default_top_k_;
        if (body.contains("top_k")) {
            const auto& v = body["top_k"];
            if (!v.is_number_integer() || v.get<long long>() < 1) {
                throw ContractError("top_k must be a positive integer");
            }
            top_k = v.get<std::size_t>();
        }
        reply(res, 200, to_json(engine_->match(query, top_k)));
    }));

    server_->Post("/v1/score-pair", guarded([this](const json& body, httplib::Response& res) {
        const std::string q1 = required_string(body, "question1");
        const std::string q2 = required_string(body, "question2");
        reply(res, 200, to_json(engine_->score(q1, q2)));
    }));

    server_->Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, health_json(*engine_));
    });
}

bool Service::listen(const std::string& host, int port)
{
    return server_->listen(host, port);
}

int Service::bind_any(const std::string& host)
{
    return server_->bind_to_any_port(host);
}

bool Service::run()
{
    return server_->listen_after_bind();
}

void Service::stop()
{
    server_->stop();
}

void Service::wait_until_ready() const
{
    server_->wait_until_ready();
}

} // namespace qqmatch
