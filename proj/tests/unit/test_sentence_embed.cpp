// Copyright 2026 The qqmatch Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qqmatch/errors.hpp"
#include "qqmatch/sentence_embed.hpp"
#include "support.hpp"

namespace {

using namespace qqmatch;
using nlohmann::json;
using testing_support::TempDir;
using testing_support::write_text;

DenseVector fake_vector(const std::string& text)
{
    DenseVector v(3, 0.0);
    for (std::size_t i = 0; i < text.size(); ++i) {
        v[i % 3] += static_cast<unsigned char>(text[i]) / 100.0;
    }
    return v;
}

/// Stand-in for the embedding sidecar.
class StubSidecar {
public:
    enum class Behaviour { ok, wrong_dim, wrong_count, garbage, slow };

    explicit StubSidecar(Behaviour b = Behaviour::ok) : behaviour_(b)
    {
        server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            if (behaviour_ == Behaviour::slow) {
                std::this_thread::sleep_for(std::chrono::milliseconds(800));
            }
            if (behaviour_ == Behaviour::garbage) {
                res.set_content("<html>", "text/html");
                return;
            }
            const auto body = json::parse(req.body);
            json vectors = json::array();
            for (const auto& t : body.at("texts")) {
                auto v = fake_vector(t.get<std::string>());
                if (behaviour_ == Behaviour::wrong_dim) {
                    v.push_back(0.0);
                }
                vectors.push_back(v);
            }
            if (behaviour_ == Behaviour::wrong_count) {
                vectors.push_back(fake_vector("extra"));
            }
            res.set_content(json{{"vectors", vectors}, {"dim", 3}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubSidecar()
    {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int requests() const { return requests_; }

private:
    Behaviour behaviour_;
    httplib::Server server_;
    int port_ = -1;
    std::thread thread_;
    std::atomic<int> requests_{0};
};

ProviderError::Reason reason_of(const SentenceEmbeddingProvider& p, const std::string& text)
{
    try {
        p.embed(text);
    } catch (const ProviderError& e) {
        return e.reason();
    }
    ADD_FAILURE() << "expected ProviderError";
    return ProviderError::Reason::disabled;
}

TEST(DisabledProvider, AlwaysRefuses)
{
    DisabledProvider p;
    EXPECT_FALSE(p.available());
    EXPECT_EQ(reason_of(p, "anything"), ProviderError::Reason::disabled);
}

TEST(FileCacheProvider, LoadsAndLooksUpExactText)
{
    TempDir dir;
    write_text(dir / "c.jsonl", json{{"text", "what is ira"}, {"vector", {1.0, 2.0, 3.0}}}.dump() + "\n" +
                                    json{{"text", "hello"}, {"vector", {0.0, 0.5, 0.0}}}.dump() + "\n");
    const auto p = FileCacheProvider::load(dir / "c.jsonl");
    EXPECT_TRUE(p.available());
    EXPECT_EQ(p.dim(), 3u);
    EXPECT_EQ(p.size(), 2u);
    EXPECT_EQ(p.embed("hello"), (DenseVector{0.0, 0.5, 0.0}));
    EXPECT_EQ(reason_of(p, "Hello"), ProviderError::Reason::miss);
}

TEST(FileCacheProvider, RejectsInconsistentFiles)
{
    TempDir dir;
    write_text(dir / "dims.jsonl", R"({"text":"a","vector":[1,2]})" "\n" R"({"text":"b","vector":[1]})" "\n");
    EXPECT_THROW(FileCacheProvider::load(dir / "dims.jsonl"), FormatError);
    write_text(dir / "empty.jsonl", "");
    EXPECT_THROW(FileCacheProvider::load(dir / "empty.jsonl"), FormatError);
    write_text(dir / "bad.jsonl", "{nope}\n");
    EXPECT_THROW(FileCacheProvider::load(dir / "bad.jsonl"), FormatError);
    EXPECT_THROW(FileCacheProvider::load(dir / "absent.jsonl"), ResourceError);
}

TEST(RemoteProvider, SpeaksTheEmbedProtocol)
{
    StubSidecar stub;
    RemoteProvider p(stub.endpoint(), 3);
    EXPECT_TRUE(p.available());
    EXPECT_EQ(p.embed("fees"), fake_vector("fees"));
    const auto batch = p.embed_batch({"a", "bb", "a"});
    ASSERT_EQ(batch.size(), 3u);
    EXPECT_EQ(batch[0], batch[2]);
    EXPECT_TRUE(p.embed_batch({}).empty());
}

TEST(RemoteProvider, SubstitutableForFileCache)
{
    StubSidecar stub;
    RemoteProvider remote(stub.endpoint(), 3);
    std::unordered_map<std::string, DenseVector> entries;
    const std::vector<std::string> texts = {"what is power of attorney", "fees for trading", "x"};
    for (const auto& t : texts) {
        entries[t] = fake_vector(t);
    }
    FileCacheProvider cache(entries, 3);
    for (const auto& t : texts) {
        const SentenceEmbeddingProvider& a = remote;
        const SentenceEmbeddingProvider& b = cache;
        EXPECT_EQ(a.embed(t), b.embed(t));
        EXPECT_NEAR(sentence_score(a.embed(t), b.embed(t)), 1.0, 1e-12);
    }
}

TEST(RemoteProvider, MapsFailuresToReasons)
{
    {
        StubSidecar stub(StubSidecar::Behaviour::wrong_dim);
        EXPECT_EQ(reason_of(RemoteProvider(stub.endpoint(), 3), "a"), ProviderError::Reason::protocol);
    }
    {
        StubSidecar stub(StubSidecar::Behaviour::wrong_count);
        EXPECT_EQ(reason_of(RemoteProvider(stub.endpoint(), 3), "a"), ProviderError::Reason::protocol);
    }
    {
        StubSidecar stub(StubSidecar::Behaviour::garbage);
        EXPECT_EQ(reason_of(RemoteProvider(stub.endpoint(), 3), "a"), ProviderError::Reason::protocol);
    }
    {
        StubSidecar stub(StubSidecar::Behaviour::slow);
        const auto start = std::chrono::steady_clock::now();
        EXPECT_EQ(reason_of(RemoteProvider(stub.endpoint(), 3, std::chrono::milliseconds(200)), "a"),
                  ProviderError::Reason::transport);
        EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(700));
    }
    std::string dead;
    {
        StubSidecar stub;
        dead = stub.endpoint();
    }
    EXPECT_EQ(reason_of(RemoteProvider(dead, 3), "a"), ProviderError::Reason::transport);
    EXPECT_THROW(RemoteProvider("http://127.0.0.1:1", 0), ContractError);
}

TEST(SentenceScore, IsCosine)
{
    EXPECT_NEAR(sentence_score(DenseVector{1, 0}, DenseVector{0, 1}), 0.0, 1e-15);
    EXPECT_NEAR(sentence_score(DenseVector{1, 1}, DenseVector{2, 2}), 1.0, 1e-15);
    EXPECT_EQ(sentence_score(DenseVector{0, 0}, DenseVector{2, 2}), 0.0);
}

} // namespace
