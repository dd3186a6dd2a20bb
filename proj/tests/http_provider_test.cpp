// Copyright 2026 The flowtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <filesystem>
#include <functional>
#include <thread>

#include <gtest/gtest.h>

#include "support.hpp"
// After Eigen: resolv.h defines _res.
#include "flowtrace/http_provider.hpp"

namespace flowtrace {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::acct;

/// Local explorer-style API. `answer` maps (action, address) to a response.
class FakeApi {
 public:
  using Answer = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeApi(Answer answer) : answer_(std::move(answer)) {
    server_.Get("/api", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      last_key_ = req.get_param_value("apikey");
      answer_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeApi() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api"; }
  int hits() const { return hits_; }
  std::string last_key() const { return last_key_; }

 private:
  httplib::Server server_;
  Answer answer_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::string last_key_;
};

void reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json row(const char* from, const char* to, const char* value, const char* ts, const char* hash,
         const char* token = nullptr, const char* is_error = "0") {
  json r{{"from", from}, {"to", to}, {"value", value}, {"timeStamp", ts}, {"hash", hash},
         {"isError", is_error}};
  if (token) r["tokenSymbol"] = token;
  return r;
}

HttpProviderOptions options(const FakeApi& api) {
  HttpProviderOptions o;
  o.base_url = api.url();
  o.api_key = "test-key";
  o.backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

TEST(HttpProvider, MergesActionsAndClassifies) {
  FakeApi api([](const httplib::Request& req, httplib::Response& res) {
    const std::string action = req.get_param_value("action");
    if (action == "txlist")
      reply(res, {{"status", "1"}, {"message", "OK"},
                  {"result", {row("0xA", "0xR", "5", "100", "0xh1"),
                              row("0xR", "0xB", "7", "200", "0xbad", nullptr, "1"),
                              row("0xC", "0xD", "1", "100", "0xunrelated")}}});
    else
      reply(res, {{"status", "1"}, {"message", "OK"},
                  {"result", {row("0xR", "0xDEX", "9", "150", "0xh2", "USDC"),
                              row("0xDEX", "0xR", "3", "150", "0xh2", "DAI")}}});
  });
  HttpProvider p(options(api));
  const auto edges = p.fetch_edges(acct("0xR"));
  ASSERT_EQ(edges.size(), 3u);
  EXPECT_EQ(api.last_key(), "test-key");
  EXPECT_EQ(p.requests(), 2u);
  std::size_t swaps = 0;
  for (const auto& e : edges) {
    EXPECT_TRUE(e.src == acct("0xr") || e.tgt == acct("0xr"));
    if (e.hash == "0xh1") EXPECT_EQ(e.token, "ETH");
    swaps += e.tag_at(acct("0xr")).is_swap() ? 1 : 0;
  }
  EXPECT_EQ(swaps, 2u);
}

TEST(HttpProvider, EmptyHistoryWithStatusZero) {
  FakeApi api([](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"status", "0"}, {"message", "No transactions found"}, {"result", json::array()}});
  });
  HttpProvider p(options(api));
  EXPECT_TRUE(p.fetch_edges(acct("0xquiet")).empty());
}

TEST(HttpProvider, RetriesTransientFailures) {
  std::atomic<int> calls{0};
  FakeApi api([&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) return reply(res, {{"status", "0"}}, 502);
    reply(res, {{"status", "1"}, {"result", {row("0xA", "0xB", "1", "1", "0xh")}}});
  });
  HttpProviderOptions o = options(api);
  o.actions = {"txlist"};
  HttpProvider p(o);
  EXPECT_EQ(p.fetch_edges(acct("0xA")).size(), 1u);
  EXPECT_EQ(p.requests(), 3u);
}

TEST(HttpProvider, GivesUpAfterAttempts) {
  FakeApi api([](const httplib::Request&, httplib::Response& res) { reply(res, json::object(), 500); });
  HttpProviderOptions o = options(api);
  o.actions = {"txlist"};
  HttpProvider p(o);
  try {
    p.fetch_edges(acct("0xA"));
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_NE(std::string(e.what()).find("HTTP 500"), std::string::npos);
  }
  EXPECT_EQ(api.hits(), 3);
}

TEST(HttpProvider, ApiErrorIsReported) {
  FakeApi api([](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"status", "0"}, {"message", "NOTOK"}, {"result", "Invalid API Key"}});
  });
  HttpProviderOptions o = options(api);
  o.actions = {"txlist"};
  o.attempts = 1;
  HttpProvider p(o);
  try {
    p.fetch_edges(acct("0xA"));
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_NE(std::string(e.what()).find("Invalid API Key"), std::string::npos);
  }
}

TEST(HttpProvider, DiskCacheAvoidsRequests) {
  FakeApi api([](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"status", "1"}, {"result", {row("0xA", "0xB", "1", "1", "0xh")}}});
  });
  const fs::path cache = fs::temp_directory_path() / "flowtrace-http-cache-test";
  fs::remove_all(cache);
  HttpProviderOptions o = options(api);
  o.cache_dir = cache;
  {
    HttpProvider p(o);
    EXPECT_EQ(p.fetch_edges(acct("0xA")).size(), 2u);  // same row from both actions
  }
  const int before = api.hits();
  HttpProvider again(o);
  EXPECT_EQ(again.fetch_edges(acct("0xA")).size(), 2u);
  EXPECT_EQ(api.hits(), before);
  EXPECT_EQ(again.requests(), 0u);
  fs::remove_all(cache);
}

TEST(HttpProvider, TransportErrorIsProviderError) {
  HttpProviderOptions o;
  o.base_url = "http://127.0.0.1:9/api";
  o.attempts = 2;
  o.backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(2);
  HttpProvider p(o);
  EXPECT_THROW(p.fetch_edges(acct("0xA")), ProviderError);
  EXPECT_THROW(HttpProvider(HttpProviderOptions{}), std::invalid_argument);
}

TEST(HttpProvider, DrivesExpansion) {
  FakeApi api([](const httplib::Request& req, httplib::Response& res) {
    if (req.get_param_value("action") != "txlist") return reply(res, {{"status", "0"}, {"result", json::array()}});
    const std::string who = req.get_param_value("address");
    json rows = json::array();
    if (who == "0xs" || who == "0xm") rows.push_back(row("0xs", "0xm", "10", "10", "0x1"));
    if (who == "0xm" || who == "0xt") rows.push_back(row("0xm", "0xt", "10", "20", "0x2"));
    reply(res, {{"status", rows.empty() ? "0" : "1"}, {"result", rows}});
  });
  HttpProvider p(options(api));
  TraceResult r = run_expansion(acct("0xs"), p, TraceParams{});
  EXPECT_EQ(r.termination, Termination::kConverged);
  EXPECT_GT(r.rank.get(acct("0xt")), 0);
  EXPECT_EQ(r.subgraph.edge_count(), 2u);
}

}  // namespace
}  // namespace flowtrace
