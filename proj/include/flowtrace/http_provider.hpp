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

// Edge provider for Etherscan-compatible account APIs
// (module=account, action=txlist / tokentx).
//
// Every response body is cached on disk under <cache_dir>/<action>/<account>.json
// and reused on later runs, so a trace can be replayed exactly.
//
// Include this after any Eigen-based header: cpp-httplib pulls in <resolv.h>,
// which defines a _res macro that collides with Eigen parameter names.

#ifndef FLOWTRACE_HTTP_PROVIDER_HPP
#define FLOWTRACE_HTTP_PROVIDER_HPP

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "flowtrace/expansion.hpp"
#include "flowtrace/ingest.hpp"

namespace flowtrace {

inline constexpr const char* kApiKeyEnv = "FLOWTRACE_API_KEY";

struct HttpProviderOptions {
  std::string base_url;  // e.g. https://api.etherscan.io/api
  std::string api_key;   // falls back to $FLOWTRACE_API_KEY
  std::string chain_symbol = "ETH";
  std::filesystem::path cache_dir;  // empty: no disk cache
  std::vector<std::string> actions{"txlist", "tokentx"};
  int attempts = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt
  std::chrono::milliseconds pacing{0};     // minimum spacing between requests
  std::chrono::seconds timeout{30};
};

class HttpProvider final : public EdgeProvider {
 public:
  explicit HttpProvider(HttpProviderOptions opts) : opts_(std::move(opts)) {
    if (opts_.api_key.empty())
      if (const char* env = std::getenv(kApiKeyEnv)) opts_.api_key = env;
    split_url(opts_.base_url);
  }

  ProviderCapabilities capabilities() const override { return {false, true}; }

  std::vector<TransferEdge> fetch_edges(const AccountId& account) override {
    std::vector<RawRecord> records;
    for (const auto& action : opts_.actions) {
      const nlohmann::json body = load(action, account);
      const auto& rows = body.at("result");
      std::size_t i = 0;
      for (const auto& row : rows) {
        ++i;
        if (!row.is_object()) continue;
        if (row.value("isError", "0") == "1") continue;  // reverted calls move nothing
        records.push_back(record_from_json(row, i));
      }
    }
    IngestOptions ingest;
    ingest.chain_symbol = opts_.chain_symbol;
    IngestReport rep = convert_records(records, ingest);
    // Keep only edges that touch the account, then settle the account-side tags.
    std::vector<TransferEdge> edges;
    for (auto& e : rep.edges)
      if (e.src == account || e.tgt == account) edges.push_back(std::move(e));
    TransactionGraph local;
    local.add_edges(edges);
    local.classify_node(account);
    return {local.edges().begin(), local.edges().end()};
  }

  std::size_t requests() const noexcept { return requests_; }

 private:
  void split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("provider URL needs a scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    host_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  }

  std::filesystem::path cache_path(const std::string& action, const AccountId& account) const {
    return opts_.cache_dir / action / (account.str() + ".json");
  }

  nlohmann::json load(const std::string& action, const AccountId& account) {
    if (!opts_.cache_dir.empty()) {
      std::ifstream in(cache_path(action, account));
      if (in) {
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.contains("result") && j["result"].is_array()) return j;
      }
    }
    nlohmann::json j = request(action, account);
    if (!opts_.cache_dir.empty()) {
      std::filesystem::create_directories(cache_path(action, account).parent_path());
      std::ofstream(cache_path(action, account)) << j.dump();
    }
    return j;
  }

  nlohmann::json request(const std::string& action, const AccountId& account) {
    httplib::Client client(host_);
    client.set_connection_timeout(opts_.timeout);
    client.set_read_timeout(opts_.timeout);
    httplib::Params params{{"module", "account"}, {"action", action},
                           {"address", account.str()}, {"startblock", "0"},
                           {"endblock", "99999999"}, {"sort", "asc"}};
    if (!opts_.api_key.empty()) params.emplace("apikey", opts_.api_key);

    std::string last_error;
    auto delay = opts_.backoff;
    for (int attempt = 0; attempt < opts_.attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(delay);
        delay *= 2;
      }
      pace();
      ++requests_;
      auto res = client.Get(path_, params, httplib::Headers{});
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      auto j = nlohmann::json::parse(res->body, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        last_error = "malformed JSON response";
        continue;
      }
      const std::string status = j.value("status", "");
      const auto& result = j["result"];
      if (status == "1" && result.is_array()) return j;
      // Etherscan answers an empty history with status 0.
      if (result.is_array() && result.empty()) return nlohmann::json{{"result", nlohmann::json::array()}};
      last_error = "API error: " + j.value("message", std::string("unknown")) +
                   (result.is_string() ? " (" + result.get<std::string>() + ")" : "");
    }
    throw ProviderError(action + " " + account.str() + ": " + last_error);
  }

  void pace() {
    if (opts_.pacing.count() <= 0) return;
    auto now = std::chrono::steady_clock::now();
    if (now < next_slot_) std::this_thread::sleep_until(next_slot_);
    next_slot_ = std::chrono::steady_clock::now() + opts_.pacing;
  }

  HttpProviderOptions opts_;
  std::string host_;
  std::string path_;
  std::size_t requests_ = 0;
  std::chrono::steady_clock::time_point next_slot_{};
};

}  // namespace flowtrace

#endif  // FLOWTRACE_HTTP_PROVIDER_HPP
