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

// Synthetic laundering cases with known targets.
//
// A case is a tree of transfers leaving the source: `layers` hops, the first
// ones splitting the funds over up to `fan_out` children, the trailing
// `peel_length` ones peeling a small share off to a side account. Senders
// may first swap their token through a DEX router. Timestamps strictly
// increase along every planted path. The last layer holds the targets.
//
// Around the flow sit background accounts: an upstream pool that only sends
// into flow accounts (funding, deposits) and a downstream pool that only
// receives from them, plus high-degree hubs and the DEX router itself.

#ifndef FLOWTRACE_PLANTED_HPP
#define FLOWTRACE_PLANTED_HPP

#include <array>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowtrace/ingest.hpp"
#include "flowtrace/txgraph.hpp"

namespace flowtrace {

struct CaseSpec {
  std::string name = "case";
  int layers = 5;  // hops from source to targets
  int fan_out = 2;
  int max_width = 6;
  int peel_length = 1;  // trailing hops that peel instead of split
  double swap_probability = 0.3;
  double noise_rate = 3.0;  // mean noise edges per flow account
  int hub_count = 2;
  int hub_degree = 1000;
  int background_accounts = 2000;
  std::uint64_t seed = 1;

  void validate() const {
    if (layers < 1) throw std::invalid_argument("case needs at least one layer to place targets");
    if (fan_out < 1 || max_width < 1) throw std::invalid_argument("fan_out and max_width must be >= 1");
    if (peel_length < 0 || peel_length > layers)
      throw std::invalid_argument("peel_length must lie in [0, layers]");
    if (!(swap_probability >= 0 && swap_probability <= 1))
      throw std::invalid_argument("swap_probability must lie in [0,1]");
    if (!(noise_rate >= 0)) throw std::invalid_argument("noise_rate must be non-negative");
    if (hub_count < 0 || hub_degree < 0) throw std::invalid_argument("hub settings must be >= 0");
    if (background_accounts < 4 && (noise_rate > 0 || hub_count > 0 || peel_length > 0))
      throw std::invalid_argument("noise, hubs and peels need at least 4 background accounts");
  }
};

inline void to_json(nlohmann::json& j, const CaseSpec& s) {
  j = {{"name", s.name},
       {"layers", s.layers},
       {"fan_out", s.fan_out},
       {"max_width", s.max_width},
       {"peel_length", s.peel_length},
       {"swap_probability", s.swap_probability},
       {"noise_rate", s.noise_rate},
       {"hub_count", s.hub_count},
       {"hub_degree", s.hub_degree},
       {"background_accounts", s.background_accounts},
       {"seed", s.seed}};
}

/// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, CaseSpec& s) {
  const CaseSpec d;
  s.name = j.value("name", d.name);
  s.layers = j.value("layers", d.layers);
  s.fan_out = j.value("fan_out", d.fan_out);
  s.max_width = j.value("max_width", d.max_width);
  s.peel_length = j.value("peel_length", d.peel_length);
  s.swap_probability = j.value("swap_probability", d.swap_probability);
  s.noise_rate = j.value("noise_rate", d.noise_rate);
  s.hub_count = j.value("hub_count", d.hub_count);
  s.hub_degree = j.value("hub_degree", d.hub_degree);
  s.background_accounts = j.value("background_accounts", d.background_accounts);
  s.seed = j.value("seed", d.seed);
}

struct PlantedCase {
  CaseSpec spec;
  AccountId source;
  std::set<AccountId> targets;
  std::vector<TransferEdge> edges;
  std::set<EdgeId> flow_edges;  // planted hops and their swap legs
  std::map<AccountId, int> layer_of;
  AccountId dex;

  TransactionGraph graph() const { return TransactionGraph(edges); }
};

namespace detail {

// Distribution-free helpers over mt19937_64 so output does not depend on the
// standard library's distribution implementations.
class CaseRng {
 public:
  explicit CaseRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(index(static_cast<std::size_t>(hi - lo + 1)));
  }
  bool chance(double p) { return uniform() < p; }
  std::string hex(std::size_t digits) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    for (std::size_t i = 0; i < digits; ++i) s += kHex[engine_() & 0xf];
    return s;
  }

 private:
  std::mt19937_64 engine_;
};

struct TokenInfo {
  const char* symbol;
  double usd;
};
inline constexpr std::array<TokenInfo, 5> kTokens{{
    {"ETH", 2000.0}, {"USDT", 1.0}, {"USDC", 1.0}, {"DAI", 1.0}, {"WBTC", 30000.0}}};

inline double usd_price(const std::string& token) {
  for (const auto& t : kTokens)
    if (token == t.symbol) return t.usd;
  return 1.0;
}

}  // namespace detail

/// Deterministic in `spec.seed`. Throws std::invalid_argument on an invalid
/// spec and std::runtime_error if the post-check on target reachability fails.
inline PlantedCase generate_planted_case(const CaseSpec& spec) {
  spec.validate();
  detail::CaseRng rng(spec.seed);
  constexpr Timestamp kT0 = 1'600'000'000;
  constexpr Timestamp kDay = 86'400;

  PlantedCase pc;
  pc.spec = spec;
  std::set<std::string> used_ids;
  auto fresh = [&](const char* prefix) {
    while (true) {
      std::string id = std::string("0x") + prefix + rng.hex(40 - std::char_traits<char>::length(prefix));
      if (used_ids.insert(id).second) return AccountId(id);
    }
  };
  auto tx_hash = [&] { return "0x" + rng.hex(64); };
  std::vector<std::size_t> flow_positions;
  auto edge = [&](const AccountId& from, const AccountId& to, double amount, Timestamp ts,
                  const std::string& token, const std::string& hash) {
    TransferEdge e;
    e.src = from;
    e.tgt = to;
    e.amount = amount;
    e.timestamp = ts;
    e.token = token;
    e.hash = hash;
    pc.edges.push_back(std::move(e));
    return pc.edges.size() - 1;
  };

  pc.source = fresh("");
  const bool use_dex = spec.swap_probability > 0;
  if (use_dex) pc.dex = fresh("de");
  std::vector<AccountId> hubs;
  for (int i = 0; i < spec.hub_count; ++i) hubs.push_back(fresh("ab"));
  std::vector<AccountId> upstream, downstream;
  for (int i = 0; i < spec.background_accounts; ++i)
    (i % 2 == 0 ? upstream : downstream).push_back(fresh(""));
  auto pick = [&](const std::vector<AccountId>& pool) -> const AccountId& {
    return pool[rng.index(pool.size())];
  };

  struct Holding {
    AccountId who;
    std::string token;
    double amount;
    Timestamp arrived;
  };

  // Funding of the source.
  double balance = 0;
  const int funders = static_cast<int>(rng.between(1, 3));
  for (int i = 0; i < funders; ++i) {
    double a = rng.uniform(200, 2000);
    balance += a;
    if (!upstream.empty())
      edge(pick(upstream), pc.source, a, kT0 - rng.between(1, 20) * kDay + rng.between(0, 3600),
           "ETH", tx_hash());
  }
  std::vector<Holding> layer{{pc.source, "ETH", balance, kT0 - kDay}};
  std::vector<Holding> all_flow = layer;
  pc.layer_of[pc.source] = 0;

  const int split_hops = spec.layers - spec.peel_length;
  for (int hop = 1; hop <= spec.layers; ++hop) {
    const Timestamp window = kT0 + hop * kDay;
    // Optional swap before forwarding.
    for (auto& h : layer) {
      if (!use_dex || !rng.chance(spec.swap_probability)) continue;
      std::string to_token;
      do {
        to_token = detail::kTokens[rng.index(detail::kTokens.size())].symbol;
      } while (to_token == h.token);
      const double out_amount = h.amount * detail::usd_price(h.token) /
                                detail::usd_price(to_token) * rng.uniform(0.994, 0.998);
      const Timestamp ts = window - kDay / 4 + rng.between(0, 3600);
      const std::string hash = tx_hash();
      flow_positions.push_back(edge(h.who, pc.dex, h.amount, ts, h.token, hash));
      flow_positions.push_back(edge(pc.dex, h.who, out_amount, ts, to_token, hash));
      h.token = to_token;
      h.amount = out_amount;
    }
    std::vector<Holding> next;
    if (hop <= split_hops) {
      const std::size_t width = std::min<std::size_t>(layer.size() * spec.fan_out, spec.max_width);
      std::vector<std::vector<std::size_t>> children(layer.size());
      for (std::size_t j = 0; j < width; ++j) children[j * layer.size() / width].push_back(j);
      next.resize(width);
      for (std::size_t p = 0; p < layer.size(); ++p) {
        const Holding& h = layer[p];
        std::vector<double> w;
        double wsum = 0;
        for (std::size_t k = 0; k < children[p].size(); ++k) {
          w.push_back(rng.uniform(0.5, 1.5));
          wsum += w.back();
        }
        const double forwarded = h.amount * rng.uniform(0.97, 0.99);
        for (std::size_t k = 0; k < children[p].size(); ++k) {
          const std::size_t j = children[p][k];
          const AccountId child = fresh("");
          const Timestamp ts = window + rng.between(0, kDay / 2);
          const double a = forwarded * w[k] / wsum;
          flow_positions.push_back(edge(h.who, child, a, ts, h.token, tx_hash()));
          next[j] = Holding{child, h.token, a, ts};
        }
      }
    } else {
      for (const Holding& h : layer) {
        const AccountId child = fresh("");
        const Timestamp ts = window + rng.between(0, kDay / 2);
        const double keep = rng.uniform(0.85, 0.95);
        flow_positions.push_back(edge(h.who, child, h.amount * keep, ts, h.token, tx_hash()));
        edge(h.who, pick(downstream), h.amount * (1 - keep), ts + rng.between(1, 600), h.token,
             tx_hash());
        next.push_back(Holding{child, h.token, h.amount * keep, ts});
      }
    }
    for (const auto& h : next) pc.layer_of[h.who] = hop;
    layer = std::move(next);
    all_flow.insert(all_flow.end(), layer.begin(), layer.end());
  }
  for (const auto& h : layer) pc.targets.insert(h.who);

  // Targets sweep into exchange hot wallets. With two or more hubs the first
  // is a popular service the source used before the incident instead.
  const Timestamp end = kT0 + (spec.layers + 1) * kDay;
  const std::size_t first_exchange = hubs.size() >= 2 ? 1 : 0;
  if (!hubs.empty()) {
    for (const auto& h : layer) {
      const auto& hot = hubs[first_exchange + rng.index(hubs.size() - first_exchange)];
      edge(h.who, hot, h.amount * 0.999, end + rng.between(0, kDay), h.token, tx_hash());
    }
  }
  if (first_exchange == 1)
    edge(pc.source, hubs[0], rng.uniform(0.05, 1), kT0 - 2 * kDay + rng.between(0, 3600), "ETH",
         tx_hash());

  // Noise around flow accounts.
  if (!upstream.empty()) {
    for (const auto& h : all_flow) {
      const int n = static_cast<int>(rng.uniform() * (2 * spec.noise_rate + 1));
      for (int i = 0; i < n; ++i) {
        const Timestamp before = h.arrived - rng.between(1, 30) * kDay + rng.between(0, 3600);
        const Timestamp after = h.arrived + rng.between(60, 2 * kDay);
        switch (rng.index(4)) {
          case 0:  // earlier funding
            edge(pick(upstream), h.who, rng.uniform(0.1, 5), before, "ETH", tx_hash());
            break;
          case 1:  // earlier spend
            edge(h.who, pick(downstream), rng.uniform(0.05, 2), before, "ETH", tx_hash());
            break;
          case 2:  // small later spend of the held token
            edge(h.who, pick(downstream), h.amount * rng.uniform(0.005, 0.02), after, h.token,
                 tx_hash());
            break;
          default:  // interaction with a hub
            if (!hubs.empty())
              edge(h.who, hubs[rng.index(hubs.size())], rng.uniform(0.01, 0.5), after, "ETH",
                   tx_hash());
            break;
        }
      }
    }
  }

  // Hub traffic. The router's is swaps; other hubs move ETH.
  const Timestamp span_lo = kT0 - 60 * kDay;
  const Timestamp span_hi = end + kDay;
  if (!upstream.empty()) {
    for (const auto& hub : hubs) {
      for (int i = 0; i < spec.hub_degree; ++i) {
        const Timestamp ts = rng.between(span_lo, span_hi);
        if (i % 2 == 0)
          edge(pick(upstream), hub, rng.uniform(0.1, 50), ts, "ETH", tx_hash());
        else
          edge(hub, pick(downstream), rng.uniform(0.1, 50), ts, "ETH", tx_hash());
      }
    }
    if (use_dex) {
      for (int i = 0; i < spec.hub_degree / 2; ++i) {
        const AccountId& user = pick(upstream);
        const auto& a = detail::kTokens[rng.index(detail::kTokens.size())];
        const auto& b = detail::kTokens[(rng.index(detail::kTokens.size() - 1) + 1 +
                                         static_cast<std::size_t>(&a - detail::kTokens.data())) %
                                        detail::kTokens.size()];
        const double amount = rng.uniform(100, 20000) / a.usd;
        const Timestamp ts = rng.between(span_lo, span_hi);
        const std::string hash = tx_hash();
        edge(user, pc.dex, amount, ts, a.symbol, hash);
        edge(pc.dex, user, amount * a.usd / b.usd * 0.997, ts, b.symbol, hash);
      }
    }
    // Unrelated background activity inside each pool.
    for (const auto* pool : {&upstream, &downstream}) {
      for (std::size_t i = 0; i < pool->size(); ++i) {
        const AccountId& from = pick(*pool);
        const AccountId& to = pick(*pool);
        if (from == to) continue;
        edge(from, to, rng.uniform(0.01, 10), rng.between(span_lo, span_hi), "ETH", tx_hash());
      }
    }
  }

  assign_edge_ids(pc.edges);
  for (std::size_t pos : flow_positions) pc.flow_edges.insert(pc.edges[pos].id);

  // Post-check: targets reachable, and beyond two hops when the case is deep.
  TransactionGraph g(pc.edges);
  std::map<AccountId, int> dist{{pc.source, 0}};
  std::queue<AccountId> queue;
  queue.push(pc.source);
  while (!queue.empty()) {
    AccountId u = queue.front();
    queue.pop();
    for (const TransferEdge* e : g.out_edges(u))
      if (dist.emplace(e->tgt, dist[u] + 1).second) queue.push(e->tgt);
  }
  for (const auto& t : pc.targets) {
    auto it = dist.find(t);
    if (it == dist.end()) throw std::runtime_error("planted target unreachable from source");
    if (spec.layers > 2 && it->second <= 2)
      throw std::runtime_error("planted target within two hops of the source");
  }
  return pc;
}

/// `count` default specs with target depth cycling through 4, 5, 6 and
/// seeds first_seed, first_seed + 1, ...
inline std::vector<CaseSpec> planted_suite(int count, std::uint64_t first_seed = 1) {
  std::vector<CaseSpec> specs;
  for (int i = 0; i < count; ++i) {
    CaseSpec s;
    s.name = "case-" + std::to_string(i);
    s.layers = 4 + i % 3;
    s.seed = first_seed + static_cast<std::uint64_t>(i);
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace flowtrace

#endif  // FLOWTRACE_PLANTED_HPP
