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

// Shared fixtures and independent oracles for the test suites.
//
// The oracles deliberately avoid the library's data structures: they work on
// flat edge vectors with linear scans so that an indexing or bookkeeping bug
// in the library cannot hide behind the same bug in the check.

#ifndef FLOWTRACE_TESTS_SUPPORT_HPP
#define FLOWTRACE_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "flowtrace/flowtrace.hpp"

namespace flowtrace::testing {

inline TransferEdge make_edge(std::string_view src, std::string_view tgt, double amount,
                              Timestamp ts, std::string token, std::string hash) {
  TransferEdge e;
  e.src = AccountId(src);
  e.tgt = AccountId(tgt);
  e.amount = amount;
  e.timestamp = ts;
  e.token = std::move(token);
  e.hash = std::move(hash);
  return e;
}

inline std::vector<TransferEdge> with_ids(std::vector<TransferEdge> edges) {
  assign_edge_ids(edges);
  return edges;
}

inline AccountId acct(std::string_view s) { return AccountId(s); }

/// source sends USDC to relay (h1); relay swaps the USDC for ETH at a DEX
/// (h2, both legs); relay then spends ETH to alice (h3) and bob (h4).
inline std::vector<TransferEdge> swap_redirect_fixture() {
  return with_ids({
      make_edge("source", "relay", 100, 1000, "USDC", "h1"),
      make_edge("relay", "dex", 100, 2000, "USDC", "h2"),
      make_edge("dex", "relay", 0.05, 2000, "ETH", "h2"),
      make_edge("relay", "alice", 0.02, 3000, "ETH", "h3"),
      make_edge("relay", "bob", 0.03, 4000, "ETH", "h4"),
  });
}

/// s -> v1 -> ... -> v<hops>, unit amounts, one token, increasing timestamps.
inline std::vector<TransferEdge> unit_path(int hops) {
  std::vector<TransferEdge> edges;
  for (int i = 0; i < hops; ++i)
    edges.push_back(make_edge(i == 0 ? "s" : "v" + std::to_string(i), "v" + std::to_string(i + 1),
                              1.0, 10 * (i + 1), "T", "p" + std::to_string(i)));
  return with_ids(std::move(edges));
}

inline std::string node_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%03d", i);
  return buf;
}

struct RandomGraphSpec {
  int nodes = 100;
  int edges = 500;
  int tokens = 3;
  double swap_fraction = 0.0;  // share of edges emitted as two-leg swaps
  Timestamp max_ts = 200;
  bool self_loops = true;
};

/// Random temporal multigraph. Swaps are emitted as a pair u->v (token a),
/// v->u (token b != a) under one hash and timestamp. Node n000 is the usual
/// trace source and gets a few early outgoing edges so traces go somewhere.
inline std::vector<TransferEdge> random_edges(std::uint64_t seed, const RandomGraphSpec& spec) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto token = [&](int i) { return std::string("T") + std::to_string(i); };
  std::vector<TransferEdge> out;
  int serial = 0;
  auto hash = [&] { return "x" + std::to_string(serial++); };
  for (int k = 0; k < 3 && spec.nodes > 1; ++k)
    out.push_back(make_edge(node_name(0), node_name(uniform(1, spec.nodes - 1)),
                            1 + 99 * unit(), uniform(0, 10), token(uniform(0, spec.tokens - 1)),
                            hash()));
  while (static_cast<int>(out.size()) < spec.edges) {
    int u = uniform(0, spec.nodes - 1);
    int v = uniform(0, spec.nodes - 1);
    if (u == v && !spec.self_loops) continue;
    const Timestamp ts = uniform(0, static_cast<int>(spec.max_ts));
    const int a = uniform(0, spec.tokens - 1);
    if (spec.tokens > 1 && unit() < spec.swap_fraction && u != v) {
      int b = uniform(0, spec.tokens - 2);
      if (b >= a) ++b;
      const std::string h = hash();
      out.push_back(make_edge(node_name(u), node_name(v), 1 + 99 * unit(), ts, token(a), h));
      out.push_back(make_edge(node_name(v), node_name(u), 1 + 99 * unit(), ts, token(b), h));
    } else {
      out.push_back(make_edge(node_name(u), node_name(v), 1 + 99 * unit(), ts, token(a), hash()));
    }
  }
  return with_ids(std::move(out));
}

// ---------------------------------------------------------------------------
// Brute-force push simulator.

/// Re-derives the temporal, token-aware push from its definition with linear
/// scans over a flat edge list.
class OraclePush {
 public:
  using Key = std::tuple<std::string, Timestamp, std::string>;

  OraclePush(std::vector<TransferEdge> edges, double alpha, double beta)
      : edges_(std::move(edges)), alpha_(alpha), beta_(beta) {}

  void seed(const std::string& source) { r_[{source, kNegInfinity, "*"}] = 1.0; }
  void set_residual(const Key& k, double v) { r_[k] = v; }

  void push(const std::string& node) {
    double total = 0;
    std::vector<std::pair<Key, double>> snapshot;
    for (auto it = r_.begin(); it != r_.end();) {
      if (std::get<0>(it->first) == node) {
        total += it->second;
        snapshot.emplace_back(it->first, it->second);
        it = r_.erase(it);
      } else {
        ++it;
      }
    }
    if (total <= 0) return;
    p_[node] += alpha_ * total;
    for (const auto& [key, res] : snapshot) {
      const auto& [_, t, tok] = key;
      for (bool out : {true, false}) {
        const double share = (1 - alpha_) * (out ? beta_ : 1 - beta_) * res;
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
          const auto& e = edges_[i];
          const bool tok_ok = tok == "*" || e.token == tok;
          if (out && e.src.str() == node && e.timestamp > t && tok_ok) cand.push_back(i);
          if (!out && e.tgt.str() == node && e.timestamp < t && tok_ok) cand.push_back(i);
        }
        if (cand.empty()) {
          if (share > 0) r_[key] += share;
          continue;
        }
        if (share <= 0) continue;
        double sum = 0;
        for (auto i : cand) sum += edges_[i].amount;
        for (auto i : cand) {
          const double w = sum > 0 ? edges_[i].amount / sum : 1.0 / static_cast<double>(cand.size());
          std::vector<std::size_t> rho;
          std::set<std::string> visited;
          redirect(i, node, out, 0, visited, rho);
          if (rho.empty()) {
            dropped_ += share * w;
            continue;
          }
          for (auto j : rho) {
            const auto& f = edges_[j];
            r_[{out ? f.tgt.str() : f.src.str(), f.timestamp, f.token}] +=
                share * w / static_cast<double>(rho.size());
          }
        }
      }
    }
  }

  /// Tokens on the opposite legs of `e`'s hash at `node`, other than e's own.
  std::set<std::string> counter_tokens(const TransferEdge& e, const std::string& node,
                                       bool out) const {
    std::set<std::string> toks;
    for (const auto& f : edges_) {
      if (f.hash != e.hash) continue;
      const bool opposite = out ? f.tgt.str() == node : f.src.str() == node;
      if (opposite && f.token != e.token) toks.insert(f.token);
    }
    return toks;
  }

  double rank(const std::string& n) const {
    auto it = p_.find(n);
    return it == p_.end() ? 0 : it->second;
  }
  double residual(const std::string& n) const {
    double s = 0;
    for (const auto& [k, v] : r_)
      if (std::get<0>(k) == n) s += v;
    return s;
  }
  double residual(const Key& k) const {
    auto it = r_.find(k);
    return it == r_.end() ? 0 : it->second;
  }
  double dropped() const { return dropped_; }
  const std::map<Key, double>& ledger() const { return r_; }
  const std::map<std::string, double>& ranks() const { return p_; }

 private:
  void redirect(std::size_t i, const std::string& node, bool out, int depth,
                std::set<std::string>& visited, std::vector<std::size_t>& acc) const {
    const auto& e = edges_[i];
    const auto counters = counter_tokens(e, node, out);
    if (counters.empty() || depth >= kMaxRedirectDepth || visited.contains(e.hash)) {
      if (std::find(acc.begin(), acc.end(), i) == acc.end()) acc.push_back(i);
      return;
    }
    visited.insert(e.hash);
    std::vector<std::size_t> next;
    for (std::size_t j = 0; j < edges_.size(); ++j) {
      const auto& f = edges_[j];
      if (f.hash == e.hash || !counters.contains(f.token)) continue;
      if (out && f.src.str() == node && f.timestamp >= e.timestamp) next.push_back(j);
      if (!out && f.tgt.str() == node && f.timestamp <= e.timestamp) next.push_back(j);
    }
    std::sort(next.begin(), next.end(),
              [&](std::size_t a, std::size_t b) { return edge_order(edges_[a], edges_[b]); });
    for (auto j : next) redirect(j, node, out, depth + 1, visited, acc);
  }

  std::vector<TransferEdge> edges_;
  double alpha_;
  double beta_;
  std::map<Key, double> r_;
  std::map<std::string, double> p_;
  double dropped_ = 0;
};

// ---------------------------------------------------------------------------
// PageRank by power iteration on an explicit edge list.

/// p = alpha e_s + (1 - alpha) p M, M row-normalized by out-multiplicity,
/// dangling rows as self-loops. Iterates until the update is below 1e-15.
inline std::map<std::string, double> power_ppr(const std::vector<TransferEdge>& edges,
                                               const std::string& source, double alpha) {
  std::set<std::string> names{source};
  for (const auto& e : edges) {
    names.insert(e.src.str());
    names.insert(e.tgt.str());
  }
  std::map<std::string, std::vector<std::string>> outs;
  for (const auto& e : edges) outs[e.src.str()].push_back(e.tgt.str());
  std::map<std::string, double> p;
  for (const auto& n : names) p[n] = n == source ? 1.0 : 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    std::map<std::string, double> next;
    for (const auto& n : names) next[n] = n == source ? alpha : 0.0;
    for (const auto& [u, pu] : p) {
      auto it = outs.find(u);
      if (it == outs.end()) {
        next[u] += (1 - alpha) * pu;
        continue;
      }
      for (const auto& v : it->second)
        next[v] += (1 - alpha) * pu / static_cast<double>(it->second.size());
    }
    double delta = 0;
    for (const auto& n : names) delta += std::abs(next[n] - p[n]);
    p = std::move(next);
    if (delta < 1e-15) break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Conductance from its definition.

inline double naive_conductance(const std::set<AccountId>& members,
                                const std::vector<TransferEdge>& edges, const RankVector& rank) {
  std::set<AccountId> boundary;
  for (const auto& e : edges)
    if (members.contains(e.src) && !members.contains(e.tgt)) boundary.insert(e.tgt);
  double in = 0, out = 0;
  for (const auto& m : members) in += rank.get(m);
  for (const auto& b : boundary) out += rank.get(b);
  return out / in;
}

// ---------------------------------------------------------------------------
// GraphML structural validation.

/// Checks the constraints the GraphML 1.0 schema places on the subset of the
/// format the exporter uses, plus the key/id reference rules the schema
/// expresses as xs:key/xs:keyref. Returns a list of violations.
inline std::vector<std::string> graphml_violations(const std::string& xml) {
  namespace pt = boost::property_tree;
  std::vector<std::string> errs;
  pt::ptree doc;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, doc);
  } catch (const std::exception& e) {
    return {std::string("not well-formed XML: ") + e.what()};
  }
  if (doc.size() != 1 || doc.begin()->first != "graphml") return {"root element must be graphml"};
  const pt::ptree& root = doc.begin()->second;
  if (root.get<std::string>("<xmlattr>.xmlns", "") != "http://graphml.graphdrawing.org/xmlns")
    errs.push_back("graphml element lacks the GraphML namespace");

  static const std::set<std::string> kDomains{"graph", "node", "edge", "hyperedge", "port",
                                              "endpoint", "all", "graphml"};
  static const std::set<std::string> kTypes{"boolean", "int", "long", "float", "double", "string"};
  std::map<std::string, std::pair<std::string, std::string>> keys;  // id -> (for, type)
  bool seen_graph = false;
  int graphs = 0;

  auto check_value = [&](const std::string& type, const std::string& v, const std::string& where) {
    auto bad = [&] { errs.push_back(where + ": '" + v + "' is not a valid " + type); };
    if (type == "boolean") {
      if (v != "true" && v != "false" && v != "1" && v != "0") bad();
    } else if (type == "int" || type == "long") {
      std::size_t pos = 0;
      try {
        (void)std::stoll(v, &pos);
        if (pos != v.size()) bad();
      } catch (...) {
        bad();
      }
    } else if (type == "float" || type == "double") {
      std::size_t pos = 0;
      try {
        (void)std::stod(v, &pos);
        if (pos != v.size()) bad();
      } catch (...) {
        bad();
      }
    }
  };
  auto check_data = [&](const pt::ptree& elem, const std::string& domain, const std::string& where) {
    for (const auto& [name, child] : elem) {
      if (name != "data") continue;
      const std::string key = child.get<std::string>("<xmlattr>.key", "");
      auto it = keys.find(key);
      if (it == keys.end()) {
        errs.push_back(where + ": data references undeclared key '" + key + "'");
        continue;
      }
      if (it->second.first != domain && it->second.first != "all")
        errs.push_back(where + ": key '" + key + "' is declared for " + it->second.first);
      check_value(it->second.second, child.get_value<std::string>(), where + " key " + key);
    }
  };

  for (const auto& [name, child] : root) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (name == "desc") continue;
    if (name == "key") {
      if (seen_graph) errs.push_back("key element after graph element");
      const auto id = child.get<std::string>("<xmlattr>.id", "");
      const auto domain = child.get<std::string>("<xmlattr>.for", "all");
      const auto type = child.get<std::string>(pt::ptree::path_type("<xmlattr>/attr.type", '/'), "string");
      if (id.empty()) errs.push_back("key without id");
      if (!keys.emplace(id, std::make_pair(domain, type)).second)
        errs.push_back("duplicate key id '" + id + "'");
      if (!kDomains.contains(domain)) errs.push_back("key '" + id + "' has invalid for=" + domain);
      if (!kTypes.contains(type)) errs.push_back("key '" + id + "' has invalid attr.type=" + type);
      continue;
    }
    if (name == "graph") {
      seen_graph = true;
      ++graphs;
      const auto ed = child.get<std::string>("<xmlattr>.edgedefault", "");
      if (ed != "directed" && ed != "undirected")
        errs.push_back("graph edgedefault must be directed or undirected");
      check_data(child, "graph", "graph");
      std::set<std::string> node_ids, edge_ids;
      bool seen_item = false;
      for (const auto& [gname, g] : child) {
        if (gname == "node") {
          seen_item = true;
          const auto id = g.get<std::string>("<xmlattr>.id", "");
          if (id.empty() || !node_ids.insert(id).second)
            errs.push_back("missing or duplicate node id '" + id + "'");
          check_data(g, "node", "node " + id);
        } else if (gname == "data" && seen_item) {
          errs.push_back("graph data after node/edge elements");
        }
      }
      for (const auto& [gname, g] : child) {
        if (gname != "edge") continue;
        const auto id = g.get<std::string>("<xmlattr>.id", "");
        if (!id.empty() && !edge_ids.insert(id).second)
          errs.push_back("duplicate edge id '" + id + "'");
        for (const char* end : {"<xmlattr>.source", "<xmlattr>.target"}) {
          const auto ref = g.get<std::string>(end, "");
          if (!node_ids.contains(ref))
            errs.push_back("edge " + id + " references unknown node '" + ref + "'");
        }
        check_data(g, "edge", "edge " + id);
      }
      continue;
    }
    errs.push_back("unexpected element '" + name + "' under graphml");
  }
  if (graphs == 0) errs.push_back("no graph element");
  return errs;
}

}  // namespace flowtrace::testing

#endif  // FLOWTRACE_TESTS_SUPPORT_HPP
