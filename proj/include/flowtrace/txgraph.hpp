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

// Directed, weighted, temporal, multi-token transaction multigraph.
//
// Every node keeps its outgoing and incoming edges sorted by timestamp (ties
// broken by hash, token, target, source, id), both globally and per token,
// so the time-bounded neighbourhood queries used by the push procedures are
// a binary search plus a scan. Edges are additionally grouped per node by
// transaction hash; the Xfer/Swap classification is computed from those
// groups and stored on the edge once per endpoint.

#ifndef FLOWTRACE_TXGRAPH_HPP
#define FLOWTRACE_TXGRAPH_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "flowtrace/types.hpp"

namespace flowtrace {

enum class Pattern : std::uint8_t { kXfer, kSwap };

inline std::string_view to_string(Pattern p) { return p == Pattern::kSwap ? "swap" : "xfer"; }

/// Classification of an edge as seen from one endpoint's hash group.
/// counter_tokens is sorted, non-empty exactly when kind == kSwap.
struct PatternTag {
  Pattern kind = Pattern::kXfer;
  std::vector<std::string> counter_tokens;

  bool is_swap() const noexcept { return kind == Pattern::kSwap; }
  friend bool operator==(const PatternTag&, const PatternTag&) = default;
};

/// One token movement src -> tgt.
struct TransferEdge {
  EdgeId id = 0;
  AccountId src;
  AccountId tgt;
  double amount = 0.0;
  Timestamp timestamp = 0;
  std::string token;
  std::string hash;
  PatternTag at_src;  // role: outgoing leg of src's group for `hash`
  PatternTag at_tgt;  // role: incoming leg of tgt's group for `hash`

  /// Tag from the point of view of `node`, which must be an endpoint.
  const PatternTag& tag_at(const AccountId& node) const { return node == src ? at_src : at_tgt; }

  /// Swap if the edge is a swap leg at either endpoint.
  Pattern pattern() const noexcept {
    return at_src.is_swap() || at_tgt.is_swap() ? Pattern::kSwap : Pattern::kXfer;
  }

  friend bool operator==(const TransferEdge&, const TransferEdge&) = default;
};

enum class Direction { kOut, kIn };

/// Timestamp comparison against a query bound.
enum class TimeBound { kAfter, kBefore, kAtOrAfter, kAtOrBefore };

/// Total order used for every adjacency list.
inline bool edge_order(const TransferEdge& a, const TransferEdge& b) {
  return std::tie(a.timestamp, a.hash, a.token, a.tgt, a.src, a.id) <
         std::tie(b.timestamp, b.hash, b.token, b.tgt, b.src, b.id);
}

class TransactionGraph {
 public:
  using EdgeList = std::vector<const TransferEdge*>;

  TransactionGraph() = default;
  explicit TransactionGraph(std::span<const TransferEdge> edges) {
    add_edges(edges);
    classify_patterns();
  }

  // Copies must rebuild the pointer-based indexes.
  TransactionGraph(const TransactionGraph& other) { *this = other; }
  TransactionGraph& operator=(const TransactionGraph& other) {
    if (this == &other) return *this;
    edges_.clear();
    by_id_.clear();
    nodes_.clear();
    for (const auto& [id, _] : other.nodes_) add_node(id);
    std::vector<TransferEdge> copy(other.edges_.begin(), other.edges_.end());
    add_edges(copy);
    return *this;
  }
  TransactionGraph(TransactionGraph&&) noexcept = default;
  TransactionGraph& operator=(TransactionGraph&&) noexcept = default;

  void add_node(const AccountId& node) { nodes_.try_emplace(node); }

  /// Inserts an edge unless one with the same id is already present.
  /// Pattern tags are kept as given; call classify_node/classify_patterns
  /// after a batch of merges.
  bool add_edge(TransferEdge edge) {
    if (by_id_.contains(edge.id)) return false;
    const TransferEdge* e = &edges_.emplace_back(std::move(edge));
    by_id_.emplace(e->id, e);
    link(*e, /*keep_sorted=*/true);
    return true;
  }

  /// Bulk insert; sorts each touched adjacency list once. Returns the number
  /// of edges actually inserted.
  std::size_t add_edges(std::span<const TransferEdge> batch) {
    std::set<AccountId> touched;
    std::size_t inserted = 0;
    for (const auto& edge : batch) {
      if (by_id_.contains(edge.id)) continue;
      const TransferEdge* e = &edges_.emplace_back(edge);
      by_id_.emplace(e->id, e);
      link(*e, /*keep_sorted=*/false);
      touched.insert(e->src);
      touched.insert(e->tgt);
      ++inserted;
    }
    for (const auto& n : touched) sort_node(nodes_.at(n));
    return inserted;
  }

  /// Recomputes Xfer/Swap tags for every (node, hash) group. Idempotent.
  void classify_patterns() {
    for (auto& [id, adj] : nodes_) classify_groups(id, adj);
  }

  /// Recomputes the tags owned by `node` (its outgoing legs' at_src and its
  /// incoming legs' at_tgt).
  void classify_node(const AccountId& node) {
    auto it = nodes_.find(node);
    if (it != nodes_.end()) classify_groups(it->first, it->second);
  }

  bool contains(const AccountId& node) const { return nodes_.contains(node); }
  bool contains_edge(EdgeId id) const { return by_id_.contains(id); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Nodes in lexicographic order.
  std::vector<AccountId> nodes() const {
    std::vector<AccountId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) out.push_back(id);
    return out;
  }

  /// Edges in insertion order.
  const std::deque<TransferEdge>& edges() const noexcept { return edges_; }

  const EdgeList& out_edges(const AccountId& node) const { return adj_or_empty(node).out; }
  const EdgeList& in_edges(const AccountId& node) const { return adj_or_empty(node).in; }

  std::size_t degree(const AccountId& node) const {
    const auto& a = adj_or_empty(node);
    return a.out.size() + a.in.size();
  }

  /// Edges of `node` under transaction `hash`, in adjacency order.
  EdgeList hash_group(const AccountId& node, const std::string& hash) const {
    const auto& a = adj_or_empty(node);
    auto it = a.by_hash.find(hash);
    return it == a.by_hash.end() ? EdgeList{} : it->second;
  }

  /// Distinct hashes that have at least one edge at `node`.
  std::vector<std::string> hashes_of(const AccountId& node) const {
    std::vector<std::string> out;
    for (const auto& [h, _] : adj_or_empty(node).by_hash) out.push_back(h);
    return out;
  }

  /// Time-bounded neighbourhood query. `token` may be kAnyToken. Unknown
  /// nodes yield an empty list. Result is in adjacency order.
  EdgeList edges_of(const AccountId& node, Direction dir, std::string_view token,
                    Timestamp bound, TimeBound cmp) const {
    const Adjacency& a = adj_or_empty(node);
    const EdgeList* list = nullptr;
    if (token == kAnyToken) {
      list = dir == Direction::kOut ? &a.out : &a.in;
    } else {
      auto it = a.by_token.find(std::string(token));
      if (it == a.by_token.end()) return {};
      list = dir == Direction::kOut ? &it->second.out : &it->second.in;
    }
    auto ts_less = [](const TransferEdge* e, Timestamp t) { return e->timestamp < t; };
    auto less_ts = [](Timestamp t, const TransferEdge* e) { return t < e->timestamp; };
    auto first = list->begin();
    auto last = list->end();
    switch (cmp) {
      case TimeBound::kAfter:
        first = std::upper_bound(list->begin(), list->end(), bound, less_ts);
        break;
      case TimeBound::kAtOrAfter:
        first = std::lower_bound(list->begin(), list->end(), bound, ts_less);
        break;
      case TimeBound::kBefore:
        last = std::lower_bound(list->begin(), list->end(), bound, ts_less);
        break;
      case TimeBound::kAtOrBefore:
        last = std::upper_bound(list->begin(), list->end(), bound, less_ts);
        break;
    }
    return EdgeList(first, last);
  }

  /// Subgraph on `keep` with every edge whose endpoints are both kept.
  TransactionGraph induced(const std::set<AccountId>& keep) const {
    TransactionGraph g;
    for (const auto& n : keep)
      if (contains(n)) g.add_node(n);
    std::vector<TransferEdge> kept;
    for (const auto& e : edges_)
      if (keep.contains(e.src) && keep.contains(e.tgt)) kept.push_back(e);
    g.add_edges(kept);
    return g;
  }

 private:
  struct TokenLists {
    EdgeList out;
    EdgeList in;
  };
  struct Adjacency {
    EdgeList out;
    EdgeList in;
    std::map<std::string, TokenLists, std::less<>> by_token;
    std::map<std::string, EdgeList, std::less<>> by_hash;
  };

  static void insert_sorted(EdgeList& list, const TransferEdge* e) {
    auto pos = std::upper_bound(list.begin(), list.end(), e,
                                [](const TransferEdge* a, const TransferEdge* b) {
                                  return edge_order(*a, *b);
                                });
    list.insert(pos, e);
  }

  void link(const TransferEdge& e, bool keep_sorted) {
    auto put = [&](EdgeList& list) {
      if (keep_sorted)
        insert_sorted(list, &e);
      else
        list.push_back(&e);
    };
    Adjacency& s = nodes_[e.src];
    put(s.out);
    put(s.by_token[e.token].out);
    put(s.by_hash[e.hash]);
    Adjacency& t = nodes_[e.tgt];
    put(t.in);
    put(t.by_token[e.token].in);
    if (&s != &t) put(t.by_hash[e.hash]);
  }

  static void sort_node(Adjacency& a) {
    auto cmp = [](const TransferEdge* x, const TransferEdge* y) { return edge_order(*x, *y); };
    std::sort(a.out.begin(), a.out.end(), cmp);
    std::sort(a.in.begin(), a.in.end(), cmp);
    for (auto& [_, l] : a.by_token) {
      std::sort(l.out.begin(), l.out.end(), cmp);
      std::sort(l.in.begin(), l.in.end(), cmp);
    }
    for (auto& [_, l] : a.by_hash) std::sort(l.begin(), l.end(), cmp);
  }

  // A leg is Swap when the opposite-direction legs of its group carry a token
  // other than its own; counter_tokens are exactly those other tokens.
  void classify_groups(const AccountId& node, const Adjacency& a) {
    for (const auto& [hash, group] : a.by_hash) {
      std::set<std::string> sent, received;
      for (const TransferEdge* e : group) {
        if (e->src == node) sent.insert(e->token);
        if (e->tgt == node) received.insert(e->token);
      }
      for (const TransferEdge* ce : group) {
        auto* e = const_cast<TransferEdge*>(ce);  // edges_ owns them mutably
        if (e->src == node) e->at_src = make_tag(received, e->token);
        if (e->tgt == node) e->at_tgt = make_tag(sent, e->token);
      }
    }
  }

  static PatternTag make_tag(const std::set<std::string>& opposite, const std::string& own) {
    PatternTag tag;
    for (const auto& t : opposite)
      if (t != own) tag.counter_tokens.push_back(t);
    if (!tag.counter_tokens.empty()) tag.kind = Pattern::kSwap;
    return tag;
  }

  const Adjacency& adj_or_empty(const AccountId& node) const {
    static const Adjacency kEmpty;
    auto it = nodes_.find(node);
    return it == nodes_.end() ? kEmpty : it->second;
  }

  std::deque<TransferEdge> edges_;
  std::unordered_map<EdgeId, const TransferEdge*> by_id_;
  std::map<AccountId, Adjacency> nodes_;
};

}  // namespace flowtrace

#endif  // FLOWTRACE_TXGRAPH_HPP
