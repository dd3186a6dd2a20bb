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

// Transaction-tracing rank: a local-push personalized PageRank whose residual
// is keyed by (account, timestamp, token).
//
// A push at node u moves alpha of u's residual into its rank and propagates
// the rest. For every residual key (t, b) the remainder is split between
//   - outgoing token-b edges later than t   (share beta), and
//   - incoming token-b edges earlier than t (share 1 - beta),
// each proportionally to amount. Swap legs are replaced by the transfers that
// continue the swapped token (redirect_set). A side with no eligible edges
// returns its share to u under the same key.

#ifndef FLOWTRACE_TTR_HPP
#define FLOWTRACE_TTR_HPP

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flowtrace/txgraph.hpp"
#include "flowtrace/types.hpp"

namespace flowtrace {

struct TraceParams {
  double alpha = 0.15;    // teleport
  double beta = 0.7;      // attention to outgoing edges
  double epsilon = 1e-3;  // residual threshold
  double phi = 1e-3;      // conductance threshold

  /// Range checks; throws std::invalid_argument.
  void validate() const {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(beta >= 0 && beta <= 1)) throw std::invalid_argument("beta must lie in [0,1]");
    if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(phi > 0)) throw std::invalid_argument("phi must be positive");
  }

  /// Bound on pop iterations when the trace runs to convergence.
  double iteration_bound() const { return 1.0 / (epsilon * alpha); }
};

struct ResidualKey {
  AccountId node;
  Timestamp timestamp = kNegInfinity;
  std::string token{kAnyToken};

  friend auto operator<=>(const ResidualKey&, const ResidualKey&) = default;
};

/// Sparse r_s(u, t, b). Zero entries are never stored. Keeps a per-node
/// total and an ordered index (total desc, account asc) for greedy pops.
class ResidualLedger {
 public:
  using SlotKey = std::pair<Timestamp, std::string>;
  using NodeEntries = std::map<SlotKey, double>;

  void add(const AccountId& node, Timestamp t, std::string_view token, double delta) {
    if (!(delta > 0)) return;
    auto& slots = entries_[node];
    slots[SlotKey{t, std::string(token)}] += delta;
    double& total = totals_[node];
    if (total > 0) order_.erase({total, node});
    total += delta;
    order_.insert({total, node});
  }

  void add(const ResidualKey& key, double delta) { add(key.node, key.timestamp, key.token, delta); }

  /// Removes and returns every entry of `node`.
  NodeEntries take(const AccountId& node) {
    NodeEntries out;
    auto it = entries_.find(node);
    if (it == entries_.end()) return out;
    out = std::move(it->second);
    entries_.erase(it);
    auto tt = totals_.find(node);
    order_.erase({tt->second, node});
    totals_.erase(tt);
    return out;
  }

  double node_residual(const AccountId& node) const {
    auto it = totals_.find(node);
    return it == totals_.end() ? 0.0 : it->second;
  }

  double get(const ResidualKey& key) const {
    auto it = entries_.find(key.node);
    if (it == entries_.end()) return 0.0;
    auto s = it->second.find(SlotKey{key.timestamp, key.token});
    return s == it->second.end() ? 0.0 : s->second;
  }

  /// Node with the largest total residual; ties go to the smaller id.
  std::optional<std::pair<AccountId, double>> max_node() const {
    if (order_.empty()) return std::nullopt;
    const auto& [total, node] = *order_.begin();
    return std::make_pair(node, total);
  }

  double total() const {
    double s = 0;
    for (const auto& [_, slots] : entries_)
      for (const auto& [__, v] : slots) s += v;
    return s;
  }

  const std::map<AccountId, NodeEntries>& entries() const noexcept { return entries_; }
  const std::map<AccountId, double>& totals() const noexcept { return totals_; }
  std::size_t node_count() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  struct DescTotal {
    bool operator()(const std::pair<double, AccountId>& a,
                    const std::pair<double, AccountId>& b) const {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    }
  };

  std::map<AccountId, NodeEntries> entries_;
  std::map<AccountId, double> totals_;
  std::set<std::pair<double, AccountId>, DescTotal> order_;
};

/// Sparse p_s(u).
class RankVector {
 public:
  void add(const AccountId& node, double delta) {
    if (delta > 0) values_[node] += delta;
  }
  double get(const AccountId& node) const {
    auto it = values_.find(node);
    return it == values_.end() ? 0.0 : it->second;
  }
  double sum() const {
    double s = 0;
    for (const auto& [_, v] : values_) s += v;
    return s;
  }
  bool contains(const AccountId& node) const { return values_.contains(node); }
  std::size_t size() const noexcept { return values_.size(); }
  const std::map<AccountId, double>& values() const noexcept { return values_; }

  /// Ranked accounts by descending score, ties by id.
  std::vector<std::pair<AccountId, double>> sorted() const {
    std::vector<std::pair<AccountId, double>> out(values_.begin(), values_.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
  }

  friend bool operator==(const RankVector&, const RankVector&) = default;

 private:
  std::map<AccountId, double> values_;
};

/// Fresh trace state: empty rank, unit residual on (source, -inf, *).
inline std::pair<RankVector, ResidualLedger> init_trace(const AccountId& source,
                                                        const TraceParams& params) {
  params.validate();
  ResidualLedger ledger;
  ledger.add(source, kNegInfinity, kAnyToken, 1.0);
  return {RankVector{}, std::move(ledger)};
}

inline double node_residual(const ResidualLedger& ledger, const AccountId& node) {
  return ledger.node_residual(node);
}

inline constexpr int kMaxRedirectDepth = 32;

/// Edges that carry the value of `edge` onward at `node`.
///
/// Xfer legs map to themselves. A Swap leg is replaced by the edges of `node`
/// in the same direction whose token is one of the leg's counter tokens, that
/// are no earlier (outgoing) / no later (incoming) than the leg, and that
/// belong to a different transaction; those are resolved recursively. A leg
/// whose hash was already expanded, or reached at depth kMaxRedirectDepth, is
/// kept as is.
inline TransactionGraph::EdgeList redirect_set(const TransferEdge& edge, const AccountId& node,
                                               const TransactionGraph& graph, Direction dir,
                                               int max_depth = kMaxRedirectDepth) {
  TransactionGraph::EdgeList out;
  std::set<EdgeId> emitted;
  std::set<std::string> visited;
  const TimeBound cmp = dir == Direction::kOut ? TimeBound::kAtOrAfter : TimeBound::kAtOrBefore;

  std::function<void(const TransferEdge&, int)> visit = [&](const TransferEdge& e, int depth) {
    const PatternTag& tag = e.tag_at(node);
    if (!tag.is_swap() || depth >= max_depth || visited.contains(e.hash)) {
      if (emitted.insert(e.id).second) out.push_back(&e);
      return;
    }
    visited.insert(e.hash);
    TransactionGraph::EdgeList next;
    for (const auto& token : tag.counter_tokens)
      for (const TransferEdge* c : graph.edges_of(node, dir, token, e.timestamp, cmp))
        if (c->hash != e.hash) next.push_back(c);
    std::sort(next.begin(), next.end(),
              [](const TransferEdge* a, const TransferEdge* b) { return edge_order(*a, *b); });
    for (const TransferEdge* c : next) visit(*c, depth + 1);
  };
  visit(edge, 0);
  return out;
}

struct PushOutcome {
  double to_rank = 0;   // alpha * residual moved into the rank
  double dropped = 0;   // mass of swap legs with no continuation
  std::size_t keys = 0;
};

/// One local push at `node`. No-op when the node holds no residual.
inline PushOutcome local_push(const AccountId& node, const TransactionGraph& graph,
                              const TraceParams& params, RankVector& rank,
                              ResidualLedger& ledger) {
  PushOutcome outcome;
  const double total = ledger.node_residual(node);
  if (!(total > 0)) return outcome;
  const double alpha = params.alpha;
  outcome.to_rank = alpha * total;
  rank.add(node, outcome.to_rank);

  const ResidualLedger::NodeEntries snapshot = ledger.take(node);
  outcome.keys = snapshot.size();
  for (const auto& [slot, r] : snapshot) {
    const auto& [t, token] = slot;
    for (Direction dir : {Direction::kOut, Direction::kIn}) {
      const double gamma = dir == Direction::kOut ? params.beta : 1.0 - params.beta;
      const double share = (1.0 - alpha) * gamma * r;
      const auto candidates =
          dir == Direction::kOut ? graph.edges_of(node, dir, token, t, TimeBound::kAfter)
                                 : graph.edges_of(node, dir, token, t, TimeBound::kBefore);
      if (candidates.empty()) {
        ledger.add(node, t, token, share);
        continue;
      }
      if (!(share > 0)) continue;
      double amount_sum = 0;
      for (const TransferEdge* e : candidates) amount_sum += e->amount;
      for (const TransferEdge* e : candidates) {
        const double weight = amount_sum > 0 ? e->amount / amount_sum
                                             : 1.0 / static_cast<double>(candidates.size());
        const double mass = share * weight;
        const auto targets = redirect_set(*e, node, graph, dir);
        if (targets.empty()) {
          outcome.dropped += mass;
          continue;
        }
        const double each = mass / static_cast<double>(targets.size());
        for (const TransferEdge* next : targets) {
          const AccountId& v = dir == Direction::kIn ? next->src : next->tgt;
          ledger.add(v, next->timestamp, next->token, each);
        }
      }
    }
  }
  return outcome;
}

}  // namespace flowtrace

#endif  // FLOWTRACE_TTR_HPP
