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

// Reference tracers: breadth-first search, poison and haircut taint, classic
// approximate personalized PageRank, and a dense exact PageRank solve.
//
// The tracers pull adjacency through an EdgeProvider exactly like the
// expansion loop does, so every method sees the same data.

#ifndef FLOWTRACE_BASELINES_HPP
#define FLOWTRACE_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "flowtrace/expansion.hpp"
#include "flowtrace/ttr.hpp"
#include "flowtrace/txgraph.hpp"

namespace flowtrace {

/// Nodes reachable from `source` in at most `depth` directed hops, with the
/// edges that were traversed.
inline TransactionGraph bfs_trace(EdgeProvider& provider, const AccountId& source, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  CachedProvider cache(provider);
  TransactionGraph out;
  out.add_node(source);
  std::map<AccountId, int> dist{{source, 0}};
  std::queue<AccountId> queue;
  queue.push(source);
  std::vector<TransferEdge> kept;
  while (!queue.empty()) {
    AccountId u = queue.front();
    queue.pop();
    const int d = dist[u];
    if (d >= depth) continue;
    for (const auto& e : cache.fetch(u)) {
      if (!(e.src == u)) continue;
      kept.push_back(e);
      if (dist.emplace(e.tgt, d + 1).second) queue.push(e.tgt);
    }
  }
  for (const auto& [n, _] : dist) out.add_node(n);
  out.add_edges(kept);
  return out;
}

struct TaintResult {
  TransactionGraph subgraph;
  std::map<AccountId, double> taint;  // 1.0 for poison, fraction for haircut
  std::map<AccountId, Timestamp> tainted_at;
};

/// Boolean taint along outgoing edges, at most `depth` hops. An edge passes
/// taint only if it is no earlier than the moment its sender got tainted.
inline TaintResult poison_trace(EdgeProvider& provider, const AccountId& source, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  CachedProvider cache(provider);
  std::map<AccountId, Timestamp> when{{source, kNegInfinity}};
  std::map<EdgeId, TransferEdge> used;
  std::set<AccountId> frontier{source};
  // Round k relaxes paths of k hops; a node re-enters the frontier whenever it
  // gets tainted earlier than before.
  for (int round = 0; round < depth && !frontier.empty(); ++round) {
    std::set<AccountId> changed;
    for (const auto& u : frontier) {
      const Timestamp since = when.at(u);
      for (const auto& e : cache.fetch(u)) {
        if (!(e.src == u) || e.timestamp < since) continue;
        used.emplace(e.id, e);
        auto [it, fresh] = when.emplace(e.tgt, e.timestamp);
        if (fresh || e.timestamp < it->second) {
          it->second = e.timestamp;
          changed.insert(e.tgt);
        }
      }
    }
    frontier = std::move(changed);
  }
  TaintResult r;
  r.tainted_at = when;
  for (const auto& [n, _] : when) {
    r.taint[n] = 1.0;
    r.subgraph.add_node(n);
  }
  std::vector<TransferEdge> kept;
  for (const auto& [_, e] : used) kept.push_back(e);
  r.subgraph.add_edges(kept);
  return r;
}

/// Proportional taint. The source holds a dirty fraction of 1; each dirty
/// packet arriving at time t is split over the receiver's outgoing edges
/// strictly later than t in proportion to amount. Packets below
/// `cutoff_fraction` come to rest. Returns accounts whose accumulated dirty
/// fraction reached the cutoff, plus the source. Reported fractions are
/// capped at 1.
inline TaintResult haircut_trace(EdgeProvider& provider, const AccountId& source,
                                 double cutoff_fraction = 1e-3) {
  if (!(cutoff_fraction > 0 && cutoff_fraction <= 1))
    throw std::invalid_argument("cutoff must lie in (0,1]");
  CachedProvider cache(provider);
  struct Packet {
    Timestamp at;
    AccountId node;
    std::uint64_t seq;
    double value;
    bool operator>(const Packet& o) const {
      return std::tie(at, node, seq) > std::tie(o.at, o.node, o.seq);
    }
  };
  std::priority_queue<Packet, std::vector<Packet>, std::greater<>> queue;
  std::uint64_t seq = 0;
  queue.push({kNegInfinity, source, seq++, 1.0});
  std::map<AccountId, double> dirty;
  std::map<AccountId, Timestamp> first_dirty;
  std::map<EdgeId, TransferEdge> carried;
  while (!queue.empty()) {
    Packet p = queue.top();
    queue.pop();
    dirty[p.node] += p.value;
    first_dirty.emplace(p.node, p.at);
    if (p.value < cutoff_fraction) continue;
    std::vector<const TransferEdge*> outs;
    double sum = 0;
    for (const auto& e : cache.fetch(p.node))
      if (e.src == p.node && e.timestamp > p.at) {
        outs.push_back(&e);
        sum += e.amount;
      }
    if (!(sum > 0)) continue;  // dirty value rests here
    for (const TransferEdge* e : outs) {
      if (!(e->amount > 0)) continue;
      carried.emplace(e->id, *e);
      queue.push({e->timestamp, e->tgt, seq++, p.value * e->amount / sum});
    }
  }
  TaintResult r;
  std::set<AccountId> keep{source};
  for (const auto& [n, v] : dirty)
    if (v >= cutoff_fraction) keep.insert(n);
  for (const auto& n : keep) {
    r.taint[n] = std::min(1.0, dirty[n]);  // value cycling back is not counted twice
    r.tainted_at[n] = first_dirty[n];
    r.subgraph.add_node(n);
  }
  std::vector<TransferEdge> kept;
  for (const auto& [_, e] : carried)
    if (keep.contains(e.src) && keep.contains(e.tgt)) kept.push_back(e);
  r.subgraph.add_edges(kept);
  return r;
}

struct ApprResult {
  RankVector rank;
  ResidualLedger residual;  // one slot per node
  TransactionGraph subgraph;
  std::size_t iterations = 0;
};

/// Degree-normalized local push on the directed multigraph. Amounts,
/// timestamps and tokens are ignored; a node without outgoing edges keeps
/// its propagated share (self-loop). Halts when every residual is < epsilon.
inline ApprResult appr_rank(EdgeProvider& provider, const AccountId& source, double alpha,
                            double epsilon) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
  CachedProvider cache(provider);
  ApprResult r;
  r.subgraph.add_node(source);
  r.residual.add(source, kNegInfinity, kAnyToken, 1.0);
  std::set<AccountId> expanded;
  while (auto next = pop(r.residual, epsilon)) {
    const AccountId u = *next;
    if (expanded.insert(u).second) r.subgraph.add_edges(cache.fetch(u));
    const double mass = r.residual.node_residual(u);
    r.residual.take(u);
    r.rank.add(u, alpha * mass);
    const auto& outs = r.subgraph.out_edges(u);
    const double rest = (1 - alpha) * mass;
    if (outs.empty()) {
      r.residual.add(u, kNegInfinity, kAnyToken, rest);
    } else {
      const double each = rest / static_cast<double>(outs.size());
      for (const TransferEdge* e : outs) r.residual.add(e->tgt, kNegInfinity, kAnyToken, each);
    }
    ++r.iterations;
  }
  return r;
}

/// Dense solve of p = alpha e_s + (1 - alpha) p M with M = D^-1 A over edge
/// multiplicities; rows of nodes without outgoing edges are self-loops.
/// Intended for small graphs (test oracle).
inline RankVector exact_ppr(const TransactionGraph& graph, const AccountId& source, double alpha) {
  const std::vector<AccountId> nodes = graph.nodes();
  std::map<AccountId, Eigen::Index> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<Eigen::Index>(i);
  if (!index.contains(source)) throw std::invalid_argument("source not in graph");
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n, n);
  for (const auto& u : nodes) {
    const auto& outs = graph.out_edges(u);
    const Eigen::Index i = index[u];
    if (outs.empty()) {
      transition(i, i) = 1.0;
      continue;
    }
    for (const TransferEdge* e : outs)
      transition(i, index[e->tgt]) += 1.0 / static_cast<double>(outs.size());
  }
  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - (1.0 - alpha) * transition.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(index[source]) = alpha;
  Eigen::VectorXd p = system.partialPivLu().solve(rhs);
  RankVector out;
  for (Eigen::Index i = 0; i < n; ++i) out.add(nodes[static_cast<std::size_t>(i)], p(i));
  return out;
}

}  // namespace flowtrace

#endif  // FLOWTRACE_BASELINES_HPP
