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

// Tracing metrics: recall against labelled targets, tracing depth of an
// output graph, and recall over the top-n ranked accounts.

#ifndef FLOWTRACE_EVAL_HPP
#define FLOWTRACE_EVAL_HPP

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "flowtrace/ttr.hpp"
#include "flowtrace/txgraph.hpp"

namespace flowtrace {

/// Fraction of `targets` present in `found`.
inline double recall(const std::set<AccountId>& found, const std::set<AccountId>& targets) {
  if (targets.empty()) throw std::invalid_argument("recall needs at least one target");
  std::size_t hit = 0;
  for (const auto& t : targets) hit += found.contains(t) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(targets.size());
}

inline double recall(const TransactionGraph& result, const std::set<AccountId>& targets) {
  auto nodes = result.nodes();
  return recall(std::set<AccountId>(nodes.begin(), nodes.end()), targets);
}

struct DepthReport {
  int depth = 0;
  std::size_t unreachable = 0;  // nodes not connected to the source
};

/// Largest shortest-hop distance from `source` over the result, edges taken
/// as undirected. Disconnected nodes are excluded and counted.
inline DepthReport tracing_depth(const TransactionGraph& result, const AccountId& source) {
  if (!result.contains(source)) throw std::invalid_argument("source not in result");
  std::map<AccountId, int> dist{{source, 0}};
  std::queue<AccountId> queue;
  queue.push(source);
  DepthReport rep;
  while (!queue.empty()) {
    AccountId u = queue.front();
    queue.pop();
    const int d = dist[u];
    rep.depth = std::max(rep.depth, d);
    auto visit = [&](const AccountId& v) {
      if (dist.emplace(v, d + 1).second) queue.push(v);
    };
    for (const TransferEdge* e : result.out_edges(u)) visit(e->tgt);
    for (const TransferEdge* e : result.in_edges(u)) visit(e->src);
  }
  rep.unreachable = result.node_count() - dist.size();
  return rep;
}

/// Recall over the `n` highest-scored accounts (ties by id).
inline double topn_recall(const std::map<AccountId, double>& scores,
                          const std::set<AccountId>& targets, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be at least 1");
  std::vector<std::pair<AccountId, double>> ranked(scores.begin(), scores.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::set<AccountId> top;
  for (std::size_t i = 0; i < ranked.size() && i < n; ++i) top.insert(ranked[i].first);
  return recall(top, targets);
}

inline double topn_recall(const RankVector& rank, const std::set<AccountId>& targets,
                          std::size_t n) {
  return topn_recall(rank.values(), targets, n);
}

}  // namespace flowtrace

#endif  // FLOWTRACE_EVAL_HPP
