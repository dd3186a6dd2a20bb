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

#ifndef FLOWTRACE_EXPANSION_HPP
#define FLOWTRACE_EXPANSION_HPP

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowtrace/ttr.hpp"
#include "flowtrace/txgraph.hpp"
#include "flowtrace/types.hpp"

namespace flowtrace {

struct ProviderCapabilities {
  bool paging = false;
  bool rate_limited = false;
};

/// Source of incident edges for an account.
class EdgeProvider {
 public:
  virtual ~EdgeProvider() = default;
  /// All edges incident to `account`. Throws ProviderError on failure.
  virtual std::vector<TransferEdge> fetch_edges(const AccountId& account) = 0;
  virtual ProviderCapabilities capabilities() const { return {}; }
};

/// Provider over an in-memory graph, e.g. a whole ingested file.
class GraphProvider final : public EdgeProvider {
 public:
  explicit GraphProvider(TransactionGraph graph) : graph_(std::move(graph)) {}

  std::vector<TransferEdge> fetch_edges(const AccountId& account) override {
    ++calls_;
    std::vector<TransferEdge> out;
    for (const TransferEdge* e : graph_.out_edges(account)) out.push_back(*e);
    for (const TransferEdge* e : graph_.in_edges(account))
      if (!(e->src == account)) out.push_back(*e);  // self-loops once
    return out;
  }

  const TransactionGraph& graph() const noexcept { return graph_; }
  std::size_t calls() const noexcept { return calls_; }

 private:
  TransactionGraph graph_;
  std::size_t calls_ = 0;
};

/// Memoizes a provider so every account is fetched at most once per run.
class CachedProvider {
 public:
  explicit CachedProvider(EdgeProvider& inner) : inner_(inner) {}

  const std::vector<TransferEdge>& fetch(const AccountId& account) {
    auto it = cache_.find(account);
    if (it != cache_.end()) return it->second;
    ++calls_;
    return cache_.emplace(account, inner_.fetch_edges(account)).first->second;
  }

  bool cached(const AccountId& account) const { return cache_.contains(account); }
  std::size_t calls() const noexcept { return calls_; }

 private:
  EdgeProvider& inner_;
  std::map<AccountId, std::vector<TransferEdge>> cache_;
  std::size_t calls_ = 0;
};

enum class Termination { kConverged, kBudgetExhausted, kProviderError };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "residuals-below-epsilon";
    case Termination::kBudgetExhausted: return "budget-exhausted";
    case Termination::kProviderError: return "provider-error";
  }
  return "unknown";
}

struct ExpansionBudget {
  std::optional<std::size_t> max_iterations;
  std::optional<std::size_t> max_provider_calls;  // default 10 / (epsilon * alpha)
  std::optional<std::size_t> max_edges_per_node;  // hub guard, unlimited by default
};

/// Snapshot handed to an observer after every push.
struct PushEvent {
  std::size_t iteration = 0;
  const AccountId* node = nullptr;
  const RankVector* rank = nullptr;
  const ResidualLedger* ledger = nullptr;
  double dropped_mass = 0;  // cumulative
};

struct TraceResult {
  AccountId source;
  TransactionGraph subgraph;
  RankVector rank;
  ResidualLedger ledger;
  TraceParams params;
  std::size_t iterations = 0;
  std::size_t provider_calls = 0;
  Termination termination = Termination::kConverged;
  double dropped_mass = 0;
  std::vector<AccountId> capped_nodes;
  std::string error;
};

/// Greedy selection: the account with the largest total residual, if that
/// residual is at least epsilon.
inline std::optional<AccountId> pop(const ResidualLedger& ledger, double epsilon) {
  auto top = ledger.max_node();
  if (!top || top->second < epsilon) return std::nullopt;
  return top->first;
}

/// Fetches the edges of `node` through the cache, applying the hub guard.
inline std::vector<TransferEdge> expand(CachedProvider& provider, const AccountId& node,
                                        std::optional<std::size_t> max_edges = std::nullopt,
                                        bool* capped = nullptr) {
  std::vector<TransferEdge> edges = provider.fetch(node);
  if (max_edges && edges.size() > *max_edges) {
    std::sort(edges.begin(), edges.end(), edge_order);
    edges.resize(*max_edges);
    if (capped) *capped = true;
  }
  return edges;
}

/// Pop / Expand / Push / Rank until no account holds epsilon residual or the
/// budget runs out. Provider failures end the run with a partial result.
inline TraceResult run_expansion(const AccountId& source, EdgeProvider& provider,
                                 const TraceParams& params, const ExpansionBudget& budget = {},
                                 const std::function<void(const PushEvent&)>& observer = {}) {
  params.validate();
  TraceResult result;
  result.source = source;
  result.params = params;
  std::tie(result.rank, result.ledger) = init_trace(source, params);
  result.subgraph.add_node(source);

  const double bound = params.iteration_bound();
  const std::size_t max_calls = budget.max_provider_calls.value_or(
      static_cast<std::size_t>(std::ceil(10.0 * bound)));
  CachedProvider cache(provider);
  std::set<AccountId> expanded;

  while (true) {
    auto next = pop(result.ledger, params.epsilon);
    if (!next) {
      result.termination = Termination::kConverged;
      break;
    }
    if (budget.max_iterations && result.iterations >= *budget.max_iterations) {
      result.termination = Termination::kBudgetExhausted;
      break;
    }
    const AccountId node = *next;
    if (!expanded.contains(node)) {
      if (!cache.cached(node) && cache.calls() >= max_calls) {
        result.termination = Termination::kBudgetExhausted;
        break;
      }
      bool capped = false;
      std::vector<TransferEdge> edges;
      try {
        edges = expand(cache, node, budget.max_edges_per_node, &capped);
      } catch (const ProviderError& err) {
        result.termination = Termination::kProviderError;
        result.error = err.what();
        break;
      }
      if (capped) result.capped_nodes.push_back(node);
      result.subgraph.add_edges(edges);
      result.subgraph.classify_node(node);
      expanded.insert(node);
    }
    const PushOutcome out =
        local_push(node, result.subgraph, params, result.rank, result.ledger);
    result.dropped_mass += out.dropped;
    ++result.iterations;
    // Each push moves at least alpha * epsilon of unit mass into the rank.
    if (static_cast<double>(result.iterations) > bound)
      throw std::logic_error("expansion exceeded the 1/(epsilon*alpha) iteration bound");
    if (observer)
      observer(PushEvent{result.iterations, &node, &result.rank, &result.ledger,
                         result.dropped_mass});
  }
  result.provider_calls = cache.calls();
  return result;
}

}  // namespace flowtrace

#endif  // FLOWTRACE_EXPANSION_HPP
