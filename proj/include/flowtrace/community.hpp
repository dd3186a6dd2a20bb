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

// Rank-conductance sweep. The conductance of a member set S is the rank mass
// of its out-boundary (out-neighbours of S outside S) divided by the rank
// mass of S. Starting from {source}, the highest-ranked outsider is absorbed
// until the conductance drops below phi.

#ifndef FLOWTRACE_COMMUNITY_HPP
#define FLOWTRACE_COMMUNITY_HPP

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "flowtrace/ttr.hpp"
#include "flowtrace/txgraph.hpp"

namespace flowtrace {

struct Community {
  std::vector<AccountId> members;  // sweep order, source first
  double conductance = 0;
  bool converged = true;
  TransactionGraph subgraph;
  std::vector<double> sweep_conductance;  // value after each absorption step, [0] for {source}

  std::set<AccountId> member_set() const { return {members.begin(), members.end()}; }
};

/// Out-boundary of `members`.
inline std::set<AccountId> boundary(const std::set<AccountId>& members,
                                    const TransactionGraph& graph) {
  std::set<AccountId> out;
  for (const auto& u : members)
    for (const TransferEdge* e : graph.out_edges(u))
      if (!members.contains(e->tgt)) out.insert(e->tgt);
  return out;
}

/// From-scratch conductance. Throws std::domain_error when S carries no rank.
inline double conductance(const std::set<AccountId>& members, const TransactionGraph& graph,
                          const RankVector& rank) {
  if (members.empty()) throw std::invalid_argument("conductance of an empty set");
  double inside = 0;
  for (const auto& u : members) inside += rank.get(u);
  if (!(inside > 0)) throw std::domain_error("conductance undefined: member set has zero rank");
  double edge_mass = 0;
  for (const auto& v : boundary(members, graph)) edge_mass += rank.get(v);
  return edge_mass / inside;
}

/// Sweep from {source}. When every node is absorbed without reaching phi the
/// whole graph is returned with converged = false.
inline Community extract_community(const TransactionGraph& graph, const RankVector& rank,
                                   const AccountId& source, double phi) {
  if (!graph.contains(source)) throw std::invalid_argument("source not in subgraph");
  if (!(phi > 0)) throw std::invalid_argument("phi must be positive");

  // Outsiders by rank desc, id asc; graph.nodes() is already id-sorted.
  std::vector<AccountId> candidates;
  for (const auto& n : graph.nodes())
    if (!(n == source)) candidates.push_back(n);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const AccountId& a, const AccountId& b) { return rank.get(a) > rank.get(b); });

  Community c;
  std::set<AccountId> in_s{source};
  std::set<AccountId> edge;  // current out-boundary
  double inside = rank.get(source);
  double edge_mass = 0;
  auto absorb_out_neighbours = [&](const AccountId& u) {
    for (const TransferEdge* e : graph.out_edges(u))
      if (!in_s.contains(e->tgt) && edge.insert(e->tgt).second) edge_mass += rank.get(e->tgt);
  };
  auto current = [&] {
    if (!(inside > 0)) throw std::domain_error("conductance undefined: member set has zero rank");
    return edge_mass / inside;
  };

  c.members.push_back(source);
  absorb_out_neighbours(source);
  double phi_s = current();
  c.sweep_conductance.push_back(phi_s);
  std::size_t next = 0;
  while (phi_s >= phi && next < candidates.size()) {
    const AccountId& u = candidates[next++];
    in_s.insert(u);
    c.members.push_back(u);
    inside += rank.get(u);
    if (edge.erase(u)) edge_mass -= rank.get(u);
    absorb_out_neighbours(u);
    // Guard against drift in the running sum; boundary ranks are non-negative.
    if (edge.empty()) edge_mass = 0;
    phi_s = current();
    c.sweep_conductance.push_back(phi_s);
  }
  c.conductance = phi_s;
  c.converged = phi_s < phi;
  c.subgraph = graph.induced(in_s);
  return c;
}

}  // namespace flowtrace

#endif  // FLOWTRACE_COMMUNITY_HPP
