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

#include <gtest/gtest.h>

#include "support.hpp"

namespace flowtrace {
namespace {

using testing::acct;
using testing::make_edge;
using testing::with_ids;

RankVector ranks(std::initializer_list<std::pair<const char*, double>> values) {
  RankVector r;
  for (const auto& [n, v] : values) r.add(acct(n), v);
  return r;
}

TransactionGraph pair_graph() {
  return TransactionGraph(with_ids({make_edge("s", "v", 1, 1, "T", "h1")}));
}

TEST(Conductance, WholeGraphIsZero) {
  TransactionGraph g = pair_graph();
  EXPECT_EQ(conductance({acct("s"), acct("v")}, g, ranks({{"s", .6}, {"v", .3}})), 0.0);
}

TEST(Conductance, BoundaryOverInside) {
  EXPECT_DOUBLE_EQ(conductance({acct("s")}, pair_graph(), ranks({{"s", .6}, {"v", .3}})), 0.5);
}

TEST(Conductance, NoOutgoingEdges) {
  EXPECT_EQ(conductance({acct("v")}, pair_graph(), ranks({{"s", .6}, {"v", .3}})), 0.0);
}

TEST(Conductance, ZeroRankIsUndefined) {
  EXPECT_THROW(conductance({acct("v")}, pair_graph(), ranks({{"s", .6}})), std::domain_error);
  EXPECT_THROW(conductance({}, pair_graph(), ranks({{"s", .6}})), std::invalid_argument);
}

TEST(Sweep, StopsAtThreshold) {
  const RankVector r = ranks({{"s", .6}, {"v", .3}});
  Community high = extract_community(pair_graph(), r, acct("s"), 0.6);
  EXPECT_EQ(high.members, std::vector<AccountId>{acct("s")});
  EXPECT_DOUBLE_EQ(high.conductance, 0.5);
  EXPECT_TRUE(high.converged);
  EXPECT_EQ(high.subgraph.edge_count(), 0u);

  Community low = extract_community(pair_graph(), r, acct("s"), 0.4);
  EXPECT_EQ(low.members, (std::vector<AccountId>{acct("s"), acct("v")}));
  EXPECT_EQ(low.conductance, 0.0);
  EXPECT_EQ(low.subgraph.edge_count(), 1u);
}

TEST(Sweep, StarAbsorbsByRank) {
  TransactionGraph g(with_ids({make_edge("s", "a", 1, 1, "T", "h1"),
                               make_edge("s", "b", 1, 2, "T", "h2"),
                               make_edge("s", "c", 1, 3, "T", "h3")}));
  const RankVector r = ranks({{"s", .5}, {"a", .2}, {"b", .1}, {"c", .05}});
  Community c = extract_community(g, r, acct("s"), 1e-3);
  EXPECT_EQ(c.members, (std::vector<AccountId>{acct("s"), acct("a"), acct("b"), acct("c")}));
  ASSERT_EQ(c.sweep_conductance.size(), 4u);
  EXPECT_DOUBLE_EQ(c.sweep_conductance[0], .35 / .5);
  EXPECT_DOUBLE_EQ(c.sweep_conductance[1], .15 / .7);
  EXPECT_DOUBLE_EQ(c.sweep_conductance[2], .05 / .8);
  EXPECT_EQ(c.sweep_conductance[3], 0.0);
  EXPECT_TRUE(c.converged);
}

TEST(Sweep, RejectsBadInput) {
  EXPECT_THROW(extract_community(pair_graph(), ranks({{"s", 1}}), acct("x"), .1),
               std::invalid_argument);
  EXPECT_THROW(extract_community(pair_graph(), ranks({{"s", 1}}), acct("s"), 0),
               std::invalid_argument);
  EXPECT_THROW(extract_community(pair_graph(), RankVector{}, acct("s"), .1), std::domain_error);
}

TEST(Sweep, UnrankedOutsidersComeLast) {
  // v has no rank but sits on the boundary; absorbing it still lowers conductance.
  TransactionGraph g(with_ids({make_edge("s", "a", 1, 1, "T", "h1"),
                               make_edge("s", "v", 1, 2, "T", "h2")}));
  Community c = extract_community(g, ranks({{"s", .5}, {"a", .3}}), acct("s"), 1e-6);
  EXPECT_EQ(c.members.size(), 2u);
  EXPECT_EQ(c.conductance, 0.0);
}

class SweepProperties : public ::testing::TestWithParam<int> {};

TEST_P(SweepProperties, IncrementalMatchesDefinition) {
  testing::RandomGraphSpec spec;
  spec.swap_fraction = 0.2;
  const auto edges = testing::random_edges(static_cast<std::uint64_t>(GetParam()), spec);
  GraphProvider provider{TransactionGraph(edges)};
  TraceResult t = run_expansion(acct("n000"), provider, TraceParams{});
  const std::vector<TransferEdge> sub(t.subgraph.edges().begin(), t.subgraph.edges().end());

  Community c = extract_community(t.subgraph, t.rank, acct("n000"), 1e-12);
  ASSERT_EQ(c.sweep_conductance.size(), c.members.size());
  std::set<AccountId> prefix;
  for (std::size_t k = 0; k < c.members.size(); ++k) {
    prefix.insert(c.members[k]);
    EXPECT_NEAR(c.sweep_conductance[k], testing::naive_conductance(prefix, sub, t.rank), 1e-9) << k;
    if (k >= 2) EXPECT_GE(t.rank.get(c.members[k - 1]), t.rank.get(c.members[k]));
  }

  Community d = extract_community(t.subgraph, t.rank, acct("n000"), 1e-3);
  if (d.converged) EXPECT_LT(d.conductance, 1e-3);
  EXPECT_NEAR(d.conductance, testing::naive_conductance(d.member_set(), sub, t.rank), 1e-9);
  EXPECT_TRUE(d.member_set().contains(acct("n000")));
}

INSTANTIATE_TEST_SUITE_P(Seeds, SweepProperties, ::testing::Range(1, 9));

}  // namespace
}  // namespace flowtrace
