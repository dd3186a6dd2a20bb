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

// End-to-end runs of every tracing method behind one configuration, and the
// per-case comparison report.

#ifndef FLOWTRACE_PIPELINE_HPP
#define FLOWTRACE_PIPELINE_HPP

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowtrace/baselines.hpp"
#include "flowtrace/community.hpp"
#include "flowtrace/eval.hpp"
#include "flowtrace/expansion.hpp"
#include "flowtrace/planted.hpp"
#include "flowtrace/ttr.hpp"

namespace flowtrace {

enum class Method { kTtr, kAppr, kBfs, kPoison, kHaircut };

inline constexpr Method kAllMethods[] = {Method::kBfs, Method::kPoison, Method::kHaircut,
                                         Method::kAppr, Method::kTtr};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kTtr: return "ttr";
    case Method::kAppr: return "appr";
    case Method::kBfs: return "bfs";
    case Method::kPoison: return "poison";
    case Method::kHaircut: return "haircut";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (Method m : kAllMethods)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

/// Method and parameter selection shared by the CLI and the harness.
struct RunConfig {
  Method method = Method::kTtr;
  TraceParams params;
  int depth = 2;          // bfs, poison
  double cutoff = 0.001;  // haircut
  ExpansionBudget budget;

  void validate() const {
    params.validate();
    if (method == Method::kTtr && params.phi < params.epsilon)
      throw std::invalid_argument("phi must be >= epsilon for community extraction");
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    if (!(cutoff > 0 && cutoff <= 1)) throw std::invalid_argument("cutoff must lie in (0,1]");
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"method", std::string(to_string(method))},
                     {"alpha", params.alpha},
                     {"beta", params.beta},
                     {"epsilon", params.epsilon},
                     {"phi", params.phi},
                     {"depth", depth},
                     {"cutoff", cutoff}};
    auto opt = [](const std::optional<std::size_t>& v) {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    j["budget"] = {{"max_iterations", opt(budget.max_iterations)},
                   {"max_provider_calls", opt(budget.max_provider_calls)},
                   {"max_edges_per_node", opt(budget.max_edges_per_node)}};
    return j;
  }
};

struct MethodOutcome {
  Method method = Method::kTtr;
  AccountId source;
  TransactionGraph output;    // the audit graph of the method
  TransactionGraph explored;  // everything fetched (ttr/appr), else == output
  std::map<AccountId, double> scores;  // rank or taint; empty for bfs
  std::map<AccountId, double> residual;
  std::set<AccountId> community;  // ttr only
  bool converged = true;
  Termination termination = Termination::kConverged;
  nlohmann::json provenance = nlohmann::json::object();
};

inline MethodOutcome run_method(const RunConfig& cfg, EdgeProvider& provider,
                                const AccountId& source) {
  cfg.validate();
  MethodOutcome out;
  out.method = cfg.method;
  out.source = source;
  nlohmann::json res = nlohmann::json::object();
  switch (cfg.method) {
    case Method::kTtr: {
      TraceResult tr = run_expansion(source, provider, cfg.params, cfg.budget);
      out.termination = tr.termination;
      res["iterations"] = tr.iterations;
      res["iteration_bound"] = cfg.params.iteration_bound();
      res["termination"] = std::string(to_string(tr.termination));
      res["dropped_mass"] = tr.dropped_mass;
      res["provider_calls"] = tr.provider_calls;
      std::vector<std::string> capped;
      for (const auto& c : tr.capped_nodes) capped.push_back(c.str());
      res["capped_nodes"] = capped;
      if (!tr.error.empty()) res["error"] = tr.error;
      for (const auto& [n, v] : tr.rank.values()) out.scores[n] = v;
      for (const auto& [n, v] : tr.ledger.totals()) out.residual[n] = v;
      if (tr.rank.get(source) > 0) {
        Community c = extract_community(tr.subgraph, tr.rank, source, cfg.params.phi);
        out.community = c.member_set();
        out.converged = c.converged;
        out.output = std::move(c.subgraph);
        res["community"] = {{"size", c.members.size()},
                            {"conductance", c.conductance},
                            {"converged", c.converged}};
      } else {
        out.community = {source};
        out.converged = false;
        out.output.add_node(source);
        res["community"] = {{"size", 1}, {"conductance", nullptr}, {"converged", false}};
      }
      out.explored = std::move(tr.subgraph);
      break;
    }
    case Method::kAppr: {
      ApprResult ar = appr_rank(provider, source, cfg.params.alpha, cfg.params.epsilon);
      res["iterations"] = ar.iterations;
      for (const auto& [n, v] : ar.rank.values()) out.scores[n] = v;
      for (const auto& [n, v] : ar.residual.totals()) out.residual[n] = v;
      std::set<AccountId> ranked{source};
      for (const auto& [n, _] : ar.rank.values()) ranked.insert(n);
      out.output = ar.subgraph.induced(ranked);
      out.explored = std::move(ar.subgraph);
      break;
    }
    case Method::kBfs:
      out.output = bfs_trace(provider, source, cfg.depth);
      out.explored = out.output;
      break;
    case Method::kPoison: {
      TaintResult t = poison_trace(provider, source, cfg.depth);
      out.scores = t.taint;
      out.output = std::move(t.subgraph);
      out.explored = out.output;
      break;
    }
    case Method::kHaircut: {
      TaintResult t = haircut_trace(provider, source, cfg.cutoff);
      out.scores = t.taint;
      out.output = std::move(t.subgraph);
      out.explored = out.output;
      break;
    }
  }
  res["nodes"] = out.output.node_count();
  res["edges"] = out.output.edge_count();
  out.provenance = {{"config", cfg.to_json()}, {"source", source.str()}, {"result", res}};
  return out;
}

/// One row of the comparison table.
struct MethodReport {
  Method method = Method::kTtr;
  double recall = 0;
  std::size_t nodes = 0;
  int depth = 0;
  double runtime_ms = 0;
  std::vector<std::pair<std::size_t, double>> topn;  // rank-based methods only
};

struct CaseReport {
  std::string name;
  CaseSpec spec;
  std::size_t targets = 0;
  std::vector<MethodReport> methods;
};

inline const std::vector<std::size_t>& default_topn_grid() {
  static const std::vector<std::size_t> grid{1, 5, 10, 20, 50, 100, 200, 500};
  return grid;
}

inline CaseReport evaluate_case(const PlantedCase& pc, const RunConfig& base,
                                const std::vector<std::size_t>& topn_grid = default_topn_grid()) {
  CaseReport rep;
  rep.name = pc.spec.name;
  rep.spec = pc.spec;
  rep.targets = pc.targets.size();
  GraphProvider provider(pc.graph());
  for (Method m : kAllMethods) {
    RunConfig cfg = base;
    cfg.method = m;
    const auto t0 = std::chrono::steady_clock::now();
    MethodOutcome o = run_method(cfg, provider, pc.source);
    const auto t1 = std::chrono::steady_clock::now();
    MethodReport mr;
    mr.method = m;
    mr.recall = recall(o.output, pc.targets);
    mr.nodes = o.output.node_count();
    mr.depth = tracing_depth(o.output, pc.source).depth;
    mr.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (m == Method::kTtr || m == Method::kAppr || m == Method::kHaircut)
      for (std::size_t n : topn_grid) mr.topn.emplace_back(n, topn_recall(o.scores, pc.targets, n));
    rep.methods.push_back(std::move(mr));
  }
  return rep;
}

inline nlohmann::json to_json(const MethodReport& m) {
  nlohmann::json topn = nlohmann::json::array();
  for (const auto& [n, r] : m.topn) topn.push_back({{"n", n}, {"recall", r}});
  return {{"method", std::string(to_string(m.method))},
          {"recall", m.recall},
          {"nodes", m.nodes},
          {"depth", m.depth},
          {"runtime_ms", m.runtime_ms},
          {"topn", topn}};
}

inline nlohmann::json to_json(const CaseReport& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : c.methods) methods.push_back(to_json(m));
  return {{"name", c.name}, {"spec", c.spec}, {"targets", c.targets}, {"methods", methods}};
}

/// Per-method means over a set of cases.
struct MethodSummary {
  Method method = Method::kTtr;
  std::size_t cases = 0;
  double recall = 0;
  double nodes = 0;
  double depth = 0;
  double runtime_ms = 0;
  std::vector<std::pair<std::size_t, double>> topn;
};

/// Means in kAllMethods order; independent of case order.
inline std::vector<MethodSummary> aggregate(const std::vector<CaseReport>& cases) {
  std::vector<MethodSummary> out;
  for (Method m : kAllMethods) {
    MethodSummary agg;
    agg.method = m;
    std::map<std::size_t, double> topn;
    for (const auto& c : cases)
      for (const auto& r : c.methods)
        if (r.method == m) {
          agg.recall += r.recall;
          agg.nodes += static_cast<double>(r.nodes);
          agg.depth += r.depth;
          agg.runtime_ms += r.runtime_ms;
          for (const auto& [n, v] : r.topn) topn[n] += v;
          ++agg.cases;
        }
    if (agg.cases == 0) continue;
    const double k = static_cast<double>(agg.cases);
    agg.recall /= k;
    agg.nodes /= k;
    agg.depth /= k;
    agg.runtime_ms /= k;
    for (const auto& [n, v] : topn) agg.topn.emplace_back(n, v / k);
    out.push_back(std::move(agg));
  }
  return out;
}

inline nlohmann::json to_json(const MethodSummary& m) {
  nlohmann::json topn = nlohmann::json::array();
  for (const auto& [n, r] : m.topn) topn.push_back({{"n", n}, {"recall", r}});
  return {{"method", std::string(to_string(m.method))},
          {"cases", m.cases},
          {"recall", m.recall},
          {"nodes", m.nodes},
          {"depth", m.depth},
          {"runtime_ms", m.runtime_ms},
          {"topn", topn}};
}

}  // namespace flowtrace

#endif  // FLOWTRACE_PIPELINE_HPP
