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

// The trace, compare and generate commands, independent of argument parsing.
//
// Exit codes: 0 success, 1 some compare cases failed, 2 configuration error,
// 3 provider error, 4 community extraction did not converge (result written).
// Errors go to the error stream as one JSON object per line.

#ifndef FLOWTRACE_COMMANDS_HPP
#define FLOWTRACE_COMMANDS_HPP

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowtrace/export.hpp"
#include "flowtrace/ingest.hpp"
#include "flowtrace/pipeline.hpp"
#include "flowtrace/planted.hpp"
// Last: cpp-httplib pulls in <resolv.h>, whose _res macro breaks Eigen
// headers included after it.
#include "flowtrace/http_provider.hpp"

namespace flowtrace {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitPartial = 1,
  kExitConfig = 2,
  kExitProvider = 3,
  kExitNotConverged = 4,
};

enum class ExportFormat { kGraphml, kJson };

inline std::string_view to_string(ExportFormat f) {
  return f == ExportFormat::kGraphml ? "graphml" : "json";
}

inline ExportFormat parse_export_format(std::string_view s) {
  if (s == "graphml") return ExportFormat::kGraphml;
  if (s == "json") return ExportFormat::kJson;
  throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

struct TraceOptions {
  RunConfig run;
  std::string source;
  std::string provider;  // file path, file:<path>, or http(s):// API base URL
  std::string chain_symbol = "ETH";
  std::string cache_dir;
  std::string out;
  ExportFormat format = ExportFormat::kGraphml;
  bool frontier = false;  // export every fetched edge, not just the result graph
  bool timings = false;
};

/// Everything needed to rerun the trace. The API key is never recorded.
inline nlohmann::json to_json(const TraceOptions& o) {
  nlohmann::json j = o.run.to_json();
  j["source"] = o.source;
  j["provider"] = o.provider;
  j["chain_symbol"] = o.chain_symbol;
  j["cache_dir"] = o.cache_dir;
  j["out"] = o.out;
  j["format"] = std::string(to_string(o.format));
  j["frontier"] = o.frontier;
  return j;
}

inline TraceOptions trace_options_from_json(const nlohmann::json& j) {
  TraceOptions o;
  o.run.method = parse_method(j.at("method").get<std::string>());
  o.run.params.alpha = j.at("alpha").get<double>();
  o.run.params.beta = j.at("beta").get<double>();
  o.run.params.epsilon = j.at("epsilon").get<double>();
  o.run.params.phi = j.at("phi").get<double>();
  o.run.depth = j.at("depth").get<int>();
  o.run.cutoff = j.at("cutoff").get<double>();
  if (auto b = j.find("budget"); b != j.end()) {
    auto opt = [&](const char* key) -> std::optional<std::size_t> {
      auto it = b->find(key);
      if (it == b->end() || it->is_null()) return std::nullopt;
      return it->get<std::size_t>();
    };
    o.run.budget.max_iterations = opt("max_iterations");
    o.run.budget.max_provider_calls = opt("max_provider_calls");
    o.run.budget.max_edges_per_node = opt("max_edges_per_node");
  }
  o.source = j.at("source").get<std::string>();
  o.provider = j.at("provider").get<std::string>();
  o.chain_symbol = j.value("chain_symbol", o.chain_symbol);
  o.cache_dir = j.value("cache_dir", o.cache_dir);
  o.out = j.value("out", o.out);
  o.format = parse_export_format(j.value("format", std::string("graphml")));
  o.frontier = j.value("frontier", false);
  return o;
}

inline void report_error(std::ostream& err, std::string_view kind, std::string_view message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

namespace detail {

inline bool is_http_url(std::string_view s) {
  return s.starts_with("http://") || s.starts_with("https://");
}

inline std::filesystem::path provider_file(std::string_view spec) {
  if (spec.starts_with("file://")) spec.remove_prefix(7);
  else if (spec.starts_with("file:")) spec.remove_prefix(5);
  return std::filesystem::path(std::string(spec));
}

inline InputFormat input_format_for(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".jsonl" || ext == ".ndjson" ? InputFormat::kJsonLines : InputFormat::kCsv;
}

struct LoadedProvider {
  std::unique_ptr<EdgeProvider> provider;
  const TransactionGraph* graph = nullptr;  // set for file providers
  nlohmann::json info;
};

inline LoadedProvider open_provider(const TraceOptions& o) {
  LoadedProvider lp;
  if (is_http_url(o.provider)) {
    HttpProviderOptions h;
    h.base_url = o.provider;
    h.chain_symbol = o.chain_symbol;
    h.cache_dir = o.cache_dir;
    lp.provider = std::make_unique<HttpProvider>(std::move(h));
    lp.info = {{"kind", "http"}, {"base_url", o.provider}, {"cache_dir", o.cache_dir}};
    return lp;
  }
  const auto path = provider_file(o.provider);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProviderError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  std::istringstream stream(content);
  IngestOptions ingest;
  ingest.chain_symbol = o.chain_symbol;
  IngestReport rep;
  try {
    rep = ingest_stream(stream, input_format_for(path), ingest);
  } catch (const IngestError& e) {
    throw ProviderError(path.string() + ": " + e.what());
  }
  auto gp = std::make_unique<GraphProvider>(TransactionGraph(rep.edges));
  lp.graph = &gp->graph();
  lp.provider = std::move(gp);
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a(content)));
  lp.info = {{"kind", "file"},
             {"path", path.string()},
             {"content_fnv1a", digest},
             {"records", rep.records},
             {"skipped", rep.errors.size()}};
  return lp;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace detail

inline int cmd_trace(const TraceOptions& o, std::ostream& err) {
  AccountId source;
  try {
    o.run.validate();
    source = AccountId(o.source);
    if (o.out.empty()) throw std::invalid_argument("an output path is required");
  } catch (const std::invalid_argument& e) {
    report_error(err, "config", e.what());
    return kExitConfig;
  }

  const auto t_load = std::chrono::steady_clock::now();
  detail::LoadedProvider lp;
  try {
    lp = detail::open_provider(o);
  } catch (const ProviderError& e) {
    report_error(err, "provider", e.what());
    return kExitProvider;
  } catch (const std::invalid_argument& e) {
    report_error(err, "config", e.what());
    return kExitConfig;
  }
  if (lp.graph && !lp.graph->contains(source)) {
    report_error(err, "config", "source " + source.str() + " does not occur in the input");
    return kExitConfig;
  }
  const double load_ms = detail::elapsed_ms(t_load);

  const auto t_run = std::chrono::steady_clock::now();
  MethodOutcome outcome;
  try {
    outcome = run_method(o.run, *lp.provider, source);
  } catch (const ProviderError& e) {
    report_error(err, "provider", e.what());
    return kExitProvider;
  }
  if (outcome.termination == Termination::kProviderError) {
    report_error(err, "provider", outcome.provenance["result"].value("error", "provider failure"));
    return kExitProvider;
  }
  const double run_ms = detail::elapsed_ms(t_run);

  nlohmann::json prov = outcome.provenance;
  prov["tool"] = {{"name", "flowtrace"}, {"version", kVersion}};
  prov["command"] = "trace";
  prov["options"] = to_json(o);
  prov["provider"] = lp.info;
  prov["scope"] = o.frontier ? "explored" : "result";
  if (o.timings) prov["timings_ms"] = {{"load", load_ms}, {"trace", run_ms}};

  const TransactionGraph& graph = o.frontier ? outcome.explored : outcome.output;
  const ExportDocument doc =
      make_document(graph, source, outcome.scores, outcome.residual, outcome.community, prov);

  auto write = [&](const std::string& path, auto&& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return false;
    body(os);
    os.flush();
    return static_cast<bool>(os);
  };
  const bool ok_out = write(o.out, [&](std::ostream& os) {
    if (o.format == ExportFormat::kGraphml) write_graphml(os, doc);
    else os << to_json(doc).dump(2) << '\n';
  });
  const bool ok_prov = ok_out && write(o.out + ".provenance.json", [&](std::ostream& os) {
    os << prov.dump(2) << '\n';
  });
  if (!ok_out || !ok_prov) {
    report_error(err, "output", "cannot write " + (ok_out ? o.out + ".provenance.json" : o.out));
    return kExitConfig;
  }
  if (!outcome.converged) {
    report_error(err, "not-converged",
                 "community extraction stopped before reaching phi; result written");
    return kExitNotConverged;
  }
  return kExitOk;
}

/// Reruns a trace from its provenance record. A non-empty `out` replaces the
/// recorded output path.
inline int cmd_replay(const std::filesystem::path& provenance, const std::string& out,
                      std::ostream& err) {
  TraceOptions o;
  try {
    std::ifstream in(provenance);
    if (!in) throw std::invalid_argument("cannot open " + provenance.string());
    o = trace_options_from_json(nlohmann::json::parse(in).at("options"));
  } catch (const std::exception& e) {
    report_error(err, "config", e.what());
    return kExitConfig;
  }
  if (!out.empty()) o.out = out;
  return cmd_trace(o, err);
}

struct CompareOptions {
  RunConfig run;                    // method is ignored; every method runs
  std::vector<std::string> inputs;  // spec files (object or array) or directories
  int generated = 0;                // additional seeded default cases
  std::uint64_t seed = 1;
  std::string out;                  // JSON report; empty: table only
  std::vector<std::size_t> topn = default_topn_grid();
};

namespace detail {

inline void append_specs(const nlohmann::json& j, std::vector<CaseSpec>& specs) {
  if (j.is_array()) {
    for (const auto& x : j) specs.push_back(x.get<CaseSpec>());
  } else {
    specs.push_back(j.get<CaseSpec>());
  }
}

inline std::vector<CaseSpec> resolve_specs(const CompareOptions& o) {
  std::vector<CaseSpec> specs;
  for (const auto& input : o.inputs) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(input)) {
      for (const auto& entry : std::filesystem::directory_iterator(input))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
    } else {
      files.emplace_back(input);
    }
    for (const auto& f : files) {
      std::ifstream in(f);
      if (!in) throw std::invalid_argument("cannot open case spec " + f.string());
      append_specs(nlohmann::json::parse(in), specs);
    }
  }
  auto suite = planted_suite(o.generated, o.seed);
  specs.insert(specs.end(), suite.begin(), suite.end());
  return specs;
}

inline void print_table(std::ostream& os, const std::vector<MethodSummary>& rows) {
  os << std::left << std::setw(10) << "method" << std::right << std::setw(8) << "cases"
     << std::setw(12) << "recall(%)" << std::setw(10) << "nodes" << std::setw(8) << "depth"
     << std::setw(14) << "runtime(ms)" << std::setw(12) << "top100(%)" << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(10) << to_string(r.method) << std::right << std::setw(8)
       << r.cases << std::fixed << std::setprecision(2) << std::setw(12) << 100 * r.recall
       << std::setprecision(1) << std::setw(10) << r.nodes << std::setprecision(2)
       << std::setw(8) << r.depth << std::setw(14) << r.runtime_ms;
    auto it = std::find_if(r.topn.begin(), r.topn.end(),
                           [](const auto& p) { return p.first == 100; });
    if (it != r.topn.end()) os << std::setw(12) << 100 * it->second;
    else os << std::setw(12) << "-";
    os << '\n';
    os.unsetf(std::ios::floatfield);
  }
}

}  // namespace detail

/// Runs all methods on every case. Failing cases are recorded and skipped.
inline int cmd_compare(const CompareOptions& o, std::ostream& table, std::ostream& err) {
  std::vector<CaseSpec> specs;
  try {
    RunConfig check = o.run;
    check.method = Method::kTtr;
    check.validate();
    if (o.generated < 0) throw std::invalid_argument("case count must be non-negative");
    specs = detail::resolve_specs(o);
    if (specs.empty()) throw std::invalid_argument("no cases given");
  } catch (const std::exception& e) {
    report_error(err, "config", e.what());
    return kExitConfig;
  }

  std::vector<CaseReport> reports;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& spec : specs) {
    try {
      reports.push_back(evaluate_case(generate_planted_case(spec), o.run, o.topn));
    } catch (const std::exception& e) {
      failures.push_back({{"name", spec.name}, {"error", e.what()}});
      report_error(err, "case", spec.name + ": " + e.what());
    }
  }
  const auto summary = aggregate(reports);
  detail::print_table(table, summary);

  if (!o.out.empty()) {
    nlohmann::json rep;
    rep["tool"] = {{"name", "flowtrace"}, {"version", kVersion}};
    rep["command"] = "compare";
    rep["config"] = o.run.to_json();
    rep["config"].erase("method");
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& c : reports) cases.push_back(to_json(c));
    rep["cases"] = cases;
    rep["failures"] = failures;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : summary) rows.push_back(to_json(s));
    rep["summary"] = rows;
    std::ofstream os(o.out);
    os << rep.dump(2) << '\n';
    if (!os) {
      report_error(err, "output", "cannot write " + o.out);
      return kExitConfig;
    }
  }
  return failures.empty() ? kExitOk : kExitPartial;
}

/// Writes <prefix>.csv (ingestible edges) and <prefix>.truth.json (spec,
/// source and targets).
inline int cmd_generate(const CaseSpec& spec, const std::string& prefix, std::ostream& err) {
  PlantedCase pc;
  try {
    pc = generate_planted_case(spec);
  } catch (const std::invalid_argument& e) {
    report_error(err, "config", e.what());
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    report_error(err, "generate", e.what());
    return kExitPartial;
  }
  std::ofstream csv(prefix + ".csv", std::ios::binary);
  write_csv(csv, pc.edges);
  std::vector<std::string> targets;
  for (const auto& t : pc.targets) targets.push_back(t.str());
  std::ofstream truth(prefix + ".truth.json");
  truth << nlohmann::json{{"spec", pc.spec},
                          {"source", pc.source.str()},
                          {"targets", targets},
                          {"edges", pc.edges.size()}}
               .dump(2)
        << '\n';
  if (!csv || !truth) {
    report_error(err, "output", "cannot write " + prefix + ".*");
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace flowtrace

#endif  // FLOWTRACE_COMMANDS_HPP
