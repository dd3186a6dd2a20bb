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

// flowtrace: trace fund flows from a source account, compare tracing methods
// on planted cases, and generate planted cases as CSV.
//
//   flowtrace trace --source 0xabc --provider transfers.csv --out trace.graphml
//   flowtrace --config run.toml trace --epsilon 1e-4   (keys under [trace])
//   flowtrace replay trace.graphml.provenance.json
//   flowtrace compare --cases 20 --report report.json
//   flowtrace generate --seed 7 --layers 5 --out case7

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flowtrace/commands.hpp"

namespace {

using flowtrace::Method;

void add_run_options(CLI::App* cmd, flowtrace::RunConfig& run) {
  cmd->add_option("--alpha", run.params.alpha, "teleport fraction converted to rank per push")
      ->capture_default_str();
  cmd->add_option("--beta", run.params.beta, "share of residual pushed along outgoing edges")
      ->capture_default_str();
  cmd->add_option("--epsilon", run.params.epsilon, "residual threshold for pushing")
      ->capture_default_str();
  cmd->add_option("--phi", run.params.phi, "conductance threshold of the community sweep")
      ->capture_default_str();
  cmd->add_option("--depth", run.depth, "hop limit for bfs and poison")->capture_default_str();
  cmd->add_option("--cutoff", run.cutoff, "smallest taint fraction haircut follows")
      ->capture_default_str();
  cmd->add_option("--budget", run.budget.max_provider_calls,
                  "maximum provider fetches (default 10/(epsilon*alpha))");
  cmd->add_option("--max-iterations", run.budget.max_iterations, "maximum push iterations");
  cmd->add_option("--max-edges-per-node", run.budget.max_edges_per_node,
                  "keep only the earliest N edges of high-degree accounts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Token-aware fund flow tracing over transaction graphs"};
  app.set_version_flag("--version", std::string(flowtrace::kVersion));
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file; keys go in a [trace] or [compare] section");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // trace
  flowtrace::TraceOptions trace;
  std::string method = "ttr";
  std::string format = "graphml";
  auto* cmd_trace = app.add_subcommand("trace", "trace funds from one source account");
  cmd_trace->add_option("--method", method, "ttr, appr, bfs, poison or haircut")
      ->check(CLI::IsMember({"ttr", "appr", "bfs", "poison", "haircut"}))
      ->capture_default_str();
  cmd_trace->add_option("--source", trace.source, "source account")->required();
  cmd_trace->add_option("--provider", trace.provider,
                        "CSV/JSON-lines file, or Etherscan-compatible API base URL")
      ->required();
  cmd_trace->add_option("--out", trace.out, "result graph path")->required();
  cmd_trace->add_option("--format", format, "graphml or json")
      ->check(CLI::IsMember({"graphml", "json"}))
      ->capture_default_str();
  cmd_trace->add_option("--chain-symbol", trace.chain_symbol, "symbol of the native currency")
      ->capture_default_str();
  cmd_trace->add_option("--cache-dir", trace.cache_dir, "response cache of the HTTP provider");
  cmd_trace->add_flag("--frontier", trace.frontier,
                      "export everything fetched instead of the result graph");
  cmd_trace->add_flag("--timings", trace.timings,
                      "record wall-clock timings in the provenance (breaks byte equality)");
  add_run_options(cmd_trace, trace.run);

  // replay
  std::string replay_from;
  std::string replay_out;
  auto* cmd_replay = app.add_subcommand("replay", "rerun a trace from its provenance record");
  cmd_replay->add_option("provenance", replay_from, "<out>.provenance.json of an earlier trace")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_replay->add_option("--out", replay_out, "write to this path instead of the recorded one");

  // compare
  flowtrace::CompareOptions compare;
  auto* cmd_compare = app.add_subcommand("compare", "run every method on planted cases");
  cmd_compare->add_option("specs", compare.inputs, "case spec JSON files or directories");
  cmd_compare->add_option("--cases", compare.generated, "number of seeded default cases")
      ->check(CLI::NonNegativeNumber);
  cmd_compare->add_option("--seed", compare.seed, "seed of the first generated case")
      ->capture_default_str();
  cmd_compare->add_option("--report", compare.out, "JSON report path");
  add_run_options(cmd_compare, compare.run);

  // generate
  flowtrace::CaseSpec spec;
  std::string prefix;
  auto* cmd_generate = app.add_subcommand("generate", "write a planted case as CSV + truth JSON");
  cmd_generate->add_option("--out", prefix, "output prefix")->required();
  cmd_generate->add_option("--name", spec.name)->capture_default_str();
  cmd_generate->add_option("--seed", spec.seed)->capture_default_str();
  cmd_generate->add_option("--layers", spec.layers, "hops from source to targets")
      ->capture_default_str();
  cmd_generate->add_option("--fan-out", spec.fan_out)->capture_default_str();
  cmd_generate->add_option("--max-width", spec.max_width)->capture_default_str();
  cmd_generate->add_option("--peel-length", spec.peel_length)->capture_default_str();
  cmd_generate->add_option("--swap-probability", spec.swap_probability)->capture_default_str();
  cmd_generate->add_option("--noise-rate", spec.noise_rate)->capture_default_str();
  cmd_generate->add_option("--hubs", spec.hub_count)->capture_default_str();
  cmd_generate->add_option("--hub-degree", spec.hub_degree)->capture_default_str();
  cmd_generate->add_option("--background", spec.background_accounts)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    flowtrace::report_error(std::cerr, "config", e.what());
    return flowtrace::kExitConfig;
  }

  if (*cmd_trace) {
    trace.run.method = flowtrace::parse_method(method);
    trace.format = flowtrace::parse_export_format(format);
    return flowtrace::cmd_trace(trace, std::cerr);
  }
  if (*cmd_replay) return flowtrace::cmd_replay(replay_from, replay_out, std::cerr);
  if (*cmd_compare) return flowtrace::cmd_compare(compare, std::cout, std::cerr);
  return flowtrace::cmd_generate(spec, prefix, std::cerr);
}
