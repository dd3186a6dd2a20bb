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

// Traces a CSV export with the library API and prints the ranked community.
//
//   sample_trace_file samples/data/swap_redirect.csv source

#include <fstream>
#include <iomanip>
#include <iostream>

#include "flowtrace/flowtrace.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: " << argv[0] << " <transfers.csv> <source>\n";
    return 2;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot open " << argv[1] << "\n";
    return 2;
  }
  flowtrace::IngestReport rep = flowtrace::ingest_stream(in, flowtrace::InputFormat::kCsv);
  for (const auto& e : rep.errors) std::cerr << "line " << e.line << ": " << e.message << "\n";

  const flowtrace::AccountId source(argv[2]);
  flowtrace::GraphProvider provider{flowtrace::TransactionGraph(rep.edges)};
  flowtrace::TraceParams params;  // defaults: alpha 0.15, beta 0.7, epsilon 1e-3
  flowtrace::TraceResult trace = flowtrace::run_expansion(source, provider, params);
  flowtrace::Community community =
      flowtrace::extract_community(trace.subgraph, trace.rank, source, params.phi);

  std::cout << "pushes: " << trace.iterations << ", termination: "
            << flowtrace::to_string(trace.termination) << ", dropped mass: " << trace.dropped_mass
            << "\n";
  std::cout << "community of " << community.members.size() << " accounts, conductance "
            << community.conductance << (community.converged ? "" : " (not converged)") << "\n";
  for (const auto& member : community.members)
    std::cout << "  " << std::left << std::setw(12) << member.str() << std::fixed
              << std::setprecision(6) << trace.rank.get(member) << "\n";
  for (const auto& e : community.subgraph.edges())
    std::cout << "  " << e.src.str() << " -> " << e.tgt.str() << "  " << e.amount << " "
              << e.token << " @" << e.timestamp << "  " << flowtrace::to_string(e.pattern())
              << "\n";
  return 0;
}
