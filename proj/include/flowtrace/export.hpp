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

// Result export for audit and visualization tools: GraphML and a lossless
// JSON document. Both embed the provenance record of the run.

#ifndef FLOWTRACE_EXPORT_HPP
#define FLOWTRACE_EXPORT_HPP

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowtrace/txgraph.hpp"

namespace flowtrace {

struct ExportNode {
  AccountId id;
  double rank = 0;
  double residual = 0;
  bool is_source = false;
  bool in_community = false;

  friend bool operator==(const ExportNode&, const ExportNode&) = default;
};

struct ExportDocument {
  AccountId source;
  std::vector<ExportNode> nodes;   // sorted by id
  std::vector<TransferEdge> edges;  // adjacency order
  nlohmann::json provenance = nlohmann::json::object();

  friend bool operator==(const ExportDocument&, const ExportDocument&) = default;
};

/// Collects a result graph and its scores into an export document.
inline ExportDocument make_document(const TransactionGraph& graph, const AccountId& source,
                                    const std::map<AccountId, double>& rank,
                                    const std::map<AccountId, double>& residual,
                                    const std::set<AccountId>& community,
                                    nlohmann::json provenance = nlohmann::json::object()) {
  ExportDocument doc;
  doc.source = source;
  doc.provenance = std::move(provenance);
  for (const auto& n : graph.nodes()) {
    ExportNode en;
    en.id = n;
    if (auto it = rank.find(n); it != rank.end()) en.rank = it->second;
    if (auto it = residual.find(n); it != residual.end()) en.residual = it->second;
    en.is_source = n == source;
    en.in_community = community.contains(n);
    doc.nodes.push_back(en);
  }
  for (const auto& e : graph.edges()) doc.edges.push_back(e);
  std::sort(doc.edges.begin(), doc.edges.end(), edge_order);
  return doc;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// GraphML 1.0 with typed keys. Node ids are n<i> in account order; the
/// account itself is the `label` attribute. Booleans are written as 1/0,
/// the xs:boolean form the Boost GraphML reader also accepts.
inline void write_graphml(std::ostream& os, const ExportDocument& doc) {
  using detail::format_double;
  using detail::xml_escape;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n"
        "    xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
        "    xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
        "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
  struct Key {
    const char* id;
    const char* domain;
    const char* name;
    const char* type;
  };
  static constexpr Key kKeys[] = {
      {"g_provenance", "graph", "provenance", "string"},
      {"v_label", "node", "label", "string"},
      {"v_rank", "node", "rank", "double"},
      {"v_residual", "node", "residual", "double"},
      {"v_source", "node", "is_source", "boolean"},
      {"v_community", "node", "in_community", "boolean"},
      {"e_amount", "edge", "amount", "double"},
      {"e_timestamp", "edge", "timestamp", "long"},
      {"e_token", "edge", "token", "string"},
      {"e_hash", "edge", "hash", "string"},
      {"e_pattern", "edge", "pattern", "string"},
  };
  for (const auto& k : kKeys)
    os << "  <key id=\"" << k.id << "\" for=\"" << k.domain << "\" attr.name=\"" << k.name
       << "\" attr.type=\"" << k.type << "\"/>\n";
  os << "  <graph id=\"trace\" edgedefault=\"directed\">\n";
  os << "    <data key=\"g_provenance\">" << xml_escape(doc.provenance.dump()) << "</data>\n";
  std::map<AccountId, std::string> xml_id;
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
    const ExportNode& n = doc.nodes[i];
    const std::string id = "n" + std::to_string(i);
    xml_id[n.id] = id;
    os << "    <node id=\"" << id << "\">\n"
       << "      <data key=\"v_label\">" << xml_escape(n.id.str()) << "</data>\n"
       << "      <data key=\"v_rank\">" << format_double(n.rank) << "</data>\n"
       << "      <data key=\"v_residual\">" << format_double(n.residual) << "</data>\n"
       << "      <data key=\"v_source\">" << (n.is_source ? 1 : 0) << "</data>\n"
       << "      <data key=\"v_community\">" << (n.in_community ? 1 : 0) << "</data>\n"
       << "    </node>\n";
  }
  for (std::size_t i = 0; i < doc.edges.size(); ++i) {
    const TransferEdge& e = doc.edges[i];
    os << "    <edge id=\"e" << i << "\" source=\"" << xml_id.at(e.src) << "\" target=\""
       << xml_id.at(e.tgt) << "\">\n"
       << "      <data key=\"e_amount\">" << format_double(e.amount) << "</data>\n"
       << "      <data key=\"e_timestamp\">" << e.timestamp << "</data>\n"
       << "      <data key=\"e_token\">" << xml_escape(e.token) << "</data>\n"
       << "      <data key=\"e_hash\">" << xml_escape(e.hash) << "</data>\n"
       << "      <data key=\"e_pattern\">" << to_string(e.pattern()) << "</data>\n"
       << "    </edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
}

namespace detail {

inline nlohmann::json tag_to_json(const PatternTag& t) {
  return {{"kind", std::string(to_string(t.kind))}, {"counter_tokens", t.counter_tokens}};
}

inline PatternTag tag_from_json(const nlohmann::json& j) {
  PatternTag t;
  t.kind = j.at("kind").get<std::string>() == "swap" ? Pattern::kSwap : Pattern::kXfer;
  t.counter_tokens = j.at("counter_tokens").get<std::vector<std::string>>();
  return t;
}

}  // namespace detail

inline nlohmann::json to_json(const ExportDocument& doc) {
  nlohmann::json j;
  j["format"] = "flowtrace-graph";
  j["version"] = 1;
  j["source"] = doc.source.str();
  j["provenance"] = doc.provenance;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& n : doc.nodes)
    nodes.push_back({{"id", n.id.str()},
                     {"rank", n.rank},
                     {"residual", n.residual},
                     {"is_source", n.is_source},
                     {"in_community", n.in_community}});
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const auto& e : doc.edges)
    edges.push_back({{"id", e.id},
                     {"from", e.src.str()},
                     {"to", e.tgt.str()},
                     {"amount", e.amount},
                     {"timestamp", e.timestamp},
                     {"token", e.token},
                     {"hash", e.hash},
                     {"pattern", std::string(to_string(e.pattern()))},
                     {"at_src", detail::tag_to_json(e.at_src)},
                     {"at_tgt", detail::tag_to_json(e.at_tgt)}});
  return j;
}

/// Inverse of to_json. Throws nlohmann::json::exception on malformed input.
inline ExportDocument document_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "flowtrace-graph")
    throw std::invalid_argument("not a flowtrace graph document");
  ExportDocument doc;
  doc.source = AccountId(j.at("source").get<std::string>());
  doc.provenance = j.value("provenance", nlohmann::json::object());
  for (const auto& n : j.at("nodes")) {
    ExportNode en;
    en.id = AccountId(n.at("id").get<std::string>());
    en.rank = n.at("rank").get<double>();
    en.residual = n.at("residual").get<double>();
    en.is_source = n.at("is_source").get<bool>();
    en.in_community = n.at("in_community").get<bool>();
    doc.nodes.push_back(std::move(en));
  }
  for (const auto& x : j.at("edges")) {
    TransferEdge e;
    e.id = x.at("id").get<EdgeId>();
    e.src = AccountId(x.at("from").get<std::string>());
    e.tgt = AccountId(x.at("to").get<std::string>());
    e.amount = x.at("amount").get<double>();
    e.timestamp = x.at("timestamp").get<Timestamp>();
    e.token = x.at("token").get<std::string>();
    e.hash = x.at("hash").get<std::string>();
    e.at_src = detail::tag_from_json(x.at("at_src"));
    e.at_tgt = detail::tag_from_json(x.at("at_tgt"));
    doc.edges.push_back(std::move(e));
  }
  return doc;
}

/// Rebuilds the graph of an imported document with tags as exported.
inline TransactionGraph document_graph(const ExportDocument& doc) {
  TransactionGraph g;
  for (const auto& n : doc.nodes) g.add_node(n.id);
  g.add_edges(doc.edges);
  return g;
}

}  // namespace flowtrace

#endif  // FLOWTRACE_EXPORT_HPP
