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

// Record ingestion: Etherscan-export CSV and JSON-lines with the columns
// from,to,value,timeStamp,tokenSymbol,hash.

#ifndef FLOWTRACE_INGEST_HPP
#define FLOWTRACE_INGEST_HPP

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowtrace/txgraph.hpp"
#include "flowtrace/types.hpp"

namespace flowtrace {

/// One unparsed transfer as it appears in an export row.
struct RawRecord {
  std::string from;
  std::string to;
  std::string value;
  std::string timestamp;
  std::string token;  // empty: native currency
  std::string hash;
  std::size_t line = 0;
};

struct IngestOptions {
  std::string chain_symbol = "ETH";
  bool strict = false;
};

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::vector<TransferEdge> edges;
  std::vector<RecordError> errors;
  std::size_t records = 0;
};

namespace detail {

inline std::optional<double> parse_amount(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  Timestamp v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// RFC 4180 field splitting; quoted fields may contain commas and "" escapes.
// Embedded newlines are not supported (exports never contain them).
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace detail

/// Stable edge id: content of the record plus the occurrence index among
/// identical records, so duplicates stay distinct edges.
inline EdgeId edge_identity(const TransferEdge& e, std::size_t occurrence) {
  std::string key = e.src.str() + '|' + e.tgt.str() + '|' + e.token + '|' + e.hash + '|' +
                    std::to_string(e.timestamp) + '|';
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, e.amount);
  key.append(buf, res.ptr);
  key += '#' + std::to_string(occurrence);
  return fnv1a(key);
}

/// Assigns ids in record order; identical records get increasing occurrence
/// indices.
inline void assign_edge_ids(std::vector<TransferEdge>& edges) {
  std::map<EdgeId, std::size_t> seen;
  for (auto& e : edges) {
    EdgeId base = edge_identity(e, 0);
    std::size_t occ = seen[base]++;
    e.id = occ == 0 ? base : edge_identity(e, occ);
  }
}

/// Validates and converts records. Bad records are reported with their line
/// number and skipped; in strict mode the first one throws IngestError.
inline IngestReport convert_records(const std::vector<RawRecord>& records,
                                    const IngestOptions& opts = {}) {
  IngestReport report;
  report.records = records.size();
  for (const auto& r : records) {
    auto fail = [&](const std::string& msg) {
      if (opts.strict) throw IngestError(r.line, msg);
      report.errors.push_back({r.line, msg});
    };
    std::string from = AccountId::normalize(r.from);
    std::string to = AccountId::normalize(r.to);
    if (from.empty() || to.empty()) {
      fail("missing from/to account");
      continue;
    }
    auto amount = detail::parse_amount(r.value);
    if (!amount) {
      fail("unparseable value '" + r.value + "'");
      continue;
    }
    if (*amount < 0) {
      fail("negative value '" + r.value + "'");
      continue;
    }
    auto ts = detail::parse_timestamp(r.timestamp);
    if (!ts || *ts < 0) {
      fail("bad timeStamp '" + r.timestamp + "'");
      continue;
    }
    if (r.hash.empty()) {
      fail("missing hash");
      continue;
    }
    std::string token = r.token.empty() ? opts.chain_symbol : r.token;
    if (token == kAnyToken) {
      fail("reserved token symbol '*'");
      continue;
    }
    TransferEdge e;
    e.src = AccountId(from);
    e.tgt = AccountId(to);
    e.amount = *amount;
    e.timestamp = *ts;
    e.token = std::move(token);
    e.hash = AccountId::normalize(r.hash);
    report.edges.push_back(std::move(e));
  }
  assign_edge_ids(report.edges);
  return report;
}

/// Reads CSV with a header row. Column order is free; unknown columns are
/// ignored; tokenSymbol is optional.
inline std::vector<RawRecord> read_csv_records(std::istream& in, std::vector<RecordError>* errors,
                                               bool strict = false) {
  std::vector<RawRecord> out;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> col;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (col.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
      for (const char* required : {"from", "to", "value", "timeStamp", "hash"})
        if (!col.contains(required))
          throw IngestError(lineno, std::string("CSV header lacks column '") + required + "'");
      continue;
    }
    auto get = [&](const char* name) -> std::optional<std::string> {
      auto it = col.find(name);
      if (it == col.end()) return std::string{};
      if (it->second >= fields.size()) return std::nullopt;
      return fields[it->second];
    };
    RawRecord r;
    r.line = lineno;
    auto from = get("from"), to = get("to"), value = get("value"), ts = get("timeStamp"),
         token = get("tokenSymbol"), hash = get("hash");
    if (!from || !to || !value || !ts || !token || !hash) {
      if (strict) throw IngestError(lineno, "too few columns");
      if (errors) errors->push_back({lineno, "too few columns"});
      continue;
    }
    r.from = *from;
    r.to = *to;
    r.value = *value;
    r.timestamp = *ts;
    r.token = *token;
    r.hash = *hash;
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {
inline std::string json_field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  return it->dump();  // numbers are accepted as-is
}
}  // namespace detail

/// Converts one Etherscan-style JSON object to a record.
inline RawRecord record_from_json(const nlohmann::json& j, std::size_t line) {
  RawRecord r;
  r.line = line;
  r.from = detail::json_field(j, "from");
  r.to = detail::json_field(j, "to");
  r.value = detail::json_field(j, "value");
  r.timestamp = detail::json_field(j, "timeStamp");
  r.token = detail::json_field(j, "tokenSymbol");
  r.hash = detail::json_field(j, "hash");
  return r;
}

inline std::vector<RawRecord> read_jsonl_records(std::istream& in,
                                                 std::vector<RecordError>* errors,
                                                 bool strict = false) {
  std::vector<RawRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      if (strict) throw IngestError(lineno, "malformed JSON object");
      if (errors) errors->push_back({lineno, "malformed JSON object"});
      continue;
    }
    out.push_back(record_from_json(j, lineno));
  }
  return out;
}

enum class InputFormat { kCsv, kJsonLines };

/// Parses a stream into edges, collecting record-level errors.
inline IngestReport ingest_stream(std::istream& in, InputFormat fmt, const IngestOptions& opts = {}) {
  std::vector<RecordError> parse_errors;
  auto records = fmt == InputFormat::kCsv ? read_csv_records(in, &parse_errors, opts.strict)
                                          : read_jsonl_records(in, &parse_errors, opts.strict);
  IngestReport report = convert_records(records, opts);
  report.records += parse_errors.size();
  report.errors.insert(report.errors.begin(), parse_errors.begin(), parse_errors.end());
  std::stable_sort(report.errors.begin(), report.errors.end(),
                   [](const RecordError& a, const RecordError& b) { return a.line < b.line; });
  return report;
}

/// Builds a classified graph from records.
inline TransactionGraph ingest_edges(const std::vector<RawRecord>& records,
                                     const IngestOptions& opts = {},
                                     IngestReport* report_out = nullptr) {
  IngestReport report = convert_records(records, opts);
  TransactionGraph g(report.edges);
  if (report_out) *report_out = std::move(report);
  return g;
}

/// Writes edges in the CSV layout read_csv_records accepts. Amounts use the
/// shortest round-trip representation, so re-ingesting yields equal edges.
inline void write_csv(std::ostream& os, const std::vector<TransferEdge>& edges) {
  os << "hash,timeStamp,from,to,value,tokenSymbol\n";
  char buf[64];
  for (const auto& e : edges) {
    auto res = std::to_chars(buf, buf + sizeof buf, e.amount);
    os << e.hash << ',' << e.timestamp << ',' << e.src.str() << ',' << e.tgt.str() << ','
       << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ',' << e.token
       << '\n';
  }
}

}  // namespace flowtrace

#endif  // FLOWTRACE_INGEST_HPP
