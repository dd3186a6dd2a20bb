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

#ifndef FLOWTRACE_TYPES_HPP
#define FLOWTRACE_TYPES_HPP

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace flowtrace {

/// Unix seconds. kNegInfinity marks the seed residual key.
using Timestamp = std::int64_t;
inline constexpr Timestamp kNegInfinity = std::numeric_limits<Timestamp>::min();

/// Stable identity of a transfer edge across providers and merges.
using EdgeId = std::uint64_t;

/// Token symbol that matches every token. Never a valid ingested symbol.
inline constexpr std::string_view kAnyToken = "*";

/// Account identifier. Ingested strings are lower-cased so that checksum
/// casing of hex addresses never splits one account into two nodes.
class AccountId {
 public:
  AccountId() = default;
  explicit AccountId(std::string_view raw) : value_(normalize(raw)) {
    if (value_.empty()) throw std::invalid_argument("empty account id");
  }

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const AccountId&, const AccountId&) = default;
  friend bool operator==(const AccountId&, const AccountId&) = default;

  static std::string normalize(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    std::string out(raw.substr(b, e - b));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  }

 private:
  std::string value_;
};

/// 64-bit FNV-1a. Used for edge ids that must be stable across runs.
inline std::uint64_t fnv1a(std::string_view data,
                           std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IngestError : public std::runtime_error {
 public:
  IngestError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace flowtrace

template <>
struct std::hash<flowtrace::AccountId> {
  std::size_t operator()(const flowtrace::AccountId& a) const noexcept {
    return std::hash<std::string>{}(a.str());
  }
};

#endif  // FLOWTRACE_TYPES_HPP
