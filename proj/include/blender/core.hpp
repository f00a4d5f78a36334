// Copyright 2026 The Blender Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BLENDER_CORE_HPP_
#define BLENDER_CORE_HPP_

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace blender {

// The wildcard is a single NUL byte. Parsers reject NUL in input, so it can
// never collide with a real query or URL. External formats spell it "*".
inline constexpr std::string_view kWildcard{"\0", 1};
inline constexpr std::string_view kWildcardText = "*";

inline bool IsWildcard(std::string_view s) { return s == kWildcard; }

// The system absl is built with its own string_view type.
inline absl::string_view AbslView(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}

inline std::string_view TrimWhitespace(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const size_t begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  const size_t end = s.find_last_not_of(kSpace);
  return s.substr(begin, end - begin + 1);
}

// Text encoding used by every external format: the wildcard becomes "*", a
// literal "*" becomes "\*", and a leading backslash is doubled.
inline std::string EncodeField(std::string_view s) {
  if (IsWildcard(s)) return std::string(kWildcardText);
  if (s == kWildcardText || (!s.empty() && s.front() == '\\')) {
    return absl::StrCat("\\", AbslView(s));
  }
  return std::string(s);
}

inline std::string DecodeField(std::string_view s) {
  if (s == kWildcardText) return std::string(kWildcard);
  if (!s.empty() && s.front() == '\\') return std::string(s.substr(1));
  return std::string(s);
}

/// A (query, URL) pair, the unit of user data.
struct Record {
  std::string query;
  std::string url;

  static Record Star() {
    return Record{std::string(kWildcard), std::string(kWildcard)};
  }
  bool IsStar() const { return IsWildcard(query) && IsWildcard(url); }

  friend bool operator==(const Record&, const Record&) = default;
  friend std::strong_ordering operator<=>(const Record&,
                                          const Record&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Record& r) {
  return os << "<" << EncodeField(r.query) << "," << EncodeField(r.url)
            << ">";
}

struct RecordHash {
  size_t operator()(const Record& r) const {
    const size_t h1 = std::hash<std::string>{}(r.query);
    const size_t h2 = std::hash<std::string>{}(r.url);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

enum class HeadListStage { kInitial, kFinal, kClientAugmented };

inline std::string_view StageName(HeadListStage stage) {
  switch (stage) {
    case HeadListStage::kInitial:
      return "initial";
    case HeadListStage::kFinal:
      return "final";
    case HeadListStage::kClientAugmented:
      return "client-augmented";
  }
  return "unknown";
}

/// Ordered map from query to its ordered URL list.
///
/// Queries and URLs keep insertion order; no duplicates are stored. The
/// stage tag records which step of the pipeline produced the list and
/// selects the canonicalization rule.
class HeadList {
 public:
  struct Entry {
    std::string query;
    std::vector<std::string> urls;
  };

  explicit HeadList(HeadListStage stage) : stage_(stage) {}

  HeadListStage stage() const { return stage_; }

  // Returns false when the record was already present.
  bool Add(const Record& record) {
    auto [it, inserted] =
        query_index_.try_emplace(record.query, entries_.size());
    if (inserted) {
      entries_.push_back(Entry{record.query, {}});
      url_index_.emplace_back();
    }
    const size_t qi = it->second;
    auto [uit, url_inserted] =
        url_index_[qi].try_emplace(record.url, entries_[qi].urls.size());
    if (!url_inserted) return false;
    entries_[qi].urls.push_back(record.url);
    ++num_records_;
    return true;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  size_t num_queries() const { return entries_.size(); }
  size_t num_records() const { return num_records_; }

  // Number of queries other than the wildcard query.
  size_t num_real_queries() const {
    return HasQuery(kWildcard) ? entries_.size() - 1 : entries_.size();
  }

  std::optional<size_t> QueryIndex(std::string_view query) const {
    auto it = query_index_.find(std::string(query));
    if (it == query_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<size_t> UrlIndex(size_t query_index,
                                 std::string_view url) const {
    const auto& index = url_index_[query_index];
    auto it = index.find(std::string(url));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  bool HasQuery(std::string_view query) const {
    return QueryIndex(query).has_value();
  }

  bool Contains(const Record& record) const {
    const auto qi = QueryIndex(record.query);
    return qi.has_value() && UrlIndex(*qi, record.url).has_value();
  }

  // All records, in query-major insertion order.
  std::vector<Record> Records() const {
    std::vector<Record> out;
    out.reserve(num_records_);
    for (const auto& e : entries_) {
      for (const auto& u : e.urls) out.push_back(Record{e.query, u});
    }
    return out;
  }

 private:
  HeadListStage stage_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, size_t> query_index_;
  std::vector<std::unordered_map<std::string, size_t>> url_index_;
  size_t num_records_ = 0;
};

/// Appends the wildcard query, and a wildcard URL to every query, producing
/// the list the local randomizer reports over.
inline HeadList AugmentForClients(const HeadList& final_list) {
  HeadList out(HeadListStage::kClientAugmented);
  for (const auto& e : final_list.entries()) {
    for (const auto& u : e.urls) out.Add(Record{e.query, u});
  }
  if (!out.HasQuery(kWildcard)) out.Add(Record::Star());
  for (const auto& e : final_list.entries()) {
    out.Add(Record{e.query, std::string(kWildcard)});
  }
  return out;
}

/// Maps a record onto the head list. Initial/Final lists collapse any
/// unlisted record to <*,*>; the client-augmented list stars the query and
/// the URL independently.
inline Record Canonicalize(const Record& record, const HeadList& hl) {
  if (hl.stage() != HeadListStage::kClientAugmented) {
    return hl.Contains(record) ? record : Record::Star();
  }
  Record out = record;
  auto qi = hl.QueryIndex(out.query);
  if (!qi.has_value()) {
    out.query = std::string(kWildcard);
    qi = hl.QueryIndex(out.query);
  }
  if (!qi.has_value()) return Record::Star();
  if (!hl.UrlIndex(*qi, out.url).has_value()) {
    out.url = std::string(kWildcard);
  }
  return out;
}

inline void WriteHeadList(const HeadList& hl, std::ostream& os) {
  for (const auto& e : hl.entries()) {
    for (const auto& u : e.urls) {
      os << EncodeField(e.query) << '\t' << EncodeField(u) << '\n';
    }
  }
}

inline absl::StatusOr<HeadList> ReadHeadList(std::istream& is,
                                             HeadListStage stage) {
  HeadList hl(stage);
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (TrimWhitespace(line).empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != line.npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "head list line ", line_no, ": expected query<TAB>url"));
    }
    const auto q = TrimWhitespace(std::string_view(line).substr(0, tab));
    const auto u = TrimWhitespace(std::string_view(line).substr(tab + 1));
    if (q.empty() || u.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("head list line ", line_no, ": empty field"));
    }
    if (!hl.Add(Record{DecodeField(q), DecodeField(u)})) {
      return absl::InvalidArgumentError(
          absl::StrCat("head list line ", line_no, ": duplicate record"));
    }
  }
  return hl;
}

/// Per-stage budgets of the local randomizer.
struct ClientBudgets {
  double epsilon_query = 0;
  double epsilon_url = 0;
  double delta_query = 0;
  double delta_url = 0;
};

/// Privacy and sizing parameters of one pipeline run.
struct PrivacyParams {
  double epsilon = 4.0;
  double delta = 1e-5;
  int m_optin = 1;
  int m_client = 1;
  double f_client = 0.85;
  double f_optin = 0.95;
  int max_queries = 50;  // M
  double optin_fraction = 0.05;

  double epsilon_per_record() const { return epsilon / m_client; }
  double delta_per_record() const { return delta / m_client; }

  ClientBudgets client_budgets() const {
    ClientBudgets b;
    b.epsilon_query = f_client * epsilon_per_record();
    b.epsilon_url = epsilon_per_record() - b.epsilon_query;
    b.delta_query = f_client * delta_per_record();
    b.delta_url = delta_per_record() - b.delta_query;
    return b;
  }

  absl::Status Validate() const {
    if (!(epsilon > 0) || !std::isfinite(epsilon)) {
      return absl::InvalidArgumentError("epsilon must be finite and positive");
    }
    if (!(delta > 0 && delta < 1)) {
      return absl::InvalidArgumentError("delta must lie in (0, 1)");
    }
    if (m_optin != 1 || m_client != 1) {
      return absl::InvalidArgumentError(
          "only m_O = m_C = 1 is supported (variance and privacy analysis "
          "assume one record per user)");
    }
    if (!(f_client > 0 && f_client < 1)) {
      return absl::InvalidArgumentError("f_C must lie in (0, 1)");
    }
    if (!(f_optin > 0 && f_optin < 1)) {
      return absl::InvalidArgumentError("f_O must lie in (0, 1)");
    }
    if (!(optin_fraction > 0 && optin_fraction < 1)) {
      return absl::InvalidArgumentError("optin_fraction must lie in (0, 1)");
    }
    if (max_queries < 1) {
      return absl::InvalidArgumentError("M must be at least 1");
    }
    return absl::OkStatus();
  }
};

struct Estimate {
  double p = 0;
  double var = 0;
};

/// Probability and variance estimates keyed by head-list records and by
/// queries, in head-list order.
class EstimateVector {
 public:
  EstimateVector() = default;
  explicit EstimateVector(int64_t sample_size) : sample_size_(sample_size) {}

  void SetRecord(const Record& r, Estimate e) {
    auto [it, inserted] = record_index_.try_emplace(r, records_.size());
    if (inserted) {
      records_.emplace_back(r, e);
    } else {
      records_[it->second].second = e;
    }
  }

  void SetQuery(const std::string& q, Estimate e) {
    auto [it, inserted] = query_index_.try_emplace(q, queries_.size());
    if (inserted) {
      queries_.emplace_back(q, e);
    } else {
      queries_[it->second].second = e;
    }
  }

  std::optional<Estimate> record(const Record& r) const {
    auto it = record_index_.find(r);
    if (it == record_index_.end()) return std::nullopt;
    return records_[it->second].second;
  }

  std::optional<Estimate> query(const std::string& q) const {
    auto it = query_index_.find(q);
    if (it == query_index_.end()) return std::nullopt;
    return queries_[it->second].second;
  }

  const std::vector<std::pair<Record, Estimate>>& records() const {
    return records_;
  }
  const std::vector<std::pair<std::string, Estimate>>& queries() const {
    return queries_;
  }
  int64_t sample_size() const { return sample_size_; }

 private:
  std::vector<std::pair<Record, Estimate>> records_;
  std::vector<std::pair<std::string, Estimate>> queries_;
  std::unordered_map<Record, size_t, RecordHash> record_index_;
  std::unordered_map<std::string, size_t> query_index_;
  int64_t sample_size_ = 0;
};

/// A sampled record still attached to the user it came from.
struct UserRecord {
  std::string user_id;
  Record record;
};

// Group tags. Each pipeline stage accepts only the group it is entitled
// to see, so curator code cannot be handed client data and vice versa.
struct HeadListGroupTag {};
struct EstimationGroupTag {};
struct ClientGroupTag {};

template <class Tag>
struct GroupRecords {
  std::vector<UserRecord> rows;

  size_t size() const { return rows.size(); }
};

using HeadListGroup = GroupRecords<HeadListGroupTag>;    // S
using EstimationGroup = GroupRecords<EstimationGroupTag>;  // T
using ClientGroup = GroupRecords<ClientGroupTag>;        // C

}  // namespace blender

#endif  // BLENDER_CORE_HPP_
