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

#ifndef BLENDER_DATA_HPP_
#define BLENDER_DATA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "blender/core.hpp"
#include "blender/csv.hpp"
#include "blender/sampling.hpp"

namespace blender {

struct UserLog {
  std::string user_id;
  std::vector<Record> records;
};

struct Dataset {
  std::vector<UserLog> users;
  // Known only for synthetic data.
  std::optional<std::map<Record, double>> true_distribution;

  size_t num_records() const {
    size_t n = 0;
    for (const auto& u : users) n += u.records.size();
    return n;
  }
};

struct ParseOptions {
  // Skip malformed lines instead of failing on the first one.
  bool skip_malformed = false;
};

struct ParseStats {
  size_t lines = 0;
  size_t skipped = 0;
};

/// Parses a `user_id<TAB>query<TAB>url` log, grouping rows by user in
/// first-seen order. Fields are trimmed; `#` lines and blank lines are
/// ignored.
inline absl::StatusOr<Dataset> ParseLog(std::istream& is,
                                        const ParseOptions& options = {},
                                        ParseStats* stats = nullptr) {
  Dataset ds;
  std::unordered_map<std::string, size_t> user_index;
  std::string line;
  size_t line_no = 0;
  size_t skipped = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;

    std::string error;
    std::string_view fields[3];
    size_t count = 0;
    size_t start = 0;
    for (;;) {
      const size_t tab = line.find('\t', start);
      if (count < 3) {
        fields[count] = std::string_view(line).substr(
            start, tab == std::string::npos ? std::string::npos : tab - start);
      }
      ++count;
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (count != 3) {
      error = absl::StrCat("expected 3 tab-separated fields, got ", count);
    } else if (line.find('\0') != std::string::npos) {
      error = "NUL byte in input";
    } else {
      for (auto& f : fields) f = TrimWhitespace(f);
      if (fields[0].empty()) error = "empty user id";
      if (fields[1].empty()) error = "empty query";
      if (fields[2].empty()) error = "empty url";
    }
    if (!error.empty()) {
      if (options.skip_malformed) {
        ++skipped;
        continue;
      }
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", error));
    }
    auto [it, inserted] =
        user_index.try_emplace(std::string(fields[0]), ds.users.size());
    if (inserted) ds.users.push_back(UserLog{std::string(fields[0]), {}});
    ds.users[it->second].records.push_back(
        Record{std::string(fields[1]), std::string(fields[2])});
  }
  if (stats != nullptr) {
    stats->lines = line_no;
    stats->skipped = skipped;
  }
  return ds;
}

inline void SerializeLog(const Dataset& ds, std::ostream& os) {
  for (const auto& u : ds.users) {
    for (const auto& r : u.records) {
      os << u.user_id << '\t' << r.query << '\t' << r.url << '\n';
    }
  }
}

/// Truth file: CSV `query,url,p`.
inline void WriteTruth(const std::map<Record, double>& truth,
                       std::ostream& os) {
  os << "query,url,p\n";
  for (const auto& [r, p] : truth) {
    os << CsvRow({EncodeField(r.query), EncodeField(r.url),
                  absl::StrFormat("%.17g", p)});
  }
}

inline absl::StatusOr<std::map<Record, double>> ReadTruth(std::istream& is) {
  auto table = ReadCsv(is);
  if (!table.ok()) return table.status();
  auto q = table->Column("query");
  auto u = table->Column("url");
  auto p = table->Column("p");
  if (!q.ok() || !u.ok() || !p.ok()) {
    return absl::InvalidArgumentError("truth CSV needs query,url,p columns");
  }
  std::map<Record, double> out;
  for (size_t i = 0; i < table->rows.size(); ++i) {
    auto value = table->Double(i, *p);
    if (!value.ok()) return value.status();
    out[Record{DecodeField(table->rows[i][*q]),
               DecodeField(table->rows[i][*u])}] += *value;
  }
  return out;
}

/// Samples min(m, |records|) records per user, uniformly without
/// replacement, keeping the user id attached.
inline std::vector<UserRecord> SamplePerUser(std::span<const UserLog> users,
                                             int m, RngStream& rng) {
  std::vector<UserRecord> out;
  out.reserve(users.size());
  std::vector<size_t> idx;
  for (const auto& u : users) {
    const size_t n = u.records.size();
    const size_t take = std::min(n, static_cast<size_t>(std::max(m, 0)));
    if (take == 1) {
      out.push_back(UserRecord{u.user_id, u.records[UniformIndex(n, rng)]});
      continue;
    }
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates.
    for (size_t i = 0; i < take; ++i) {
      const size_t j = i + UniformIndex(n - i, rng);
      std::swap(idx[i], idx[j]);
      out.push_back(UserRecord{u.user_id, u.records[idx[i]]});
    }
  }
  return out;
}

inline std::vector<UserRecord> SamplePerUser(const Dataset& ds, int m,
                                             RngStream& rng) {
  return SamplePerUser(std::span<const UserLog>(ds.users), m, rng);
}

/// Rounds half to even.
inline int64_t RoundHalfEven(double x) {
  return static_cast<int64_t>(std::nearbyint(x));
}

struct UserPartition {
  // Indices into Dataset::users.
  std::vector<size_t> head_list;   // S
  std::vector<size_t> estimation;  // T
  std::vector<size_t> client;      // C
};

/// Uniform random split into S, T (opt-in) and C.
/// |O| = round(optin_fraction * N), |S| = round(f_O * |O|), half to even.
inline absl::StatusOr<UserPartition> PartitionUsers(size_t num_users,
                                                    double optin_fraction,
                                                    double f_optin,
                                                    RngStream& rng) {
  if (!(optin_fraction > 0 && optin_fraction < 1) ||
      !(f_optin > 0 && f_optin < 1)) {
    return absl::InvalidArgumentError("partition fractions must lie in (0,1)");
  }
  const int64_t n = static_cast<int64_t>(num_users);
  const int64_t optin = RoundHalfEven(optin_fraction * static_cast<double>(n));
  const int64_t s = RoundHalfEven(f_optin * static_cast<double>(optin));
  const int64_t t = optin - s;
  const int64_t c = n - optin;
  if (s <= 0 || t <= 0 || c <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "partition of ", n, " users is degenerate: |S| = ", s, ", |T| = ", t,
        ", |C| = ", c));
  }
  std::vector<size_t> order(num_users);
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = num_users; i > 1; --i) {
    std::swap(order[i - 1], order[UniformIndex(i, rng)]);
  }
  UserPartition p;
  p.head_list.assign(order.begin(), order.begin() + s);
  p.estimation.assign(order.begin() + s, order.begin() + s + t);
  p.client.assign(order.begin() + s + t, order.end());
  return p;
}

inline absl::StatusOr<UserPartition> PartitionUsers(const Dataset& ds,
                                                    double optin_fraction,
                                                    double f_optin,
                                                    RngStream& rng) {
  return PartitionUsers(ds.users.size(), optin_fraction, f_optin, rng);
}

/// Power-law synthetic log: query i has weight i^-s, URL j of a query has
/// weight j^-s, each user holds one record drawn from the joint. URLs are
/// namespaced per query ("q3/u1").
inline absl::StatusOr<Dataset> SynthZipf(int64_t num_users, int num_queries,
                                         int urls_per_query, double exponent,
                                         RngStream& rng) {
  if (num_users < 1 || num_queries < 1 || urls_per_query < 1) {
    return absl::InvalidArgumentError("synthetic sizes must be at least 1");
  }
  if (!(exponent >= 0) || !std::isfinite(exponent)) {
    return absl::InvalidArgumentError("exponent must be non-negative");
  }
  auto zipf = [exponent](int n) {
    std::vector<double> w(n);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      w[i] = std::pow(static_cast<double>(i + 1), -exponent);
      sum += w[i];
    }
    for (auto& x : w) x /= sum;
    return w;
  };
  const auto query_w = zipf(num_queries);
  const auto url_w = zipf(urls_per_query);

  std::vector<Record> records;
  std::vector<double> joint;
  std::map<Record, double> truth;
  for (int i = 0; i < num_queries; ++i) {
    for (int j = 0; j < urls_per_query; ++j) {
      Record r{absl::StrCat("q", i + 1), absl::StrCat("q", i + 1, "/u", j + 1)};
      joint.push_back(query_w[i] * url_w[j]);
      truth[r] = joint.back();
      records.push_back(std::move(r));
    }
  }
  std::discrete_distribution<size_t> pick(joint.begin(), joint.end());
  Dataset ds;
  ds.users.reserve(num_users);
  for (int64_t u = 0; u < num_users; ++u) {
    ds.users.push_back(UserLog{absl::StrCat("u", u), {records[pick(rng)]}});
  }
  ds.true_distribution = std::move(truth);
  return ds;
}

/// Empirical distribution of a record sample.
inline std::map<Record, double> EmpiricalDistribution(
    std::span<const UserRecord> rows) {
  std::map<Record, double> out;
  if (rows.empty()) return out;
  for (const auto& row : rows) out[row.record] += 1;
  for (auto& [r, p] : out) p /= static_cast<double>(rows.size());
  return out;
}

}  // namespace blender

#endif  // BLENDER_DATA_HPP_
