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

// Local-model side: the two-stage randomized-response client and the
// server-side aggregation, denoising, and variance estimation.

#ifndef BLENDER_CLIENT_HPP_
#define BLENDER_CLIENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "blender/core.hpp"
#include "blender/sampling.hpp"

namespace blender {

// Truth probabilities this close to 1/n make the denoising denominators
// vanish.
inline constexpr double kSingularGap = 1e-12;

/// Probability of reporting the true item among n candidates:
/// (e^eps + (delta/2)(n-1)) / (e^eps + n - 1).
inline double TruthProbability(double epsilon, double delta, int n) {
  const double e = std::exp(epsilon);
  return (e + 0.5 * delta * (n - 1)) / (e + n - 1);
}

/// Channel parameters for one query of the augmented head list.
struct QuerySlice {
  double t = 1;    // truthful-query probability
  double t_q = 1;  // truthful-URL probability given the query was kept
  int k = 1;       // number of queries
  int k_q = 1;     // number of URLs of this query
};

/// Everything that determines the client randomizer's output distribution.
struct ReportModel {
  int k = 1;
  double t = 1;
  std::vector<int> k_q;  // indexed like the head list entries
  std::vector<double> t_q;
  ClientBudgets budgets;
  // With a single query there is nothing to randomize: <*,*> is reported
  // with probability 1.
  bool query_forced = true;

  QuerySlice Slice(size_t query_index) const {
    return QuerySlice{t, t_q[query_index], k, k_q[query_index]};
  }
};

inline absl::StatusOr<ReportModel> BuildReportModel(const PrivacyParams& params,
                                                    const HeadList& hl) {
  if (hl.stage() != HeadListStage::kClientAugmented) {
    return absl::InvalidArgumentError(absl::StrCat(
        "client randomizer needs a client-augmented head list, got ",
        AbslView(StageName(hl.stage()))));
  }
  if (!hl.Contains(Record::Star())) {
    return absl::InvalidArgumentError("augmented head list lacks <*,*>");
  }
  for (const auto& e : hl.entries()) {
    if (hl.UrlIndex(*hl.QueryIndex(e.query), kWildcard) == std::nullopt) {
      return absl::InvalidArgumentError(
          absl::StrCat("query '", EncodeField(e.query), "' lacks a * URL"));
    }
  }
  ReportModel m;
  m.budgets = params.client_budgets();
  m.k = static_cast<int>(hl.num_queries());
  m.query_forced = m.k == 1;
  m.t = TruthProbability(m.budgets.epsilon_query, m.budgets.delta_query, m.k);
  for (const auto& e : hl.entries()) {
    const int kq = static_cast<int>(e.urls.size());
    m.k_q.push_back(kq);
    m.t_q.push_back(
        TruthProbability(m.budgets.epsilon_url, m.budgets.delta_url, kq));
  }
  return m;
}

/// Privatizes one record on the client.
///
/// With probability 1-t a uniformly random other query and a uniformly
/// random URL of it are reported; otherwise, with probability 1-t_q, the
/// true query with a uniformly random other URL; otherwise the record
/// itself. The record is canonicalized against `hl` first.
inline Record LocalPrivatize(const Record& record, const ReportModel& model,
                             const HeadList& hl, RngStream& rng) {
  const Record r = Canonicalize(record, hl);
  if (model.query_forced) return Record::Star();
  const auto& entries = hl.entries();
  const size_t qi = *hl.QueryIndex(r.query);

  if (rng.UniformUnit() < 1 - model.t) {
    size_t other = UniformIndex(entries.size() - 1, rng);
    if (other >= qi) ++other;
    const auto& urls = entries[other].urls;
    return Record{entries[other].query, urls[UniformIndex(urls.size(), rng)]};
  }
  const auto& urls = entries[qi].urls;
  if (urls.size() >= 2 && rng.UniformUnit() < 1 - model.t_q[qi]) {
    const size_t ui = *hl.UrlIndex(qi, r.url);
    size_t other = UniformIndex(urls.size() - 1, rng);
    if (other >= ui) ++other;
    return Record{r.query, urls[other]};
  }
  return r;
}

/// Report counts keyed by head-list position. Partial aggregators built
/// over disjoint report sets merge associatively.
class ReportAggregator {
 public:
  explicit ReportAggregator(const HeadList& hl) : hl_(&hl) {
    counts_.reserve(hl.num_queries());
    for (const auto& e : hl.entries()) {
      counts_.emplace_back(e.urls.size(), 0);
    }
    query_counts_.assign(hl.num_queries(), 0);
  }

  absl::Status Add(const Record& report) {
    const auto qi = hl_->QueryIndex(report.query);
    if (!qi.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("report query '", EncodeField(report.query),
                       "' is not in the head list"));
    }
    const auto ui = hl_->UrlIndex(*qi, report.url);
    if (!ui.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("report URL '", EncodeField(report.url),
                       "' is not listed under its query"));
    }
    ++counts_[*qi][*ui];
    ++query_counts_[*qi];
    ++total_;
    return absl::OkStatus();
  }

  absl::Status Merge(const ReportAggregator& other) {
    if (other.hl_ != hl_) {
      return absl::InvalidArgumentError("aggregators cover different lists");
    }
    for (size_t qi = 0; qi < counts_.size(); ++qi) {
      for (size_t ui = 0; ui < counts_[qi].size(); ++ui) {
        counts_[qi][ui] += other.counts_[qi][ui];
      }
      query_counts_[qi] += other.query_counts_[qi];
    }
    total_ += other.total_;
    return absl::OkStatus();
  }

  const HeadList& head_list() const { return *hl_; }
  int64_t total() const { return total_; }
  int64_t count(size_t qi, size_t ui) const { return counts_[qi][ui]; }
  int64_t query_count(size_t qi) const { return query_counts_[qi]; }

 private:
  const HeadList* hl_;
  std::vector<std::vector<int64_t>> counts_;
  std::vector<int64_t> query_counts_;
  int64_t total_ = 0;
};

/// Reads a `user_id<TAB>query<TAB>url` report stream into counts.
inline absl::StatusOr<ReportAggregator> ReadReportStream(std::istream& is,
                                                         const HeadList& hl) {
  ReportAggregator agg(hl);
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    size_t start = 0;
    for (;;) {
      const size_t tab = line.find('\t', start);
      fields.push_back(std::string_view(line).substr(
          start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      return absl::InvalidArgumentError(absl::StrCat(
          "report line ", line_no, ": expected 3 fields, got ",
          fields.size()));
    }
    Record r{DecodeField(TrimWhitespace(fields[1])),
             DecodeField(TrimWhitespace(fields[2]))};
    if (auto s = agg.Add(r); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("report line ", line_no, ": ", s.message()));
    }
  }
  return agg;
}

inline void WriteReport(std::ostream& os, const std::string& user_id,
                        const Record& report) {
  os << user_id << '\t' << EncodeField(report.query) << '\t'
     << EncodeField(report.url) << '\n';
}

/// Inverts the query-level report map:
/// (r - (1-t)/(k-1)) / (t - (1-t)/(k-1)).
inline absl::StatusOr<double> DenoiseQuery(double r_hat, double t, int k) {
  if (k < 2) {
    return absl::InvalidArgumentError("query denoising needs k >= 2");
  }
  if (t <= 1.0 / k + kSingularGap) {
    return absl::InvalidArgumentError(absl::StrCat(
        "uninformative randomizer: t = ", t, " does not exceed 1/k"));
  }
  const double spill = (1 - t) / (k - 1);
  return (r_hat - spill) / (t - spill);
}

/// Inverts the record-level report map given the denoised query estimate.
/// With a single URL the record is the query.
inline absl::StatusOr<double> DenoiseRecord(double r_hat, double p_hat_q,
                                            const QuerySlice& s) {
  if (s.k_q == 1) return p_hat_q;
  if (s.k < 2) {
    return absl::InvalidArgumentError("record denoising needs k >= 2");
  }
  if (s.t_q <= 1.0 / s.k_q + kSingularGap) {
    return absl::InvalidArgumentError(absl::StrCat(
        "uninformative randomizer: t_q = ", s.t_q, " does not exceed 1/k_q"));
  }
  const double same_query = (1 - s.t_q) * s.t * p_hat_q / (s.k_q - 1);
  const double other_query =
      (1 - s.t) * (1 - p_hat_q) / (static_cast<double>(s.k - 1) * s.k_q);
  const double gain = s.t * (s.t_q - (1 - s.t_q) / (s.k_q - 1));
  return (r_hat - same_query - other_query) / gain;
}

/// Bessel-corrected variance of the denoised query estimate.
inline absl::StatusOr<double> ClientQueryVariance(double r_hat_q, int64_t n,
                                                  double t, int k) {
  if (n < 2) return absl::InvalidArgumentError("variance needs n >= 2");
  if (k < 2) return absl::InvalidArgumentError("variance needs k >= 2");
  const double gap = t - (1 - t) / (k - 1);
  return r_hat_q * (1 - r_hat_q) / (static_cast<double>(n - 1) * gap * gap);
}

/// Bessel-corrected variance of the denoised record estimate.
///
/// The record estimate is (r_qu + c * p_q - const) / gain with
/// c = (1-t)/((k-1)k_q) - t(1-t_q)/(k_q-1), so its variance is
///   (Var r_qu + c^2 Var p_q + 2c Cov(r_qu, p_q)) / gain^2,
/// where Cov(r_qu, p_q) = r_qu (1 - r_q) / ((n-1) * (kt-1)/(k-1)) because a
/// report of the record is also a report of its query. The form is a
/// quadratic form in the empirical report covariance and never negative.
inline absl::StatusOr<double> ClientRecordVariance(double r_hat_qu,
                                                   double r_hat_q, int64_t n,
                                                   const QuerySlice& s) {
  auto var_q = ClientQueryVariance(r_hat_q, n, s.t, s.k);
  if (!var_q.ok()) return var_q.status();
  if (s.k_q == 1) return *var_q;
  const double nm1 = static_cast<double>(n - 1);
  const double c = (1 - s.t) / (static_cast<double>(s.k - 1) * s.k_q) -
                   (s.t - s.t * s.t_q) / (s.k_q - 1);
  const double query_gap = (s.k * s.t - 1) / (s.k - 1);
  const double gain = s.t * (s.t_q - (1 - s.t_q) / (s.k_q - 1));
  const double v = r_hat_qu * (1 - r_hat_qu) / nm1 + c * c * *var_q +
                   2 * c * r_hat_qu * (1 - r_hat_q) / (query_gap * nm1);
  return std::max(0.0, v / (gain * gain));
}

/// Denoised record and query estimates with variances, keyed by the
/// augmented head list.
inline absl::StatusOr<EstimateVector> EstimateClientProbabilities(
    const ReportAggregator& agg, const ReportModel& model) {
  const HeadList& hl = agg.head_list();
  if (hl.stage() != HeadListStage::kClientAugmented) {
    return absl::InvalidArgumentError("reports must use the augmented list");
  }
  if (model.k_q.size() != hl.num_queries()) {
    return absl::InvalidArgumentError("report model does not match the list");
  }
  const int64_t n = agg.total();
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("client estimation needs at least 2 reports, got ", n));
  }
  const double dn = static_cast<double>(n);
  EstimateVector est(n);
  const auto& entries = hl.entries();

  if (model.query_forced) {
    // Only <*,*> exists; all mass sits there with certainty.
    est.SetRecord(Record::Star(), Estimate{1.0, 0.0});
    est.SetQuery(std::string(kWildcard), Estimate{1.0, 0.0});
    return est;
  }
  for (size_t qi = 0; qi < entries.size(); ++qi) {
    const double r_q = agg.query_count(qi) / dn;
    auto p_q = DenoiseQuery(r_q, model.t, model.k);
    if (!p_q.ok()) return p_q.status();
    auto var_q = ClientQueryVariance(r_q, n, model.t, model.k);
    if (!var_q.ok()) return var_q.status();
    est.SetQuery(entries[qi].query, Estimate{*p_q, *var_q});

    const QuerySlice slice = model.Slice(qi);
    for (size_t ui = 0; ui < entries[qi].urls.size(); ++ui) {
      const double r_qu = agg.count(qi, ui) / dn;
      auto p = DenoiseRecord(r_qu, *p_q, slice);
      if (!p.ok()) return p.status();
      auto var = ClientRecordVariance(r_qu, r_q, n, slice);
      if (!var.ok()) return var.status();
      est.SetRecord(Record{entries[qi].query, entries[qi].urls[ui]},
                    Estimate{*p, *var});
    }
  }
  return est;
}

/// Convenience overload over an in-memory report multiset.
inline absl::StatusOr<EstimateVector> EstimateClientProbabilities(
    std::span<const Record> reports, const HeadList& hl,
    const ReportModel& model) {
  ReportAggregator agg(hl);
  for (const auto& r : reports) {
    if (auto s = agg.Add(r); !s.ok()) return s;
  }
  return EstimateClientProbabilities(agg, model);
}

}  // namespace blender

#endif  // BLENDER_CLIENT_HPP_
