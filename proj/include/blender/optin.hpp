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

// Trusted-curator side: thresholded head-list release from the S group and
// Laplace-mechanism probability estimates from the T group.

#ifndef BLENDER_OPTIN_HPP_
#define BLENDER_OPTIN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "blender/core.hpp"
#include "blender/sampling.hpp"

namespace blender {

struct Threshold {
  double b_s = 0;  // Laplace scale for the admission test
  double tau = 0;  // admission threshold on the noisy count
};

/// Noise scale and threshold of the head-list release.
///
/// Privacy of the release needs m_O = 1, epsilon > ln 2 and tau >= 1; any
/// other combination is rejected.
inline absl::StatusOr<Threshold> ComputeThreshold(const PrivacyParams& params) {
  if (params.m_optin != 1) {
    return absl::InvalidArgumentError("head-list release requires m_O = 1");
  }
  if (!(params.epsilon > std::numbers::ln2)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "head-list release requires epsilon > ln 2, got ", params.epsilon));
  }
  if (!(params.delta > 0 && params.delta < 1)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  Threshold th;
  th.b_s = 2.0 * params.m_optin / params.epsilon;
  th.tau = th.b_s * (std::log(std::exp(params.epsilon / 2) + params.m_optin -
                              1) -
                     std::log(params.delta));
  if (!(th.tau >= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold tau = ", th.tau, " is below 1"));
  }
  return th;
}

/// Builds the Initial head list from the S group.
///
/// Every distinct record gets one independent Lap(b_S) draw and is admitted
/// iff count + noise > tau. <*,*> is always appended. Records keep
/// first-seen order. `Noise` is a test seam; production code uses the
/// default.
template <class Noise = LaplaceNoise>
absl::StatusOr<HeadList> CreateHeadList(const PrivacyParams& params,
                                        const HeadListGroup& group,
                                        RngStream& rng, Noise noise = {}) {
  auto th = ComputeThreshold(params);
  if (!th.ok()) return th.status();

  std::vector<Record> distinct;
  std::unordered_map<Record, int64_t, RecordHash> counts;
  for (const auto& row : group.rows) {
    auto [it, inserted] = counts.try_emplace(row.record, 0);
    if (inserted) distinct.push_back(row.record);
    ++it->second;
  }

  HeadList hl(HeadListStage::kInitial);
  for (const auto& r : distinct) {
    if (r.IsStar()) continue;
    const double y = noise(th->b_s, rng);
    if (static_cast<double>(counts[r]) + y > th->tau) hl.Add(r);
  }
  hl.Add(Record::Star());
  return hl;
}

/// Unbiased variance of a Laplace-noised frequency estimate.
///
/// (n/(n-1)) * (p(1-p)/n + 2(b/n)^2), with p clamped to [0, 1].
inline absl::StatusOr<double> OptinVariance(double p_hat, int64_t n,
                                            double b_t) {
  if (n < 2) {
    return absl::InvalidArgumentError("variance needs at least 2 records");
  }
  if (!(b_t > 0)) {
    return absl::InvalidArgumentError("noise scale must be positive");
  }
  const double dn = static_cast<double>(n);
  const double noise = b_t / dn;
  // Noisy estimates can leave [0, 1]; the Bernoulli term is taken at the
  // nearest valid probability so the variance stays non-negative.
  const double p = std::clamp(p_hat, 0.0, 1.0);
  return dn / (dn - 1) * (p * (1 - p) / dn + 2 * noise * noise);
}

struct OptinOutput {
  HeadList head_list{HeadListStage::kFinal};
  EstimateVector estimates;
  double b_s = 0;
  double b_t = 0;
  double tau = 0;
};

/// Estimates probabilities for the Initial head list from the T group and
/// trims it to the M most probable queries.
///
/// Estimates are left unclamped; negative values survive until projection.
/// Records of trimmed queries are folded into <*,*>, whose variance is then
/// recomputed from the folded probability with the same formula.
template <class Noise = LaplaceNoise>
absl::StatusOr<OptinOutput> EstimateOptinProbabilities(
    const PrivacyParams& params, const EstimationGroup& group,
    const HeadList& initial, RngStream& rng, Noise noise = {}) {
  if (params.m_optin != 1) {
    return absl::InvalidArgumentError("opt-in estimation requires m_O = 1");
  }
  if (initial.stage() != HeadListStage::kInitial) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected an initial head list, got ", AbslView(StageName(initial.stage()))));
  }
  if (!initial.Contains(Record::Star())) {
    return absl::InvalidArgumentError("initial head list lacks <*,*>");
  }
  const int64_t n = static_cast<int64_t>(group.size());
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("estimation group needs at least 2 records, got ", n));
  }
  auto th = ComputeThreshold(params);
  if (!th.ok()) return th.status();

  OptinOutput out;
  out.b_s = th->b_s;
  out.tau = th->tau;
  out.b_t = 2.0 * params.m_optin / params.epsilon;

  std::unordered_map<Record, int64_t, RecordHash> counts;
  for (const auto& row : group.rows) {
    ++counts[Canonicalize(row.record, initial)];
  }

  // Noisy estimates for every Initial record, in list order.
  struct Row {
    Record record;
    double p;
  };
  std::vector<std::vector<Row>> by_query(initial.num_queries());
  const auto& entries = initial.entries();
  for (size_t qi = 0; qi < entries.size(); ++qi) {
    for (const auto& u : entries[qi].urls) {
      Record r{entries[qi].query, u};
      const double y = noise(out.b_t, rng);
      const double count = static_cast<double>(counts[r]);
      by_query[qi].push_back(Row{r, (count + y) / static_cast<double>(n)});
    }
  }

  // Rank the real queries by estimated marginal; ties go to the
  // lexicographically smaller query.
  struct Marginal {
    size_t index;
    double p;
  };
  std::vector<Marginal> marginals;
  std::optional<size_t> star_index;
  for (size_t qi = 0; qi < entries.size(); ++qi) {
    if (IsWildcard(entries[qi].query)) {
      star_index = qi;
      continue;
    }
    double sum = 0;
    for (const auto& row : by_query[qi]) sum += row.p;
    marginals.push_back(Marginal{qi, sum});
  }
  std::sort(marginals.begin(), marginals.end(),
            [&](const Marginal& a, const Marginal& b) {
              if (a.p != b.p) return a.p > b.p;
              return entries[a.index].query < entries[b.index].query;
            });
  const size_t keep =
      std::min(marginals.size(), static_cast<size_t>(params.max_queries));

  double star_p = 0;
  if (star_index.has_value()) {
    for (const auto& row : by_query[*star_index]) star_p += row.p;
  }
  for (size_t i = keep; i < marginals.size(); ++i) {
    for (const auto& row : by_query[marginals[i].index]) star_p += row.p;
  }

  EstimateVector est(n);
  for (size_t i = 0; i < keep; ++i) {
    auto rows = by_query[marginals[i].index];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) {
                       if (a.p != b.p) return a.p > b.p;
                       return a.record.url < b.record.url;
                     });
    for (const auto& row : rows) {
      auto var = OptinVariance(row.p, n, out.b_t);
      if (!var.ok()) return var.status();
      out.head_list.Add(row.record);
      est.SetRecord(row.record, Estimate{row.p, *var});
    }
    // Query-level variance is the same formula applied to the marginal.
    auto qvar = OptinVariance(marginals[i].p, n, out.b_t);
    if (!qvar.ok()) return qvar.status();
    est.SetQuery(entries[marginals[i].index].query,
                 Estimate{marginals[i].p, *qvar});
  }
  auto star_var = OptinVariance(star_p, n, out.b_t);
  if (!star_var.ok()) return star_var.status();
  out.head_list.Add(Record::Star());
  est.SetRecord(Record::Star(), Estimate{star_p, *star_var});
  est.SetQuery(std::string(kWildcard), Estimate{star_p, *star_var});
  out.estimates = std::move(est);
  return out;
}

}  // namespace blender

#endif  // BLENDER_OPTIN_HPP_
