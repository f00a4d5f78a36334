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

// Exact brute-force computations over the client randomizer, used to verify
// the sampler, the denoiser, and the privacy guarantee. Arithmetic is done
// in long double (64-bit mantissa on x86-64).

#ifndef BLENDER_ORACLE_HPP_
#define BLENDER_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "blender/client.hpp"
#include "blender/core.hpp"

namespace blender::oracle {

using Real = long double;

// Enumeration cost grows as (records)^2 for DP checks; k * max k_q bounds it.
inline constexpr size_t kMaxOracleCells = 10000;

struct ExactDistribution {
  // Every record of the augmented head list, in list order.
  std::vector<std::pair<Record, Real>> probs;

  Real Total() const {
    Real sum = 0;
    for (const auto& [r, p] : probs) sum += p;
    return sum;
  }

  Real Prob(const Record& r) const {
    for (const auto& [rec, p] : probs) {
      if (rec == r) return p;
    }
    return 0;
  }
};

inline absl::Status CheckSize(const HeadList& hl) {
  size_t max_kq = 0;
  for (const auto& e : hl.entries()) max_kq = std::max(max_kq, e.urls.size());
  if (hl.num_queries() * max_kq > kMaxOracleCells) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "head list too large for exact enumeration: k * max k_q = ",
        hl.num_queries() * max_kq, " > ", kMaxOracleCells));
  }
  return absl::OkStatus();
}

/// Closed-form output distribution of the randomizer for one input.
///
/// truthful: t t_q; same query, other URL: t (1-t_q)/(k_q-1);
/// other query q', any of its URLs: (1-t)/((k-1) k_q').
inline absl::StatusOr<ExactDistribution> EnumerateReportDistribution(
    const Record& record, const ReportModel& model, const HeadList& hl) {
  if (auto s = CheckSize(hl); !s.ok()) return s;
  if (model.k_q.size() != hl.num_queries()) {
    return absl::InvalidArgumentError("report model does not match the list");
  }
  const Record input = Canonicalize(record, hl);
  ExactDistribution out;
  const auto& entries = hl.entries();
  if (model.query_forced) {
    for (const auto& r : hl.Records()) {
      out.probs.emplace_back(r, r.IsStar() ? Real{1} : Real{0});
    }
    return out;
  }
  const Real t = model.t;
  const Real k = model.k;
  for (size_t qi = 0; qi < entries.size(); ++qi) {
    const Real kq = model.k_q[qi];
    const Real tq = model.t_q[qi];
    for (const auto& u : entries[qi].urls) {
      Real p;
      if (entries[qi].query == input.query) {
        if (model.k_q[qi] == 1) {
          p = t;
        } else if (u == input.url) {
          p = t * tq;
        } else {
          p = t * (1 - tq) / (kq - 1);
        }
      } else {
        p = (1 - t) / ((k - 1) * kq);
      }
      out.probs.emplace_back(Record{entries[qi].query, u}, p);
    }
  }
  return out;
}

struct ExpectedReports {
  std::map<Record, Real> records;
  std::map<std::string, Real> queries;
};

/// Expected report distribution for a true distribution `p` over the
/// augmented head list: r(y) = sum_x p(x) P[y | x].
inline absl::StatusOr<ExpectedReports> ForwardReportMap(
    const std::map<Record, Real>& p, const ReportModel& model,
    const HeadList& hl) {
  Real total = 0;
  for (const auto& [r, v] : p) {
    if (!hl.Contains(r)) {
      return absl::InvalidArgumentError("true distribution has off-list keys");
    }
    if (v < 0) {
      return absl::InvalidArgumentError("true distribution has negative mass");
    }
    total += v;
  }
  if (std::fabs(static_cast<double>(total - 1)) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("true distribution sums to ",
                     static_cast<double>(total), ", not 1"));
  }
  ExpectedReports out;
  for (const auto& r : hl.Records()) {
    out.records[r] = 0;
    out.queries[r.query] = 0;
  }
  for (const auto& [x, px] : p) {
    if (px == 0) continue;
    auto dist = EnumerateReportDistribution(x, model, hl);
    if (!dist.ok()) return dist.status();
    for (const auto& [y, py] : dist->probs) {
      out.records[y] += px * py;
      out.queries[y.query] += px * py;
    }
  }
  return out;
}

/// Largest hockey-stick divergence sum_y max(0, P[y|r] - e^eps P[y|r'])
/// over ordered pairs of inputs, minus delta. A value <= 0 means the
/// randomizer is (eps, delta)-DP on this head list.
inline absl::StatusOr<Real> VerifyDp(const ReportModel& model,
                                     const HeadList& hl, Real epsilon,
                                     Real delta) {
  if (auto s = CheckSize(hl); !s.ok()) return s;
  const auto inputs = hl.Records();
  std::vector<ExactDistribution> dists;
  dists.reserve(inputs.size());
  for (const auto& r : inputs) {
    auto d = EnumerateReportDistribution(r, model, hl);
    if (!d.ok()) return d.status();
    dists.push_back(*std::move(d));
  }
  const Real scale = std::exp(epsilon);
  Real worst = 0;
  for (size_t a = 0; a < dists.size(); ++a) {
    for (size_t b = 0; b < dists.size(); ++b) {
      if (a == b) continue;
      Real excess = 0;
      for (size_t y = 0; y < dists[a].probs.size(); ++y) {
        excess += std::max(Real{0}, dists[a].probs[y].second -
                                        scale * dists[b].probs[y].second);
      }
      worst = std::max(worst, excess);
    }
  }
  return worst - delta;
}

/// Truth probability recomputed in extended precision.
inline Real TruthProbabilityExact(Real epsilon, Real delta, int n) {
  const Real e = std::exp(epsilon);
  return (e + delta / 2 * (n - 1)) / (e + n - 1);
}

/// An augmented head list with k queries: k-1 real queries carrying k_q
/// URLs each (the last being *), plus the <*,*> query.
inline HeadList SyntheticAugmentedList(int k, int k_q) {
  HeadList hl(HeadListStage::kClientAugmented);
  for (int q = 1; q < k; ++q) {
    for (int u = 1; u < k_q; ++u) {
      hl.Add(Record{absl::StrCat("q", q), absl::StrCat("q", q, "/u", u)});
    }
    hl.Add(Record{absl::StrCat("q", q), std::string(kWildcard)});
  }
  hl.Add(Record::Star());
  return hl;
}

}  // namespace blender::oracle

#endif  // BLENDER_ORACLE_HPP_
