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

#ifndef BLENDER_BLEND_HPP_
#define BLENDER_BLEND_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "blender/core.hpp"

namespace blender {

/// Weight on the opt-in estimate: var_C / (var_O + var_C).
///
/// Both variances zero is a tie and yields 1/2.
inline absl::StatusOr<double> BlendWeight(double var_optin, double var_client) {
  if (!(var_optin >= 0) || !(var_client >= 0) || !std::isfinite(var_optin) ||
      !std::isfinite(var_client)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "variances must be finite and non-negative, got ", var_optin, ", ",
        var_client));
  }
  const double total = var_optin + var_client;
  if (total == 0) return 0.5;
  return var_client / total;
}

/// Euclidean projection onto {x : x >= 0, sum x = 1}, by sorting.
inline std::vector<double> ProjectToSimplex(std::span<const double> v) {
  if (v.empty()) return {};
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0;
  double theta = 0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    prefix += sorted[i];
    const double candidate = (prefix - 1) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0) theta = candidate;
  }
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

struct BlendedRecord {
  Record record;
  double p = 0;
  double w = 0;
  Estimate optin;
  Estimate client;
};

struct BlendedOutput {
  std::vector<BlendedRecord> records;  // head-list order
  bool projected = false;
  // Records where both variances were zero and w fell back to 1/2.
  int tied_weights = 0;
};

struct BlendOptions {
  bool project = true;
};

/// Convex per-record combination of the two estimate vectors.
inline absl::StatusOr<BlendedOutput> BlendProbabilities(
    const EstimateVector& optin, const EstimateVector& client,
    const HeadList& hl, const BlendOptions& options = {}) {
  if (optin.records().size() != hl.num_records() ||
      client.records().size() != hl.num_records()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "estimate vectors must cover the head list exactly: list has ",
        hl.num_records(), " records, opt-in ", optin.records().size(),
        ", client ", client.records().size()));
  }
  BlendedOutput out;
  for (const auto& r : hl.Records()) {
    const auto o = optin.record(r);
    const auto c = client.record(r);
    if (!o.has_value() || !c.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("record <", EncodeField(r.query), ",",
                       EncodeField(r.url), "> missing from an estimate"));
    }
    auto w = BlendWeight(o->var, c->var);
    if (!w.ok()) return w.status();
    if (o->var + c->var == 0) ++out.tied_weights;
    out.records.push_back(
        BlendedRecord{r, *w * o->p + (1 - *w) * c->p, *w, *o, *c});
  }
  if (options.project) {
    std::vector<double> p;
    p.reserve(out.records.size());
    for (const auto& b : out.records) p.push_back(b.p);
    const auto projected = ProjectToSimplex(p);
    for (size_t i = 0; i < projected.size(); ++i) {
      out.records[i].p = projected[i];
    }
    out.projected = true;
  }
  return out;
}

/// Re-keys client estimates (over the augmented list) onto the Final list.
///
/// The augmented list carries a <q,*> bucket per query for unlisted URLs;
/// on the curator side those records already live in <*,*>. The buckets
/// are therefore summed into <*,*>, with variances added.
inline absl::StatusOr<EstimateVector> RestrictToHeadList(
    const EstimateVector& client, const HeadList& final_list) {
  EstimateVector out(client.sample_size());
  Estimate star{0, 0};
  for (const auto& [r, e] : client.records()) {
    if (IsWildcard(r.url)) {
      star.p += e.p;
      star.var += e.var;
    }
  }
  for (const auto& r : final_list.Records()) {
    if (r.IsStar()) {
      out.SetRecord(r, star);
      continue;
    }
    const auto e = client.record(r);
    if (!e.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("client estimates lack <", EncodeField(r.query), ",",
                       EncodeField(r.url), ">"));
    }
    out.SetRecord(r, *e);
  }
  for (const auto& [q, e] : client.queries()) {
    if (final_list.HasQuery(q)) out.SetQuery(q, e);
  }
  return out;
}

}  // namespace blender

#endif  // BLENDER_BLEND_HPP_
