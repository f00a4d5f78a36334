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

// Utility metrics: L1 distance, list NDCG, and NDCG over a list of lists
// (queries, each with its own URL list).

#ifndef BLENDER_METRICS_HPP_
#define BLENDER_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "blender/core.hpp"

namespace blender {

inline absl::StatusOr<double> L1Distance(std::span<const double> estimate,
                                         std::span<const double> truth) {
  if (estimate.size() != truth.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("L1 needs equal lengths, got ", estimate.size(), " and ",
                     truth.size()));
  }
  double sum = 0;
  for (size_t i = 0; i < estimate.size(); ++i) {
    sum += std::fabs(estimate[i] - truth[i]);
  }
  return sum;
}

template <class Key>
absl::StatusOr<double> L1Distance(const std::map<Key, double>& estimate,
                                  const std::map<Key, double>& truth) {
  if (estimate.size() != truth.size()) {
    return absl::InvalidArgumentError("L1 needs identically keyed vectors");
  }
  double sum = 0;
  auto it = truth.begin();
  for (const auto& [key, p] : estimate) {
    if (it->first != key) {
      return absl::InvalidArgumentError("L1 needs identically keyed vectors");
    }
    sum += std::fabs(p - it->second);
    ++it;
  }
  return sum;
}

namespace internal {

inline double Gain(double rel) { return std::exp2(rel) - 1; }
inline double Discount(size_t position) {  // 0-based
  return 1.0 / std::log2(static_cast<double>(position) + 2);
}

}  // namespace internal

/// NDCG_k of an estimated ordering. Relevance of an item is its share of
/// the total true count; unknown items have relevance 0. The ideal DCG
/// orders items by true count.
template <class Key>
absl::StatusOr<double> NdcgList(std::span<const Key> estimated_order,
                                const std::map<Key, double>& true_counts,
                                size_t k) {
  double total = 0;
  for (const auto& [key, n] : true_counts) {
    if (!(n >= 0)) {
      return absl::InvalidArgumentError("true counts must be non-negative");
    }
    total += n;
  }
  if (!(total > 0)) {
    return absl::InvalidArgumentError("true counts are all zero");
  }
  std::vector<double> ideal;
  ideal.reserve(true_counts.size());
  for (const auto& [key, n] : true_counts) ideal.push_back(n / total);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  double dcg = 0;
  for (size_t i = 0; i < std::min(k, estimated_order.size()); ++i) {
    auto it = true_counts.find(estimated_order[i]);
    if (it == true_counts.end()) continue;
    dcg += internal::Gain(it->second / total) * internal::Discount(i);
  }
  double idcg = 0;
  for (size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += internal::Gain(ideal[i]) * internal::Discount(i);
  }
  return dcg / idcg;
}

struct RankedQuery {
  std::string query;
  double prob = 0;
  std::vector<std::pair<std::string, double>> urls;  // descending prob
};

/// A list of queries, each with its URL list, both sorted by probability
/// (descending, ties by key).
struct RankedEstimate {
  std::vector<RankedQuery> queries;

  const RankedQuery* Find(const std::string& query) const {
    for (const auto& q : queries) {
      if (q.query == query) return &q;
    }
    return nullptr;
  }
};

/// Drops the wildcard query and wildcard URLs, rescales the rest to sum to
/// one, and ranks queries (by marginal) and URLs.
inline absl::StatusOr<RankedEstimate> StripStarsAndRescale(
    std::span<const std::pair<Record, double>> probs) {
  std::map<std::string, std::vector<std::pair<std::string, double>>> grouped;
  double total = 0;
  for (const auto& [r, p] : probs) {
    if (IsWildcard(r.query) || IsWildcard(r.url)) continue;
    grouped[r.query].emplace_back(r.url, p);
    total += p;
  }
  if (grouped.empty() || !(total > 0)) {
    return absl::InvalidArgumentError(
        "no probability mass outside the wildcard entries");
  }
  auto by_prob = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  RankedEstimate out;
  for (auto& [query, urls] : grouped) {
    RankedQuery rq;
    rq.query = query;
    for (auto& [u, p] : urls) {
      p /= total;
      rq.prob += p;
    }
    std::sort(urls.begin(), urls.end(), by_prob);
    rq.urls = std::move(urls);
    out.queries.push_back(std::move(rq));
  }
  std::sort(out.queries.begin(), out.queries.end(),
            [](const RankedQuery& a, const RankedQuery& b) {
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.query < b.query;
            });
  return out;
}

/// NDCG over a list of lists.
///
/// Each query's gain is discounted by its rank in the estimated query order
/// and multiplied by the NDCG of its estimated URL list against the true URL
/// list. The normalizer is the ideal query order with ideal URL lists, so
/// the score lies in [0, 1] and never exceeds the query-only NDCG.
/// k = 0 scores the full lists.
inline absl::StatusOr<double> GeneralizedNdcg(const RankedEstimate& estimate,
                                              const RankedEstimate& truth,
                                              size_t k = 0) {
  if (truth.queries.empty()) {
    return absl::InvalidArgumentError("truth has no queries");
  }
  double total = 0;
  for (const auto& q : truth.queries) total += q.prob;
  if (!(total > 0)) {
    return absl::InvalidArgumentError("truth has no probability mass");
  }
  const size_t query_k = k == 0 ? truth.queries.size() : k;

  double dcg = 0;
  for (size_t i = 0; i < std::min(query_k, estimate.queries.size()); ++i) {
    const auto& est_q = estimate.queries[i];
    const RankedQuery* true_q = truth.Find(est_q.query);
    if (true_q == nullptr || !(true_q->prob > 0)) continue;

    std::map<std::string, double> url_truth(true_q->urls.begin(),
                                            true_q->urls.end());
    std::vector<std::string> url_order;
    for (const auto& [u, p] : est_q.urls) url_order.push_back(u);
    const size_t url_k = k == 0 ? std::max(url_order.size(), url_truth.size())
                                : k;
    auto url_ndcg = NdcgList<std::string>(url_order, url_truth, url_k);
    if (!url_ndcg.ok()) return url_ndcg.status();
    dcg += internal::Gain(true_q->prob / total) * internal::Discount(i) *
           *url_ndcg;
  }

  std::vector<double> ideal;
  for (const auto& q : truth.queries) ideal.push_back(q.prob / total);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0;
  for (size_t i = 0; i < std::min(query_k, ideal.size()); ++i) {
    idcg += internal::Gain(ideal[i]) * internal::Discount(i);
  }
  return dcg / idcg;
}

/// Query-level NDCG of a ranked estimate, ignoring URL lists.
inline absl::StatusOr<double> QueryNdcg(const RankedEstimate& estimate,
                                        const RankedEstimate& truth,
                                        size_t k = 0) {
  std::map<std::string, double> counts;
  for (const auto& q : truth.queries) counts[q.query] = q.prob;
  std::vector<std::string> order;
  for (const auto& q : estimate.queries) order.push_back(q.query);
  return NdcgList<std::string>(order, counts,
                               k == 0 ? truth.queries.size() : k);
}

}  // namespace blender

#endif  // BLENDER_METRICS_HPP_
