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

#include "blender/metrics.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "blender/sampling.hpp"
#include "gtest/gtest.h"

namespace blender {
namespace {

const std::string kStar(kWildcard);

double G(double x) { return std::pow(2.0, x) - 1; }

TEST(L1Test, SpecValues) {
  const std::vector<double> a = {0.6, 0.4}, b = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(*L1Distance(a, a), 0.0);
  EXPECT_NEAR(*L1Distance(a, b), 0.2, 1e-15);
  const std::vector<double> x = {1, 0}, y = {0, 1};
  EXPECT_DOUBLE_EQ(*L1Distance(x, y), 2.0);
  const std::vector<double> shorter = {1};
  EXPECT_FALSE(L1Distance(x, shorter).ok());
}

TEST(L1Test, KeyedVectorsMustMatch) {
  std::map<std::string, double> a = {{"x", 0.5}, {"y", 0.5}};
  std::map<std::string, double> b = {{"x", 0.5}, {"z", 0.5}};
  EXPECT_FALSE(L1Distance(a, b).ok());
  EXPECT_DOUBLE_EQ(*L1Distance(a, a), 0.0);
}

TEST(NdcgListTest, SwappedPair) {
  const std::map<std::string, double> counts = {{"A", 3}, {"B", 1}};
  const std::vector<std::string> swapped = {"B", "A"};
  const double expected = (0.189207 + 0.681792 / std::log2(3.0)) /
                          (0.681792 + 0.189207 / std::log2(3.0));
  const double got = *NdcgList<std::string>(swapped, counts, 2);
  EXPECT_NEAR(got, expected, 1e-6);
  EXPECT_NEAR(got, 0.7731, 1e-4);
}

TEST(NdcgListTest, PerfectAndSingleton) {
  const std::map<std::string, double> counts = {{"A", 3}, {"B", 1}, {"C", 1}};
  const std::vector<std::string> perfect = {"A", "B", "C"};
  EXPECT_DOUBLE_EQ(*NdcgList<std::string>(perfect, counts, 3), 1.0);
  // Tied true counts may appear in either order.
  const std::vector<std::string> tie_swapped = {"A", "C", "B"};
  EXPECT_DOUBLE_EQ(*NdcgList<std::string>(tie_swapped, counts, 3), 1.0);
  const std::map<std::string, double> one = {{"A", 5}};
  const std::vector<std::string> order = {"A"};
  EXPECT_DOUBLE_EQ(*NdcgList<std::string>(order, one, 1), 1.0);
}

TEST(NdcgListTest, BoundedOnRandomOrders) {
  RngStream rng(8, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, double> counts;
    std::vector<std::string> order;
    for (int i = 0; i < 6; ++i) {
      const std::string key = absl::StrCat("k", i);
      counts[key] = std::floor(rng.UniformUnit() * 10);
      order.push_back(key);
    }
    counts["k0"] += 1;
    std::shuffle(order.begin(), order.end(), rng);
    const double v = *NdcgList<std::string>(order, counts, 6);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
}

TEST(NdcgListTest, RejectsZeroCounts) {
  const std::map<std::string, double> zeros = {{"A", 0}};
  const std::vector<std::string> order = {"A"};
  EXPECT_FALSE(NdcgList<std::string>(order, zeros, 1).ok());
}

TEST(StripStarsTest, SpecValues) {
  const std::vector<std::pair<Record, double>> no_stars = {
      {{"a", "1"}, 0.7}, {{"b", "1"}, 0.3}};
  auto same = StripStarsAndRescale(no_stars);
  ASSERT_TRUE(same.ok());
  EXPECT_DOUBLE_EQ(same->Find("a")->prob, 0.7);

  const std::vector<std::pair<Record, double>> half = {
      {{"a", "1"}, 0.5}, {Record::Star(), 0.5}};
  EXPECT_DOUBLE_EQ(StripStarsAndRescale(half)->Find("a")->prob, 1.0);

  const std::vector<std::pair<Record, double>> three = {
      {{"a", "1"}, 0.3}, {{"b", "1"}, 0.1}, {Record::Star(), 0.6}};
  auto r = StripStarsAndRescale(three);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->Find("a")->prob, 0.75, 1e-15);
  EXPECT_NEAR(r->Find("b")->prob, 0.25, 1e-15);
  EXPECT_EQ(r->queries[0].query, "a");
}

TEST(StripStarsTest, DropsStarUrls) {
  const std::vector<std::pair<Record, double>> probs = {
      {{"a", "1"}, 0.2}, {{"a", kStar}, 0.6}, {{"b", "1"}, 0.2}};
  auto r = StripStarsAndRescale(probs);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->Find("a")->urls.size(), 1u);
  EXPECT_NEAR(r->Find("a")->prob, 0.5, 1e-15);
}

RankedEstimate Make(
    std::vector<std::pair<std::string,
                          std::vector<std::pair<std::string, double>>>>
        queries) {
  std::vector<std::pair<Record, double>> flat;
  for (const auto& [q, urls] : queries) {
    for (const auto& [u, p] : urls) flat.emplace_back(Record{q, u}, p);
  }
  return *StripStarsAndRescale(flat);
}

TEST(GeneralizedNdcgTest, PerfectEstimate) {
  const auto truth = Make({{"q1", {{"u1", 0.4}, {"u2", 0.2}}},
                           {"q2", {{"v1", 0.3}, {"v2", 0.1}}}});
  EXPECT_NEAR(*GeneralizedNdcg(truth, truth), 1.0, 1e-15);
}

TEST(GeneralizedNdcgTest, HandComputedUrlSwap) {
  const auto truth = Make({{"q1", {{"u1", 0.4}, {"u2", 0.2}}},
                           {"q2", {{"v1", 0.3}, {"v2", 0.1}}}});
  const auto est = Make({{"q1", {{"u1", 0.1}, {"u2", 0.5}}},
                         {"q2", {{"v1", 0.3}, {"v2", 0.1}}}});
  const double l3 = std::log2(3.0);
  const double url_ndcg =
      (G(1.0 / 3) + G(2.0 / 3) / l3) / (G(2.0 / 3) + G(1.0 / 3) / l3);
  const double expected =
      (G(0.6) * url_ndcg + G(0.4) / l3) / (G(0.6) + G(0.4) / l3);
  EXPECT_NEAR(*GeneralizedNdcg(est, truth), expected, 1e-9);
  EXPECT_LT(*GeneralizedNdcg(est, truth), 1.0);
}

TEST(GeneralizedNdcgTest, TiedUrlEstimateVersusExplicitSwap) {
  const auto truth = Make({{"q1", {{"u1", 0.2}, {"u2", 0.4}}},
                           {"q2", {{"v1", 0.3}, {"v2", 0.1}}}});
  // Equal estimates break ties lexicographically, putting u1 first.
  const auto tied = Make({{"q1", {{"u1", 0.3}, {"u2", 0.3}}},
                          {"q2", {{"v1", 0.3}, {"v2", 0.1}}}});
  const auto swapped = Make({{"q1", {{"u1", 0.5}, {"u2", 0.1}}},
                             {"q2", {{"v1", 0.3}, {"v2", 0.1}}}});
  const double t = *GeneralizedNdcg(tied, truth);
  EXPECT_LT(t, 1.0);
  EXPECT_GE(t, *GeneralizedNdcg(swapped, truth));
}

TEST(GeneralizedNdcgTest, NeverAboveQueryNdcg) {
  RngStream rng(10, 0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::pair<Record, double>> t, e;
    for (int q = 0; q < 4; ++q) {
      for (int u = 0; u < 3; ++u) {
        const Record r{absl::StrCat("q", q), absl::StrCat("u", u)};
        t.emplace_back(r, rng.UniformUnit() + 0.01);
        e.emplace_back(r, rng.UniformUnit());
      }
    }
    const auto truth = *StripStarsAndRescale(t);
    const auto est = *StripStarsAndRescale(e);
    const double g = *GeneralizedNdcg(est, truth);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, *QueryNdcg(est, truth) + 1e-12);
  }
}

TEST(GeneralizedNdcgTest, TruncatedAtK) {
  const auto truth = Make({{"q1", {{"u1", 0.5}}}, {"q2", {{"v1", 0.3}}},
                           {"q3", {{"w1", 0.2}}}});
  const auto est = Make({{"q1", {{"u1", 0.5}}}, {"q3", {{"w1", 0.3}}},
                         {"q2", {{"v1", 0.2}}}});
  EXPECT_DOUBLE_EQ(*GeneralizedNdcg(est, truth, 1), 1.0);
  EXPECT_LT(*GeneralizedNdcg(est, truth, 2), 1.0);
}

}  // namespace
}  // namespace blender
