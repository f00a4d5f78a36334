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

#include "blender/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace blender {
namespace {

constexpr int kDraws = 1000000;

std::vector<double> LaplaceDraws(double scale, uint64_t seed) {
  RngStream rng = Substream(seed, 0);
  std::vector<double> out(kDraws);
  for (auto& x : out) x = *SampleLaplace(scale, rng);
  return out;
}

TEST(LaplaceTest, MeanIsZero) {
  const auto xs = LaplaceDraws(0.5, 1);
  double sum = 0;
  for (double x : xs) sum += x;
  EXPECT_NEAR(sum / kDraws, 0.0, 0.01);
}

TEST(LaplaceTest, VarianceIsTwoBSquared) {
  for (double b : {0.5, 2.0}) {
    const auto xs = LaplaceDraws(b, 2);
    double sum = 0, sq = 0;
    for (double x : xs) {
      sum += x;
      sq += x * x;
    }
    const double mean = sum / kDraws;
    const double var = sq / kDraws - mean * mean;
    EXPECT_NEAR(var / (2 * b * b), 1.0, 0.05) << "b = " << b;
  }
}

TEST(LaplaceTest, MedianAtZero) {
  const auto xs = LaplaceDraws(1.0, 3);
  const auto positive = std::count_if(xs.begin(), xs.end(),
                                      [](double x) { return x > 0; });
  EXPECT_NEAR(static_cast<double>(positive) / kDraws, 0.5, 0.005);
}

TEST(LaplaceTest, KolmogorovSmirnovAgainstCdf) {
  const double b = 0.7;
  auto xs = LaplaceDraws(b, 4);
  std::sort(xs.begin(), xs.end());
  double d = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = LaplaceCdf(xs[i], b);
    d = std::max({d, f - static_cast<double>(i) / kDraws,
                  static_cast<double>(i + 1) / kDraws - f});
  }
  EXPECT_LT(d, 0.002);
}

TEST(LaplaceTest, RejectsBadScale) {
  RngStream rng(1, 1);
  EXPECT_FALSE(SampleLaplace(0.0, rng).ok());
  EXPECT_FALSE(SampleLaplace(-1.0, rng).ok());
  EXPECT_FALSE(SampleLaplace(INFINITY, rng).ok());
}

TEST(UniformChoiceTest, Singleton) {
  RngStream rng(1, 1);
  const std::array<int, 1> one = {42};
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(*UniformChoice<int>(one, rng), 42);
  }
}

TEST(UniformChoiceTest, Empty) {
  RngStream rng(1, 1);
  EXPECT_FALSE(UniformChoice<int>(std::span<const int>(), rng).ok());
}

TEST(UniformChoiceTest, TwoItemsBalanced) {
  RngStream rng(5, 0);
  const std::array<int, 2> items = {0, 1};
  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += *UniformChoice<int>(items, rng);
  EXPECT_NEAR(static_cast<double>(ones) / kDraws, 0.5, 0.005);
}

TEST(UniformChoiceTest, FiveItemsChiSquare) {
  RngStream rng(6, 0);
  const std::array<int, 5> items = {0, 1, 2, 3, 4};
  std::array<int, 5> counts{};
  for (int i = 0; i < kDraws; ++i) ++counts[*UniformChoice<int>(items, rng)];
  const double expected = kDraws / 5.0;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 0.001 quantile of chi-square with 4 degrees of freedom.
  EXPECT_LT(chi2, 18.467);
}

TEST(RngStreamTest, Deterministic) {
  RngStream a(7, 1), b(7, 1);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RngStreamTest, StreamsDiffer) {
  RngStream a(7, 1), b(7, 2);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a() == b();
  EXPECT_EQ(same, 0);
}

TEST(RngStreamTest, StreamsUncorrelated) {
  RngStream a(7, 1), b(7, 2);
  constexpr int n = 100000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.UniformUnit();
    const double y = b.UniformUnit();
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double r = cov / std::sqrt((saa / n - sa * sa / n / n) *
                                   (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::fabs(r), 0.01);
}

TEST(RngStreamTest, UniformUnitInRange) {
  RngStream rng(9, 9);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.UniformUnit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(StableHashTest, FixedValues) {
  // FNV-1a 64-bit reference values.
  EXPECT_EQ(StableHash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(StableHash("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_NE(MixSeed(1, 0), MixSeed(1, 1));
  EXPECT_EQ(MixSeed(3, 4), MixSeed(3, 4));
}

}  // namespace
}  // namespace blender
