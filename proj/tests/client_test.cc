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

#include "blender/client.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gtest/gtest.h"

namespace blender {
namespace {

const std::string kStar(kWildcard);

HeadList FinalList() {
  HeadList hl(HeadListStage::kFinal);
  hl.Add(Record{"a", "a1"});
  hl.Add(Record{"a", "a2"});
  hl.Add(Record{"b", "b1"});
  hl.Add(Record::Star());
  return hl;
}

// Two queries with two URLs each and hand-picked channel parameters.
struct SmallChannel {
  HeadList hl{HeadListStage::kClientAugmented};
  ReportModel model;

  SmallChannel(double t, double t_q) {
    hl.Add(Record{"x", "x1"});
    hl.Add(Record{"x", "x2"});
    hl.Add(Record{"y", "y1"});
    hl.Add(Record{"y", "y2"});
    model.k = 2;
    model.t = t;
    model.k_q = {2, 2};
    model.t_q = {t_q, t_q};
    model.query_forced = false;
  }
};

TEST(TruthProbabilityTest, SpecValues) {
  EXPECT_DOUBLE_EQ(TruthProbability(0, 0, 2), 0.5);
  EXPECT_NEAR(TruthProbability(3.4, 8.5e-6, 10), 0.76902, 1e-5);
  EXPECT_DOUBLE_EQ(TruthProbability(1.0, 1e-5, 1), 1.0);
}

TEST(BuildReportModelTest, DefaultBudgets) {
  PrivacyParams p;
  const HeadList hl = AugmentForClients(FinalList());
  auto m = BuildReportModel(p, hl);
  ASSERT_TRUE(m.ok()) << m.status();
  EXPECT_EQ(m->k, 3);
  EXPECT_FALSE(m->query_forced);
  EXPECT_NEAR(m->t, TruthProbability(3.4, 8.5e-6, 3), 1e-15);
  // a: a1, a2, *; b: b1, *; star query: * only.
  EXPECT_EQ(m->k_q, (std::vector<int>{3, 2, 1}));
  EXPECT_DOUBLE_EQ(m->t_q[2], 1.0);
}

TEST(BuildReportModelTest, RejectsNonAugmentedList) {
  PrivacyParams p;
  EXPECT_FALSE(BuildReportModel(p, FinalList()).ok());
}

TEST(LocalPrivatizeTest, SingleQueryAlwaysStar) {
  PrivacyParams p;
  HeadList final_list(HeadListStage::kFinal);
  final_list.Add(Record::Star());
  const HeadList hl = AugmentForClients(final_list);
  auto m = BuildReportModel(p, hl);
  ASSERT_TRUE(m.ok());
  EXPECT_TRUE(m->query_forced);
  RngStream rng(1, 1);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(LocalPrivatize(Record{"any", "thing"}, *m, hl, rng),
              Record::Star());
  }
}

TEST(LocalPrivatizeTest, TruthfulFrequency) {
  PrivacyParams p;
  const HeadList hl = AugmentForClients(FinalList());
  const ReportModel m = *BuildReportModel(p, hl);
  const Record input{"a", "a1"};
  RngStream rng(2, 0);
  int truthful = 0;
  constexpr int kDraws = 1000000;
  for (int i = 0; i < kDraws; ++i) {
    truthful += LocalPrivatize(input, m, hl, rng) == input;
  }
  const double expected = m.t * m.t_q[0];
  EXPECT_NEAR(static_cast<double>(truthful) / kDraws, expected, 0.003);
}

TEST(LocalPrivatizeTest, OutputsAreOnTheList) {
  PrivacyParams p;
  const HeadList hl = AugmentForClients(FinalList());
  const ReportModel m = *BuildReportModel(p, hl);
  RngStream rng(3, 0);
  for (int i = 0; i < 10000; ++i) {
    const Record out = LocalPrivatize(Record{"a", "unlisted"}, m, hl, rng);
    ASSERT_TRUE(hl.Contains(out)) << out;
  }
}

TEST(DenoiseQueryTest, SpecValues) {
  EXPECT_NEAR(*DenoiseQuery(0.4, 0.6, 3), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(*DenoiseQuery(0.37, 1.0, 5), 0.37);
}

TEST(DenoiseQueryTest, InvertsForwardMap) {
  for (int k : {2, 3, 10}) {
    for (double t : {0.55, 0.8, 0.99}) {
      for (double p : {0.0, 0.1, 0.5, 0.93}) {
        const double r = t * p + (1 - t) * (1 - p) / (k - 1);
        EXPECT_NEAR(*DenoiseQuery(r, t, k), p, 1e-12);
      }
    }
  }
}

TEST(DenoiseQueryTest, RejectsUninformativeChannel) {
  EXPECT_FALSE(DenoiseQuery(0.5, 0.5, 2).ok());
  EXPECT_FALSE(DenoiseQuery(0.5, 0.9, 1).ok());
}

TEST(DenoiseRecordTest, SmallInstanceRoundTrip) {
  // k = 2, k_q = 2, t = 0.8, t_q = 0.7, p = [0.4, 0.1, 0.3, 0.2].
  const double t = 0.8, tq = 0.7;
  const double p[2][2] = {{0.4, 0.1}, {0.3, 0.2}};
  const QuerySlice s{t, tq, 2, 2};
  for (int q = 0; q < 2; ++q) {
    const double pq = p[q][0] + p[q][1];
    const double r_q = t * pq + (1 - t) * (1 - pq);
    const double p_q = *DenoiseQuery(r_q, t, 2);
    for (int u = 0; u < 2; ++u) {
      const double r = t * tq * p[q][u] + t * (1 - tq) * p[q][1 - u] +
                       (1 - t) * (1 - pq) / 2;
      EXPECT_NEAR(*DenoiseRecord(r, p_q, s), p[q][u], 1e-12);
    }
  }
}

TEST(DenoiseRecordTest, IdentityChannel) {
  const QuerySlice s{1.0, 1.0, 4, 3};
  EXPECT_DOUBLE_EQ(*DenoiseRecord(0.2, 0.5, s), 0.2);
}

TEST(ClientVarianceTest, QuerySpecValue) {
  EXPECT_NEAR(*ClientQueryVariance(0.5, 10000, 0.75, 3), 6.4006e-5, 0.0001e-5);
}

TEST(ClientVarianceTest, RecordVarianceNonNegative) {
  const QuerySlice s{0.77, 0.56, 51, 5};
  for (double r_q : {0.0, 0.01, 0.3, 1.0}) {
    for (double frac : {0.0, 0.2, 1.0}) {
      auto v = ClientRecordVariance(frac * r_q, r_q, 1000, s);
      ASSERT_TRUE(v.ok());
      EXPECT_GE(*v, 0.0);
    }
  }
}

TEST(ClientVarianceTest, RecordVarianceCalibrated) {
  PrivacyParams p;
  const HeadList hl = AugmentForClients(FinalList());
  const ReportModel m = *BuildReportModel(p, hl);
  const std::vector<std::pair<Record, int>> population = {
      {{"a", "a1"}, 1500}, {{"a", "a2"}, 500}, {{"b", "b1"}, 2000},
      {Record::Star(), 1000}};
  const Record target{"a", "a1"};
  constexpr int kReps = 2000;
  double sum = 0, sq = 0, reported = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    RngStream rng(rep, 77);
    ReportAggregator agg(hl);
    for (const auto& [r, n] : population) {
      for (int i = 0; i < n; ++i) {
        ASSERT_TRUE(agg.Add(LocalPrivatize(r, m, hl, rng)).ok());
      }
    }
    auto est = EstimateClientProbabilities(agg, m);
    ASSERT_TRUE(est.ok());
    const Estimate e = *est->record(target);
    sum += e.p;
    sq += e.p * e.p;
    reported += e.var;
  }
  const double mean = sum / kReps;
  const double empirical = (sq - kReps * mean * mean) / (kReps - 1);
  EXPECT_NEAR(mean, 0.3, 4 * std::sqrt(empirical / kReps));
  EXPECT_NEAR(empirical / (reported / kReps), 1.0, 0.15);
}

TEST(EstimateClientTest, DeterministicChannelRecoversPointMass) {
  SmallChannel ch(1.0, 1.0);
  std::vector<Record> reports(50, Record{"y", "y1"});
  auto est = EstimateClientProbabilities(reports, ch.hl, ch.model);
  ASSERT_TRUE(est.ok()) << est.status();
  for (const auto& [r, e] : est->records()) {
    EXPECT_DOUBLE_EQ(e.p, (r == Record{"y", "y1"}) ? 1.0 : 0.0) << r;
  }
}

TEST(EstimateClientTest, ForcedModelPutsAllMassOnStar) {
  PrivacyParams p;
  HeadList final_list(HeadListStage::kFinal);
  final_list.Add(Record::Star());
  const HeadList hl = AugmentForClients(final_list);
  const ReportModel m = *BuildReportModel(p, hl);
  std::vector<Record> reports(3, Record::Star());
  auto est = EstimateClientProbabilities(reports, hl, m);
  ASSERT_TRUE(est.ok());
  EXPECT_DOUBLE_EQ(est->record(Record::Star())->p, 1.0);
}

TEST(ReportAggregatorTest, RejectsOffListReports) {
  const HeadList hl = AugmentForClients(FinalList());
  ReportAggregator agg(hl);
  EXPECT_FALSE(agg.Add(Record{"zzz", "a1"}).ok());
  EXPECT_FALSE(agg.Add(Record{"a", "b1"}).ok());
  EXPECT_TRUE(agg.Add(Record{"a", kStar}).ok());
  EXPECT_EQ(agg.total(), 1);
}

TEST(ReportAggregatorTest, MergeEqualsSequential) {
  const HeadList hl = AugmentForClients(FinalList());
  const auto records = hl.Records();
  ReportAggregator all(hl), left(hl), right(hl);
  for (size_t i = 0; i < 100; ++i) {
    const Record& r = records[(i * 7) % records.size()];
    ASSERT_TRUE(all.Add(r).ok());
    ASSERT_TRUE((i < 40 ? left : right).Add(r).ok());
  }
  ASSERT_TRUE(left.Merge(right).ok());
  EXPECT_EQ(left.total(), all.total());
  for (size_t qi = 0; qi < hl.num_queries(); ++qi) {
    EXPECT_EQ(left.query_count(qi), all.query_count(qi));
    for (size_t ui = 0; ui < hl.entries()[qi].urls.size(); ++ui) {
      EXPECT_EQ(left.count(qi, ui), all.count(qi, ui));
    }
  }
}

TEST(ReportStreamTest, RoundTrip) {
  const HeadList hl = AugmentForClients(FinalList());
  std::stringstream ss;
  WriteReport(ss, "u1", Record{"a", "a1"});
  WriteReport(ss, "u2", Record::Star());
  WriteReport(ss, "u3", Record{"b", kStar});
  auto agg = ReadReportStream(ss, hl);
  ASSERT_TRUE(agg.ok()) << agg.status();
  EXPECT_EQ(agg->total(), 3);
  EXPECT_EQ(agg->query_count(*hl.QueryIndex(kStar)), 1);
}

TEST(ReportStreamTest, NamesBadLine) {
  const HeadList hl = AugmentForClients(FinalList());
  std::stringstream ss("u1\ta\ta1\nu2\ta\n");
  auto agg = ReadReportStream(ss, hl);
  ASSERT_FALSE(agg.ok());
  EXPECT_NE(agg.status().message().find("line 2"), std::string::npos);
}

}  // namespace
}  // namespace blender
