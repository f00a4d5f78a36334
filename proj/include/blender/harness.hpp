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

// End-to-end pipeline: partition, curator head list and estimates, client
// randomization and denoising, blending, and scoring. Also the experiment
// configuration format and parameter sweeps.

#ifndef BLENDER_HARNESS_HPP_
#define BLENDER_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "blender/blend.hpp"
#include "blender/client.hpp"
#include "blender/core.hpp"
#include "blender/csv.hpp"
#include "blender/data.hpp"
#include "blender/metrics.hpp"
#include "blender/optin.hpp"
#include "blender/sampling.hpp"

namespace blender {

struct SynthSpec {
  int64_t users = 100000;
  int queries = 500;
  int urls = 4;
  double exponent = 1.0;
  uint64_t seed = 1;
};

struct SweepAxes {
  std::vector<double> epsilon;
  std::vector<double> optin_fraction;
  std::vector<int> max_queries;
  int replicates = 1;
};

struct ExperimentConfig {
  PrivacyParams params;
  std::string dataset_path;
  std::optional<SynthSpec> synth;
  uint64_t seed = 1;
  SweepAxes sweep;
  std::string output_dir = "blender_out";
  bool project = true;
  // 0 means one per hardware thread.
  int threads = 0;

  absl::Status Validate() const {
    if (auto s = params.Validate(); !s.ok()) return s;
    if (auto th = ComputeThreshold(params); !th.ok()) return th.status();
    if (dataset_path.empty() == !synth.has_value()) {
      return absl::InvalidArgumentError(
          "exactly one of 'dataset' or the synth_* keys must be set");
    }
    if (synth.has_value()) {
      if (synth->users < 1 || synth->queries < 1 || synth->urls < 1 ||
          !(synth->exponent >= 0)) {
        return absl::InvalidArgumentError("invalid synthetic dataset spec");
      }
    }
    for (double eps : sweep.epsilon) {
      PrivacyParams p = params;
      p.epsilon = eps;
      if (auto s = p.Validate(); !s.ok()) return s;
      if (auto th = ComputeThreshold(p); !th.ok()) return th.status();
    }
    for (double f : sweep.optin_fraction) {
      if (!(f > 0 && f < 1)) {
        return absl::InvalidArgumentError("sweep optin_fraction outside (0,1)");
      }
    }
    for (int m : sweep.max_queries) {
      if (m < 1) return absl::InvalidArgumentError("sweep M must be >= 1");
    }
    if (sweep.replicates < 1) {
      return absl::InvalidArgumentError("replicates must be >= 1");
    }
    if (threads < 0) return absl::InvalidArgumentError("threads must be >= 0");
    return absl::OkStatus();
  }
};

namespace internal {

template <class T>
absl::Status ParseNumber(std::string_view key, std::string_view text, T* out) {
  bool ok;
  if constexpr (std::is_same_v<T, double>) {
    ok = absl::SimpleAtod(AbslView(text), out);
  } else if constexpr (std::is_same_v<T, bool>) {
    ok = absl::SimpleAtob(AbslView(text), out);
  } else {
    ok = absl::SimpleAtoi(AbslView(text), out);
  }
  if (!ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad value for '", AbslView(key), "': '",
                     AbslView(text), "'"));
  }
  return absl::OkStatus();
}

template <class T>
absl::Status ParseList(std::string_view key, std::string_view text,
                       std::vector<T>* out) {
  out->clear();
  for (absl::string_view item :
       absl::StrSplit(AbslView(text), ',',
                      absl::SkipWhitespace())) {
    T v;
    const auto trimmed = absl::StripAsciiWhitespace(item);
    if (auto s = ParseNumber(key, std::string_view(trimmed.data(),
                                                   trimmed.size()),
                             &v);
        !s.ok()) {
      return s;
    }
    out->push_back(v);
  }
  if (out->empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("sweep axis '", AbslView(key), "' is empty"));
  }
  return absl::OkStatus();
}

}  // namespace internal

/// Parses the flat `key = value` config format. A `[sweep]` section holds
/// comma-separated axis values. Keys follow the pipeline's symbol names:
/// epsilon, delta, m_O, m_C, f_O, f_C, M, optin_fraction.
inline absl::StatusOr<ExperimentConfig> ParseConfig(std::istream& is) {
  ExperimentConfig cfg;
  SynthSpec synth;
  bool any_synth = false;
  bool synth_seed_set = false;
  std::string section;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view body = line;
    if (const size_t hash = body.find('#'); hash != body.npos) {
      body = body.substr(0, hash);
    }
    body = TrimWhitespace(body);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        return absl::InvalidArgumentError(
            absl::StrCat("config line ", line_no, ": malformed section"));
      }
      section = std::string(TrimWhitespace(body.substr(1, body.size() - 2)));
      if (section != "sweep") {
        return absl::InvalidArgumentError(absl::StrCat(
            "config line ", line_no, ": unknown section [", section, "]"));
      }
      continue;
    }
    const size_t eq = body.find('=');
    if (eq == body.npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_no, ": expected key = value"));
    }
    const std::string key(TrimWhitespace(body.substr(0, eq)));
    const std::string_view value = TrimWhitespace(body.substr(eq + 1));
    auto located = [&](absl::Status s) {
      if (s.ok()) return s;
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_no, ": ", s.message()));
    };
    absl::Status s;
    if (section == "sweep") {
      if (key == "epsilon") {
        s = internal::ParseList(key, value, &cfg.sweep.epsilon);
      } else if (key == "optin_fraction") {
        s = internal::ParseList(key, value, &cfg.sweep.optin_fraction);
      } else if (key == "M") {
        s = internal::ParseList(key, value, &cfg.sweep.max_queries);
      } else if (key == "replicates") {
        s = internal::ParseNumber(key, value, &cfg.sweep.replicates);
      } else {
        s = absl::InvalidArgumentError(
            absl::StrCat("unknown sweep key '", key, "'"));
      }
      if (auto e = located(s); !e.ok()) return e;
      continue;
    }
    auto& p = cfg.params;
    if (key == "epsilon") {
      s = internal::ParseNumber(key, value, &p.epsilon);
    } else if (key == "delta") {
      s = internal::ParseNumber(key, value, &p.delta);
    } else if (key == "m_O") {
      s = internal::ParseNumber(key, value, &p.m_optin);
    } else if (key == "m_C") {
      s = internal::ParseNumber(key, value, &p.m_client);
    } else if (key == "f_O") {
      s = internal::ParseNumber(key, value, &p.f_optin);
    } else if (key == "f_C") {
      s = internal::ParseNumber(key, value, &p.f_client);
    } else if (key == "M") {
      s = internal::ParseNumber(key, value, &p.max_queries);
    } else if (key == "optin_fraction") {
      s = internal::ParseNumber(key, value, &p.optin_fraction);
    } else if (key == "seed") {
      s = internal::ParseNumber(key, value, &cfg.seed);
    } else if (key == "projection") {
      s = internal::ParseNumber(key, value, &cfg.project);
    } else if (key == "threads") {
      s = internal::ParseNumber(key, value, &cfg.threads);
    } else if (key == "output_dir") {
      cfg.output_dir = std::string(value);
    } else if (key == "dataset") {
      cfg.dataset_path = std::string(value);
    } else if (key == "synth_users") {
      any_synth = true;
      s = internal::ParseNumber(key, value, &synth.users);
    } else if (key == "synth_queries") {
      any_synth = true;
      s = internal::ParseNumber(key, value, &synth.queries);
    } else if (key == "synth_urls") {
      any_synth = true;
      s = internal::ParseNumber(key, value, &synth.urls);
    } else if (key == "synth_exponent") {
      any_synth = true;
      s = internal::ParseNumber(key, value, &synth.exponent);
    } else if (key == "synth_seed") {
      any_synth = true;
      synth_seed_set = true;
      s = internal::ParseNumber(key, value, &synth.seed);
    } else {
      s = absl::InvalidArgumentError(absl::StrCat("unknown key '", key, "'"));
    }
    if (auto e = located(s); !e.ok()) return e;
  }
  if (any_synth) {
    if (!synth_seed_set) synth.seed = cfg.seed;
    cfg.synth = synth;
  }
  return cfg;
}

inline absl::StatusOr<Dataset> LoadDataset(const ExperimentConfig& cfg) {
  if (cfg.synth.has_value()) {
    RngStream rng = Substream(cfg.synth->seed, /*stream_id=*/0x5717);
    return SynthZipf(cfg.synth->users, cfg.synth->queries, cfg.synth->urls,
                     cfg.synth->exponent, rng);
  }
  std::ifstream in(cfg.dataset_path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open dataset '", cfg.dataset_path, "'"));
  }
  return ParseLog(in);
}

struct MetricsRow {
  double epsilon = 0;
  double delta = 0;
  double optin_pct = 0;
  int max_queries = 0;
  std::optional<double> l1;
  std::optional<double> ndcg;
  uint64_t seed = 0;
  int headlist_queries = 0;
  std::string status = "ok";
};

struct RunOptions {
  uint64_t seed = 1;
  bool project = true;
  int threads = 1;
};

struct RunResult {
  OptinOutput optin;
  HeadList augmented{HeadListStage::kClientAugmented};
  ReportModel model;
  std::vector<UserRecord> reports;  // client order
  EstimateVector client;            // over the augmented list
  BlendedOutput blended;
  MetricsRow metrics;
};

/// Truth restricted to the scored records and turned into rankings.
struct ScoredMetrics {
  double l1 = 0;
  double ndcg = 0;
};

/// L1 and generalized NDCG of estimated record probabilities against a
/// reference distribution. Both sides are restricted to the non-wildcard
/// records of the estimate and rescaled to sum to one.
inline absl::StatusOr<ScoredMetrics> ScoreEstimate(
    std::span<const std::pair<Record, double>> estimate,
    const std::map<Record, double>& truth) {
  std::vector<std::pair<Record, double>> truth_rows;
  for (const auto& [r, p] : estimate) {
    if (IsWildcard(r.query) || IsWildcard(r.url)) continue;
    auto it = truth.find(r);
    truth_rows.emplace_back(r, it == truth.end() ? 0.0 : it->second);
  }
  auto est_ranked = StripStarsAndRescale(estimate);
  if (!est_ranked.ok()) return est_ranked.status();
  auto truth_ranked = StripStarsAndRescale(truth_rows);
  if (!truth_ranked.ok()) {
    return absl::FailedPreconditionError(
        "reference distribution has no mass on the head list");
  }
  std::map<Record, double> est_map, truth_map;
  for (const auto& q : est_ranked->queries) {
    for (const auto& [u, p] : q.urls) est_map[Record{q.query, u}] = p;
  }
  for (const auto& q : truth_ranked->queries) {
    for (const auto& [u, p] : q.urls) truth_map[Record{q.query, u}] = p;
  }
  auto l1 = L1Distance(est_map, truth_map);
  if (!l1.ok()) return l1.status();
  auto ndcg = GeneralizedNdcg(*est_ranked, *truth_ranked);
  if (!ndcg.ok()) return ndcg.status();
  return ScoredMetrics{*l1, *ndcg};
}

namespace internal {

// Stream ids for the curator-side draws; clients hash their user id.
inline constexpr uint64_t kPartitionStream = 1;
inline constexpr uint64_t kSampleStream = 2;
inline constexpr uint64_t kHeadListStream = 3;
inline constexpr uint64_t kOptinStream = 4;
inline constexpr uint64_t kClientSalt = 5;

inline absl::Status Privatize(const ClientGroup& clients,
                              const ReportModel& model, const HeadList& hl,
                              uint64_t seed, int threads,
                              std::vector<UserRecord>* reports,
                              ReportAggregator* agg) {
  const size_t n = clients.rows.size();
  reports->assign(n, UserRecord{});
  const uint64_t client_seed = MixSeed(seed, kClientSalt);
  const size_t workers =
      std::max<size_t>(1, std::min<size_t>(threads, n / 1024 + 1));
  std::vector<ReportAggregator> partial(workers, ReportAggregator(hl));
  std::vector<absl::Status> status(workers);
  auto work = [&](size_t w) {
    const size_t begin = n * w / workers;
    const size_t end = n * (w + 1) / workers;
    for (size_t i = begin; i < end; ++i) {
      const auto& row = clients.rows[i];
      RngStream rng = Substream(client_seed, StableHash(row.user_id));
      Record report = LocalPrivatize(row.record, model, hl, rng);
      if (auto s = partial[w].Add(report); !s.ok()) {
        status[w] = s;
        return;
      }
      (*reports)[i] = UserRecord{row.user_id, std::move(report)};
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (size_t w = 0; w < workers; ++w) {
    if (!status[w].ok()) return status[w];
    if (auto s = agg->Merge(partial[w]); !s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace internal

/// Runs the whole pipeline once.
///
/// Users are partitioned into S, T and C, one record is sampled per user,
/// S builds the head list, T estimates and trims it, C privatizes against
/// the augmented list, and the two estimate vectors are blended. When a
/// reference distribution is available (synthetic truth, or else the
/// per-user sample of the whole dataset) the result is scored.
inline absl::StatusOr<RunResult> RunBlender(const PrivacyParams& params,
                                            const Dataset& ds,
                                            const RunOptions& options) {
  if (auto s = params.Validate(); !s.ok()) return s;
  if (auto th = ComputeThreshold(params); !th.ok()) return th.status();
  if (ds.users.empty()) {
    return absl::InvalidArgumentError("dataset has no users");
  }
  for (const auto& u : ds.users) {
    if (u.records.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("user '", u.user_id, "' has no records"));
    }
  }

  RngStream partition_rng = Substream(options.seed, internal::kPartitionStream);
  auto part = PartitionUsers(ds, params.optin_fraction, params.f_optin,
                             partition_rng);
  if (!part.ok()) return part.status();

  // m_O = m_C = 1: exactly one sampled record per user, aligned with users.
  RngStream sample_rng = Substream(options.seed, internal::kSampleStream);
  const auto sampled = SamplePerUser(ds, 1, sample_rng);

  HeadListGroup s_group;
  EstimationGroup t_group;
  ClientGroup c_group;
  for (size_t i : part->head_list) s_group.rows.push_back(sampled[i]);
  for (size_t i : part->estimation) t_group.rows.push_back(sampled[i]);
  for (size_t i : part->client) c_group.rows.push_back(sampled[i]);

  RunResult result;
  RngStream hl_rng = Substream(options.seed, internal::kHeadListStream);
  auto initial = CreateHeadList(params, s_group, hl_rng);
  if (!initial.ok()) return initial.status();
  if (initial->num_real_queries() == 0) {
    return absl::FailedPreconditionError(
        "head list is empty after thresholding (stage: head-list creation "
        "from the S group)");
  }

  RngStream optin_rng = Substream(options.seed, internal::kOptinStream);
  auto optin = EstimateOptinProbabilities(params, t_group, *initial, optin_rng);
  if (!optin.ok()) return optin.status();
  result.optin = *std::move(optin);
  if (result.optin.head_list.num_real_queries() == 0) {
    return absl::FailedPreconditionError(
        "head list is empty after trimming (stage: opt-in estimation)");
  }

  result.augmented = AugmentForClients(result.optin.head_list);
  auto model = BuildReportModel(params, result.augmented);
  if (!model.ok()) return model.status();
  result.model = *std::move(model);

  ReportAggregator agg(result.augmented);
  if (auto s = internal::Privatize(c_group, result.model, result.augmented,
                                   options.seed, std::max(1, options.threads),
                                   &result.reports, &agg);
      !s.ok()) {
    return s;
  }
  auto client = EstimateClientProbabilities(agg, result.model);
  if (!client.ok()) return client.status();
  result.client = *std::move(client);

  auto client_final = RestrictToHeadList(result.client, result.optin.head_list);
  if (!client_final.ok()) return client_final.status();
  auto blended =
      BlendProbabilities(result.optin.estimates, *client_final,
                         result.optin.head_list, BlendOptions{options.project});
  if (!blended.ok()) return blended.status();
  result.blended = *std::move(blended);

  MetricsRow& row = result.metrics;
  row.epsilon = params.epsilon;
  row.delta = params.delta;
  row.optin_pct = params.optin_fraction * 100;
  row.max_queries = params.max_queries;
  row.seed = options.seed;
  row.headlist_queries =
      static_cast<int>(result.optin.head_list.num_real_queries());
  if (row.headlist_queries < params.max_queries) row.status = "headlist_short";

  const std::map<Record, double> truth =
      ds.true_distribution.has_value()
          ? *ds.true_distribution
          : EmpiricalDistribution(sampled);
  std::vector<std::pair<Record, double>> estimate;
  for (const auto& b : result.blended.records) {
    estimate.emplace_back(b.record, b.p);
  }
  auto scored = ScoreEstimate(estimate, truth);
  if (scored.ok()) {
    row.l1 = scored->l1;
    row.ndcg = scored->ndcg;
  }
  return result;
}

inline std::string FormatDouble(double v) {
  return absl::StrFormat("%.17g", v);
}

inline void WriteEstimatesCsv(const EstimateVector& est, std::ostream& os) {
  os << "query,url,p_hat,var_hat\n";
  for (const auto& [r, e] : est.records()) {
    os << CsvRow({EncodeField(r.query), EncodeField(r.url), FormatDouble(e.p),
                  FormatDouble(e.var)});
  }
}

inline void WriteBlendedCsv(const BlendedOutput& out, std::ostream& os) {
  os << "query,url,p_blend,w,p_optin,var_optin,p_client,var_client\n";
  for (const auto& b : out.records) {
    os << CsvRow({EncodeField(b.record.query), EncodeField(b.record.url),
                  FormatDouble(b.p), FormatDouble(b.w), FormatDouble(b.optin.p),
                  FormatDouble(b.optin.var), FormatDouble(b.client.p),
                  FormatDouble(b.client.var)});
  }
}

/// Reads the `p_blend` column of a blended CSV as (record, probability).
inline absl::StatusOr<std::vector<std::pair<Record, double>>> ReadBlendedCsv(
    std::istream& is) {
  auto table = ReadCsv(is);
  if (!table.ok()) return table.status();
  auto q = table->Column("query");
  auto u = table->Column("url");
  auto p = table->Column("p_blend");
  if (!q.ok() || !u.ok() || !p.ok()) {
    return absl::InvalidArgumentError(
        "blended CSV needs query,url,p_blend columns");
  }
  std::vector<std::pair<Record, double>> out;
  for (size_t i = 0; i < table->rows.size(); ++i) {
    auto v = table->Double(i, *p);
    if (!v.ok()) return v.status();
    out.emplace_back(Record{DecodeField(table->rows[i][*q]),
                            DecodeField(table->rows[i][*u])},
                     *v);
  }
  return out;
}

inline void WriteMetricsHeader(std::ostream& os) {
  os << "epsilon,delta,optin_pct,M,L1,NDCG,seed,headlist_queries,status\n";
}

inline void WriteMetricsRow(const MetricsRow& row, std::ostream& os) {
  os << CsvRow({FormatDouble(row.epsilon), FormatDouble(row.delta),
                FormatDouble(row.optin_pct), absl::StrCat(row.max_queries),
                row.l1.has_value() ? FormatDouble(*row.l1) : "",
                row.ndcg.has_value() ? FormatDouble(*row.ndcg) : "",
                absl::StrCat(row.seed), absl::StrCat(row.headlist_queries),
                row.status});
}

/// Writes every artifact of a run into `dir`.
inline absl::Status WriteRunArtifacts(const RunResult& result,
                                      const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create '", dir, "': ", ec.message()));
  }
  auto open = [&](const char* name, std::ofstream& f) {
    f.open(std::filesystem::path(dir) / name, std::ios::binary);
    return f.good();
  };
  std::ofstream headlist, optin, client, blended, metrics, reports;
  if (!open("headlist.tsv", headlist) || !open("optin_estimates.csv", optin) ||
      !open("client_estimates.csv", client) ||
      !open("blended.csv", blended) || !open("metrics.csv", metrics) ||
      !open("reports.tsv", reports)) {
    return absl::InternalError(absl::StrCat("cannot write into '", dir, "'"));
  }
  WriteHeadList(result.optin.head_list, headlist);
  WriteEstimatesCsv(result.optin.estimates, optin);
  WriteEstimatesCsv(result.client, client);
  WriteBlendedCsv(result.blended, blended);
  WriteMetricsHeader(metrics);
  WriteMetricsRow(result.metrics, metrics);
  for (const auto& r : result.reports) WriteReport(reports, r.user_id, r.record);
  for (auto* f : {&headlist, &optin, &client, &blended, &metrics, &reports}) {
    f->flush();
    if (!f->good()) return absl::InternalError("write failed");
  }
  return absl::OkStatus();
}

/// One pipeline run per cell of the Cartesian product of the sweep axes and
/// replicates. Replicate r uses seed MixSeed(seed, r) in every cell, so
/// cells differ only in the swept parameter. Failures are recorded in the
/// row status and the sweep continues.
inline std::vector<MetricsRow> Sweep(const ExperimentConfig& cfg,
                                     const Dataset& ds) {
  const auto& axes = cfg.sweep;
  const std::vector<double> eps =
      axes.epsilon.empty() ? std::vector<double>{cfg.params.epsilon}
                           : axes.epsilon;
  const std::vector<double> optin =
      axes.optin_fraction.empty()
          ? std::vector<double>{cfg.params.optin_fraction}
          : axes.optin_fraction;
  const std::vector<int> ms = axes.max_queries.empty()
                                  ? std::vector<int>{cfg.params.max_queries}
                                  : axes.max_queries;
  struct Cell {
    PrivacyParams params;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int rep = 0; rep < axes.replicates; ++rep) {
    for (double e : eps) {
      for (double f : optin) {
        for (int m : ms) {
          PrivacyParams p = cfg.params;
          p.epsilon = e;
          p.optin_fraction = f;
          p.max_queries = m;
          cells.push_back(Cell{p, MixSeed(cfg.seed, rep)});
        }
      }
    }
  }
  std::vector<MetricsRow> rows(cells.size());
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const size_t workers = std::clamp<size_t>(
      cfg.threads > 0 ? cfg.threads : std::max(hw, 1), 1, cells.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      auto run = RunBlender(cell.params, ds,
                            RunOptions{cell.seed, cfg.project, /*threads=*/1});
      if (run.ok()) {
        rows[i] = run->metrics;
        continue;
      }
      MetricsRow& row = rows[i];
      row.epsilon = cell.params.epsilon;
      row.delta = cell.params.delta;
      row.optin_pct = cell.params.optin_fraction * 100;
      row.max_queries = cell.params.max_queries;
      row.seed = cell.seed;
      row.status = absl::StrCat("error: ", run.status().message());
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

}  // namespace blender

#endif  // BLENDER_HARNESS_HPP_
