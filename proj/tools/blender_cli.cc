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

// Command-line front end. Exit codes: 0 success, 1 configuration error,
// 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "blender/harness.hpp"
#include "blender/oracle.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int Fail(int code, const absl::Status& status) {
  std::cerr << "blender: " << status.message() << "\n";
  return code;
}

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  bool no_projection = false;
};

// Loads and validates the config; relative dataset paths resolve against
// the config file's directory.
absl::StatusOr<blender::ExperimentConfig> LoadConfig(const CommonFlags& f) {
  std::ifstream in(f.config);
  if (!in) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot open config '", f.config, "'"));
  }
  auto cfg = blender::ParseConfig(in);
  if (!cfg.ok()) return cfg.status();
  if (!cfg->dataset_path.empty()) {
    std::filesystem::path p(cfg->dataset_path);
    if (p.is_relative()) {
      cfg->dataset_path =
          (std::filesystem::path(f.config).parent_path() / p).string();
    }
  }
  if (f.seed.has_value()) cfg->seed = *f.seed;
  if (!f.out.empty()) cfg->output_dir = f.out;
  if (f.no_projection) cfg->project = false;
  if (auto s = cfg->Validate(); !s.ok()) return s;
  return cfg;
}

int RunCommand(const CommonFlags& flags) {
  auto cfg = LoadConfig(flags);
  if (!cfg.ok()) return Fail(kConfigError, cfg.status());
  auto ds = blender::LoadDataset(*cfg);
  if (!ds.ok()) return Fail(kRuntimeError, ds.status());
  const int threads = cfg->threads > 0
                          ? cfg->threads
                          : std::max(1u, std::thread::hardware_concurrency());
  auto run = blender::RunBlender(
      cfg->params, *ds, blender::RunOptions{cfg->seed, cfg->project, threads});
  if (!run.ok()) return Fail(kRuntimeError, run.status());
  if (auto s = blender::WriteRunArtifacts(*run, cfg->output_dir); !s.ok()) {
    return Fail(kRuntimeError, s);
  }
  const auto& m = run->metrics;
  std::cout << absl::StrFormat(
      "head list: %d queries, %d records; status %s\n", m.headlist_queries,
      run->optin.head_list.num_records(), m.status);
  if (m.l1.has_value()) {
    std::cout << absl::StrFormat("L1 %.6f  NDCG %.6f\n", *m.l1, *m.ndcg);
  }
  std::cout << "artifacts in " << cfg->output_dir << "\n";
  return kOk;
}

int SweepCommand(const CommonFlags& flags) {
  auto cfg = LoadConfig(flags);
  if (!cfg.ok()) return Fail(kConfigError, cfg.status());
  auto ds = blender::LoadDataset(*cfg);
  if (!ds.ok()) return Fail(kRuntimeError, ds.status());
  const auto rows = blender::Sweep(*cfg, *ds);
  std::error_code ec;
  std::filesystem::create_directories(cfg->output_dir, ec);
  const auto path = std::filesystem::path(cfg->output_dir) / "sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (ec || !out) {
    return Fail(kRuntimeError,
                absl::InternalError(absl::StrCat("cannot write ",
                                                 path.string())));
  }
  blender::WriteMetricsHeader(out);
  int failed = 0;
  for (const auto& row : rows) {
    blender::WriteMetricsRow(row, out);
    failed += row.status.rfind("error", 0) == 0;
  }
  std::cout << rows.size() << " cells (" << failed << " failed) written to "
            << path.string() << "\n";
  return kOk;
}

struct SynthFlags {
  int64_t users = 100000;
  int queries = 500;
  int urls = 4;
  double exponent = 1.0;
  uint64_t seed = 1;
  std::string out = "synth";
};

int SynthCommand(const SynthFlags& f) {
  blender::ExperimentConfig cfg;
  cfg.synth = blender::SynthSpec{f.users, f.queries, f.urls, f.exponent,
                                 f.seed};
  cfg.params = blender::PrivacyParams{};
  if (auto s = cfg.Validate(); !s.ok()) return Fail(kConfigError, s);
  auto ds = blender::LoadDataset(cfg);
  if (!ds.ok()) return Fail(kRuntimeError, ds.status());
  std::error_code ec;
  std::filesystem::create_directories(f.out, ec);
  std::ofstream log(std::filesystem::path(f.out) / "log.tsv",
                    std::ios::binary);
  std::ofstream truth(std::filesystem::path(f.out) / "truth.csv",
                      std::ios::binary);
  if (ec || !log || !truth) {
    return Fail(kRuntimeError, absl::InternalError(absl::StrCat(
                                   "cannot write into ", f.out)));
  }
  blender::SerializeLog(*ds, log);
  blender::WriteTruth(*ds->true_distribution, truth);
  std::cout << ds->users.size() << " users written to " << f.out << "\n";
  return kOk;
}

struct VerifyFlags {
  int k = 3;
  int kq = 3;
  double epsilon = 4;
  double delta = 1e-5;
  double f_client = 0.85;
};

int VerifyDpCommand(const VerifyFlags& f) {
  if (f.k < 1 || f.kq < 1) {
    return Fail(kConfigError, absl::InvalidArgumentError("k, kq must be >= 1"));
  }
  blender::PrivacyParams p;
  p.epsilon = f.epsilon;
  p.delta = f.delta;
  p.f_client = f.f_client;
  if (auto s = p.Validate(); !s.ok()) return Fail(kConfigError, s);
  const auto hl = blender::oracle::SyntheticAugmentedList(f.k, f.kq);
  auto model = blender::BuildReportModel(p, hl);
  if (!model.ok()) return Fail(kRuntimeError, model.status());
  auto v = blender::oracle::VerifyDp(*model, hl, p.epsilon_per_record(),
                                     p.delta_per_record());
  if (!v.ok()) return Fail(kRuntimeError, v.status());
  std::cout << absl::StrFormat("max violation %.6Le (%s)\n", *v,
                               *v <= 1e-10L ? "holds" : "VIOLATED");
  return kOk;
}

struct MetricsFlags {
  std::string estimate;
  std::string truth;
};

int MetricsCommand(const MetricsFlags& f) {
  std::ifstream est_in(f.estimate);
  std::ifstream truth_in(f.truth);
  if (!est_in || !truth_in) {
    return Fail(kConfigError,
                absl::InvalidArgumentError("cannot open the input files"));
  }
  auto est = blender::ReadBlendedCsv(est_in);
  if (!est.ok()) return Fail(kRuntimeError, est.status());
  auto truth = blender::ReadTruth(truth_in);
  if (!truth.ok()) return Fail(kRuntimeError, truth.status());
  auto score = blender::ScoreEstimate(*est, *truth);
  if (!score.ok()) return Fail(kRuntimeError, score.status());
  std::cout << "L1,NDCG\n"
            << blender::FormatDouble(score->l1) << ','
            << blender::FormatDouble(score->ndcg) << "\n";
  return kOk;
}

void AddCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config file")->required();
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--no-projection", f.no_projection,
                "Skip the simplex projection of blended estimates");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid-model private frequency estimation"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags;
  AddCommon(app.add_subcommand("run", "Run the pipeline once"), run_flags);
  AddCommon(app.add_subcommand("sweep", "Run a parameter sweep"),
            sweep_flags);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a Zipf query log");
  synth_cmd->add_option("--users", synth.users);
  synth_cmd->add_option("--queries", synth.queries);
  synth_cmd->add_option("--urls", synth.urls);
  synth_cmd->add_option("--exponent", synth.exponent);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out", synth.out);

  VerifyFlags verify;
  auto* verify_cmd =
      app.add_subcommand("verify-dp", "Exact privacy check of the randomizer");
  verify_cmd->add_option("--k", verify.k, "Queries, including *");
  verify_cmd->add_option("--kq", verify.kq, "URLs per real query, with *");
  verify_cmd->add_option("--epsilon", verify.epsilon);
  verify_cmd->add_option("--delta", verify.delta);
  verify_cmd->add_option("--f-c", verify.f_client, "Query budget fraction");

  MetricsFlags metrics;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "Score a blended CSV against a truth CSV");
  metrics_cmd->add_option("--estimate", metrics.estimate)->required();
  metrics_cmd->add_option("--truth", metrics.truth)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  if (name == "run") return RunCommand(run_flags);
  if (name == "sweep") return SweepCommand(sweep_flags);
  if (name == "synth") return SynthCommand(synth);
  if (name == "verify-dp") return VerifyDpCommand(verify);
  return MetricsCommand(metrics);
}
