// Copyright 2026 The exprb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exprb/bpr.hpp"
#include "exprb/dataset.hpp"
#include "exprb/evalkit.hpp"
#include "exprb/rerank.hpp"
#include "exprb/types.hpp"

namespace exprb {

// Experiment description parsed from a `key = value` config file. Exactly
// one dataset source (files xor synth) must be set; all randomness flows
// from the single root seed.
struct ExperimentConfig {
  std::string interactions_path;
  std::string items_path;
  std::optional<SynthSpec> synth;  // seed is filled from the root seed

  double holdout = 0.2;
  TrainConfig train;

  std::size_t k = 10;
  std::size_t pool_size = 100;
  std::optional<double> lambda;  // fixed trade-off...
  std::optional<double> budget;  // ...or calibrate under an NDCG-loss budget
  double grid_step = 0.05;
  CalibrateMode calibrate_mode = CalibrateMode::kSmallestFeasible;

  std::vector<std::string> policies;  // cat | int | par | per | custom
  std::map<std::string, double> custom_target;  // target.<attr> entries
  std::string minority;  // empty: smallest catalog share wins
  std::uint64_t seed = 0;
  std::string out_dir;  // empty: nothing is written
  bool emit_id_map = false;

  void validate() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig load_config(const std::string& path);

// One evaluated (policy, lambda) run.
struct RunOutput {
  std::string label;  // "baseline" or the policy name
  double lambda;
  std::map<UserId, RankedList> rankings;  // top-k, original model scores
  MetricsReport report;
  // Mean Hellinger distance of this run's lists against the run's target,
  // and of the baseline lists against the same target. Unset for the
  // baseline run itself.
  std::optional<double> mean_hellinger;
  std::optional<double> baseline_mean_hellinger;
  // Mean target mass of the minority group (per-user for the per policy).
  std::optional<double> mean_target_minority;
};

struct ExperimentResult {
  std::vector<RunOutput> runs;  // runs[0] is the lambda=1 baseline
  std::size_t evaluated_users = 0;
  std::size_t excluded_users = 0;
  std::vector<double> train_losses;
};

// Full pipeline: ingest/synth -> split -> train -> score -> re-rank per
// policy -> evaluate. Writes model/scores/rankings/reports/summary under
// config.out_dir when set. Stage failures carry the stage name.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Standalone re-rank of a saved `user_id,item_id,score` file; shares the
// pipeline code path so stage-isolated runs reproduce run_experiment's
// rankings exactly. Writes rankings_<policy>.csv when out_dir is set.
std::map<UserId, RankedList> rerank_external(const ExperimentConfig& config,
                                             const std::string& scores_path,
                                             const std::string& policy,
                                             std::optional<double> lambda);

// Metrics for a saved rankings file, evaluated against the config's test
// split. Writes report.csv and summary.txt when out_dir is set.
MetricsReport evaluate_rankings(const ExperimentConfig& config,
                                const std::string& rankings_path);

// Trains the pipeline's recommender and grid-searches lambda for one policy.
CalibrationResult calibrate_policy(const ExperimentConfig& config,
                                   const std::string& policy);

// Train-only entry: fits the recommender, writes model.bin, scores.csv and
// the baseline rankings under out_dir, and reports the baseline metrics.
struct TrainOutput {
  std::vector<double> losses;
  MetricsReport baseline;
};
TrainOutput run_train(const ExperimentConfig& config);

// Rankings CSV (`user_id,rank,item_id,score`) round trip in original labels.
void write_rankings_csv(const std::map<UserId, RankedList>& rankings,
                        const InteractionLog& log, const std::string& path);
std::map<UserId, RankedList> load_rankings_csv(const std::string& path,
                                               const InteractionLog& log);

// Writes interactions.csv and items.csv for a synthesized dataset.
void write_synth_dataset(const SynthSpec& spec, const std::string& out_dir);

}  // namespace exprb
