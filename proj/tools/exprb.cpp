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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "exprb/harness.hpp"

namespace {

using namespace exprb;

struct DataFlags {
  std::string interactions;
  std::string items;
  double holdout = 0.2;
  std::string minority;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--interactions", flags.interactions,
                  "interactions CSV (user_id,item_id,timestamp)")
      ->required();
  cmd->add_option("--items", flags.items,
                  "items CSV (item_id,provider_id,attribute,categories)")
      ->required();
  cmd->add_option("--holdout", flags.holdout,
                  "temporal test fraction per user");
  cmd->add_option("--minority", flags.minority,
                  "minority attribute value (default: smallest catalog share)");
}

ExperimentConfig config_from_flags(const DataFlags& flags) {
  ExperimentConfig config;
  config.interactions_path = flags.interactions;
  config.items_path = flags.items;
  config.holdout = flags.holdout;
  config.minority = flags.minority;
  return config;
}

void print_summary_line(const std::string& label, const MetricsReport& r) {
  std::printf("%-24s ndcg=%.4f e_minority=%.4f cov=%.4f div=%.4f nov=%.4f\n",
              label.c_str(), r.aggregate.ndcg, r.aggregate.minority_exposure,
              r.aggregate.coverage, r.aggregate.diversity,
              r.aggregate.novelty);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exposure-aware re-ranking for implicit-feedback recommenders"};
  app.require_subcommand(1);

  // --- synth ---------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand(
      "synth", "generate a deterministic two-group synthetic dataset");
  SynthSpec synth;
  std::string synth_out;
  synth_cmd->add_option("--users", synth.num_users)->required();
  synth_cmd->add_option("--items", synth.num_items)->required();
  synth_cmd->add_option("--minority-share", synth.minority_catalog_share)
      ->required();
  synth_cmd->add_option("--affinity", synth.minority_affinity)->required();
  synth_cmd->add_option("--per-user", synth.interactions_per_user)->required();
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  // --- ingest --------------------------------------------------------------
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "validate a dataset and print its group statistics");
  DataFlags ingest_flags;
  add_data_flags(ingest_cmd, ingest_flags);
  std::string id_map_path;
  ingest_cmd->add_option("--id-map", id_map_path,
                         "write the dense/original id map to this file");

  // --- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand(
      "train", "train the pairwise recommender and save model plus candidate "
               "scores");
  DataFlags train_flags;
  add_data_flags(train_cmd, train_flags);
  TrainConfig train_config;
  std::size_t train_pool = 100;
  std::uint64_t train_seed = 0;
  std::string train_out;
  train_cmd->add_option("--dim", train_config.dim);
  train_cmd->add_option("--epochs", train_config.epochs);
  train_cmd->add_option("--batch", train_config.batch_size);
  train_cmd->add_option("--triplets", train_config.triplets_per_positive);
  train_cmd->add_option("--lr", train_config.learning_rate);
  train_cmd->add_option("--pool-size", train_pool);
  train_cmd->add_option("--seed", train_seed);
  train_cmd->add_option("--out", train_out, "output directory")->required();

  // --- rerank --------------------------------------------------------------
  auto* rerank_cmd = app.add_subcommand(
      "rerank", "re-rank saved candidate scores under an exposure policy");
  DataFlags rerank_flags;
  add_data_flags(rerank_cmd, rerank_flags);
  std::string rerank_scores, rerank_policy = "par", rerank_out;
  double rerank_lambda = 1.0;
  std::size_t rerank_k = 10, rerank_pool = 100;
  std::vector<std::string> rerank_targets;
  rerank_cmd->add_option("--scores", rerank_scores,
                         "scores CSV (user_id,item_id,score)")
      ->required();
  rerank_cmd->add_option("--policy", rerank_policy, "cat|int|par|per|custom");
  rerank_cmd->add_option("--lambda", rerank_lambda, "trade-off in [0,1]");
  rerank_cmd->add_option("--k", rerank_k, "list length");
  rerank_cmd->add_option("--pool-size", rerank_pool, "candidate pool size");
  rerank_cmd->add_option("--target", rerank_targets,
                         "custom target entries attr=fraction");
  rerank_cmd->add_option("--out", rerank_out, "output directory")->required();

  // --- evaluate ------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "compute the metric report for saved rankings");
  DataFlags eval_flags;
  add_data_flags(eval_cmd, eval_flags);
  std::string eval_rankings, eval_out;
  std::size_t eval_k = 10;
  eval_cmd->add_option("--rankings", eval_rankings,
                       "rankings CSV (user_id,rank,item_id,score)")
      ->required();
  eval_cmd->add_option("--k", eval_k, "list length");
  eval_cmd->add_option("--out", eval_out, "output directory")->required();

  // --- calibrate -----------------------------------------------------------
  auto* cal_cmd = app.add_subcommand(
      "calibrate", "pick lambda for a policy under an NDCG-loss budget");
  std::string cal_config_path, cal_policy = "par", cal_mode = "min-lambda";
  double cal_budget = 0.10;
  cal_cmd->add_option("--config", cal_config_path, "experiment config file")
      ->required();
  cal_cmd->add_option("--policy", cal_policy, "cat|int|par|per|custom");
  cal_cmd->add_option("--budget", cal_budget, "max NDCG loss fraction");
  cal_cmd->add_option("--calibrate-mode", cal_mode, "min-lambda|max-lambda");

  // --- experiment ----------------------------------------------------------
  auto* exp_cmd = app.add_subcommand(
      "experiment", "run the full pipeline from a config file");
  std::string exp_config_path;
  bool exp_calibrate = false;
  double exp_budget = 0.10;
  exp_cmd->add_option("--config", exp_config_path, "experiment config file")
      ->required();
  exp_cmd->add_flag("--calibrate", exp_calibrate,
                    "pick lambda per policy under the NDCG budget");
  exp_cmd->add_option("--budget", exp_budget,
                      "max NDCG loss fraction for --calibrate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed()) {
      write_synth_dataset(synth, synth_out);
      std::printf("wrote %s/interactions.csv and %s/items.csv\n",
                  synth_out.c_str(), synth_out.c_str());
      return 0;
    }

    if (ingest_cmd->parsed()) {
      const InteractionLog log = load_interactions(ingest_flags.interactions);
      const ItemCatalog catalog =
          load_item_metadata(ingest_flags.items, log);
      const GroupShares shares = group_shares(catalog, log);
      std::printf("users: %zu\nitems: %zu\ninteractions: %zu\n",
                  log.num_users(), log.num_items(),
                  log.interactions().size());
      for (AttrId a = 0; a < catalog.num_attributes(); ++a) {
        std::printf("group %-12s catalog_share=%.4f interaction_share=%.4f\n",
                    catalog.attribute_value(a).c_str(),
                    shares.catalog_share[a], shares.interaction_share[a]);
      }
      if (!id_map_path.empty()) {
        write_id_map(log, id_map_path);
        std::printf("wrote %s\n", id_map_path.c_str());
      }
      return 0;
    }

    if (train_cmd->parsed()) {
      ExperimentConfig config = config_from_flags(train_flags);
      config.train = train_config;
      config.pool_size = train_pool;
      config.seed = train_seed;
      config.out_dir = train_out;
      const TrainOutput result = run_train(config);
      for (std::size_t e = 0; e < result.losses.size(); ++e) {
        std::printf("epoch %zu: loss %.6f\n", e + 1, result.losses[e]);
      }
      print_summary_line("baseline", result.baseline);
      return 0;
    }

    if (rerank_cmd->parsed()) {
      ExperimentConfig config = config_from_flags(rerank_flags);
      config.k = rerank_k;
      config.pool_size = rerank_pool;
      config.out_dir = rerank_out;
      for (const auto& entry : rerank_targets) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
          throw std::runtime_error("bad --target entry '" + entry +
                                   "', expected attr=fraction");
        }
        config.custom_target[entry.substr(0, eq)] =
            std::stod(entry.substr(eq + 1));
      }
      const auto rankings =
          rerank_external(config, rerank_scores, rerank_policy, rerank_lambda);
      std::printf("re-ranked %zu users into %s/rankings_%s.csv\n",
                  rankings.size(), rerank_out.c_str(), rerank_policy.c_str());
      return 0;
    }

    if (eval_cmd->parsed()) {
      ExperimentConfig config = config_from_flags(eval_flags);
      config.k = eval_k;
      config.out_dir = eval_out;
      const MetricsReport report = evaluate_rankings(config, eval_rankings);
      print_summary_line("evaluated", report);
      return 0;
    }

    if (cal_cmd->parsed()) {
      ExperimentConfig config = load_config(cal_config_path);
      config.lambda.reset();
      config.budget = cal_budget;
      config.calibrate_mode = cal_mode == "max-lambda"
                                  ? CalibrateMode::kLargestFeasible
                                  : CalibrateMode::kSmallestFeasible;
      const CalibrationResult result = calibrate_policy(config, cal_policy);
      std::printf("lambda %.2f\n", result.lambda);
      for (std::size_t j = 0; j < result.grid.size(); ++j) {
        std::fprintf(stderr, "  lambda=%.2f mean_ndcg=%.6f\n", result.grid[j],
                     result.mean_ndcg[j]);
      }
      return 0;
    }

    if (exp_cmd->parsed()) {
      ExperimentConfig config = load_config(exp_config_path);
      if (exp_calibrate) {
        config.lambda.reset();
        config.budget = exp_budget;
      }
      const ExperimentResult result = run_experiment(config);
      for (const auto& run : result.runs) {
        char label[64];
        std::snprintf(label, sizeof(label), "%s(lambda=%.2f)",
                      run.label.c_str(), run.lambda);
        print_summary_line(label, run.report);
      }
      if (!config.out_dir.empty()) {
        std::printf("outputs in %s\n", config.out_dir.c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  return 0;
}
