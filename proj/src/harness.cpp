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

#include "exprb/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "csv.hpp"

namespace exprb {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& stage, const std::string& what) {
  throw std::runtime_error(stage + ": " + what);
}

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    fail(name, e.what());
  }
}

// Ingested data plus everything derived from it before training.
struct PipelineData {
  InteractionLog log;
  ItemCatalog catalog;
  SplitPair split;
  GroupShares shares;
  AttrId minority;
  std::vector<std::vector<ItemId>> train_items;  // distinct, per user
  std::vector<std::vector<ItemId>> test_items;
};

PipelineData prepare_data(const ExperimentConfig& config) {
  config.validate();

  auto ingest = [&]() -> std::pair<InteractionLog, ItemCatalog> {
    if (config.synth) {
      SynthSpec spec = *config.synth;
      spec.seed = derive_seed(config.seed, "synth");
      return synthesize_dataset(spec);
    }
    InteractionLog log = load_interactions(config.interactions_path);
    ItemCatalog catalog = load_item_metadata(config.items_path, log);
    return {std::move(log), std::move(catalog)};
  };
  auto [log, catalog] =
      stage(config.synth ? "synth" : "ingest", std::move(ingest));

  SplitPair split = stage("split", [&] {
    return temporal_split(log, config.holdout);
  });
  GroupShares shares = stage("shares", [&] {
    return group_shares(catalog, log);
  });

  AttrId minority = 0;
  if (config.minority.empty()) {
    for (AttrId a = 1; a < catalog.num_attributes(); ++a) {
      if (shares.catalog_share[a] < shares.catalog_share[minority]) {
        minority = a;
      }
    }
  } else {
    const auto idx = catalog.attribute_index(config.minority);
    if (!idx) fail("shares", "unknown minority attribute '" + config.minority + "'");
    minority = *idx;
  }

  auto train_items = split.train.distinct_items_by_user();
  auto test_items = split.test.distinct_items_by_user();
  return PipelineData{std::move(log),    std::move(catalog),
                      std::move(split),  std::move(shares),
                      minority,          std::move(train_items),
                      std::move(test_items)};
}

// Target distribution for one user under a named policy.
ExposureDistribution policy_target(const std::string& policy,
                                   const PipelineData& data,
                                   const ExperimentConfig& config,
                                   UserId user) {
  if (policy == "custom") {
    std::vector<double> mass(data.catalog.num_attributes(), 0.0);
    for (const auto& [attr, fraction] : config.custom_target) {
      const auto idx = data.catalog.attribute_index(attr);
      if (!idx) {
        throw std::invalid_argument("custom target names unknown attribute '" +
                                    attr + "'");
      }
      mass[*idx] = fraction;
    }
    return ExposureDistribution(std::move(mass));
  }
  const auto kind = parse_policy(policy);
  if (!kind) throw std::invalid_argument("unknown policy '" + policy + "'");
  Policy p{*kind, std::nullopt};
  if (*kind == PolicyKind::kCat || *kind == PolicyKind::kInt) {
    p.shares = data.shares;
  }
  return target_distribution(p, data.train_items[user], data.catalog);
}

// Re-ranked entries carry normalized scores; swap the original ones back in
// so every emitted ranking stays in model-score units.
RankedList with_raw_scores(const RankedList& reranked, const RankedList& raw) {
  RankedList out = reranked;
  for (auto& entry : out.entries) {
    const std::size_t pos = raw.position_of(entry.item);
    entry.score = raw.entries[pos - 1].score;
  }
  return out;
}

void write_scores_csv(const std::map<UserId, RankedList>& candidates,
                      const InteractionLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "user_id,item_id,score\n";
  for (const auto& [user, list] : candidates) {
    for (const auto& entry : list.entries) {
      out << log.user_label(user) << ',' << log.item_label(entry.item) << ','
          << csv::format_double(entry.score) << '\n';
    }
  }
}

// Data, trained model, and per-user candidate pools for every user with a
// non-empty test set.
struct BuiltPipeline {
  PipelineData data;
  TrainResult trained;
  std::map<UserId, RankedList> candidates;  // raw scores
  std::map<UserId, RankedList> normalized;
  std::map<UserId, std::unordered_set<ItemId>> relevant;
  std::size_t excluded = 0;
};

BuiltPipeline build_pipeline(const ExperimentConfig& config) {
  PipelineData data = prepare_data(config);

  TrainConfig tc = config.train;
  tc.seed = derive_seed(config.seed, "train");
  TrainResult trained = stage("train", [&] {
    FactorModel init = init_model(data.log.num_users(), data.log.num_items(),
                                  tc.dim, derive_seed(config.seed, "init"));
    return train(std::move(init), data.split.train, tc);
  });

  BuiltPipeline p{std::move(data), std::move(trained), {}, {}, {}, 0};
  stage("score", [&] {
    for (UserId u = 0; u < p.data.log.num_users(); ++u) {
      if (p.data.test_items[u].empty()) {
        ++p.excluded;
        continue;
      }
      RankedList pool = score_candidates(p.trained.model, u,
                                         p.data.train_items[u],
                                         config.pool_size);
      p.normalized[u] = normalize_scores(pool);
      p.candidates[u] = std::move(pool);
      p.relevant[u] = std::unordered_set<ItemId>(p.data.test_items[u].begin(),
                                                 p.data.test_items[u].end());
    }
    if (p.candidates.empty()) {
      throw std::runtime_error("no users with test interactions");
    }
    return 0;
  });
  return p;
}

}  // namespace

void ExperimentConfig::validate() const {
  const bool has_files = !interactions_path.empty() || !items_path.empty();
  if (has_files && (interactions_path.empty() || items_path.empty())) {
    throw std::invalid_argument(
        "both data.interactions and data.items are required");
  }
  if (has_files == synth.has_value()) {
    throw std::invalid_argument(
        "configure exactly one dataset source (files xor synth)");
  }
  if (has_files) {
    for (const auto& path : {interactions_path, items_path}) {
      if (!fs::exists(path)) {
        throw std::invalid_argument("missing data file: " + path);
      }
    }
  }
  if (!(holdout > 0.0 && holdout < 1.0)) {
    throw std::invalid_argument("split.holdout must be in (0,1)");
  }
  if (k == 0 || pool_size < k) {
    throw std::invalid_argument("rerank.k must be >= 1 and <= rerank.pool");
  }
  if (lambda && !(*lambda >= 0.0 && *lambda <= 1.0)) {
    throw std::invalid_argument("rerank.lambda must be in [0,1]");
  }
  if (budget && !(*budget > 0.0 && *budget < 1.0)) {
    throw std::invalid_argument("rerank.budget must be in (0,1)");
  }
  if (lambda && budget) {
    throw std::invalid_argument(
        "set either rerank.lambda or rerank.budget, not both");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig config;
  SynthSpec synth;
  bool synth_seen = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = csv::trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(source + ": line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    const std::string key = csv::trim(text.substr(0, eq));
    const std::string value = csv::trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::runtime_error(source + ": line " + std::to_string(line_no) +
                               ": empty key or value");
    }

    const auto number = [&]() {
      return csv::parse_real(value, "value for " + key, line_no);
    };
    const auto count = [&]() -> std::size_t {
      return csv::parse_number<std::size_t>(value, "value for " + key,
                                            line_no);
    };

    if (key == "data.interactions") {
      config.interactions_path = value;
    } else if (key == "data.items") {
      config.items_path = value;
    } else if (key == "synth.users") {
      synth.num_users = count();
      synth_seen = true;
    } else if (key == "synth.items") {
      synth.num_items = count();
      synth_seen = true;
    } else if (key == "synth.minority_share") {
      synth.minority_catalog_share = number();
      synth_seen = true;
    } else if (key == "synth.affinity") {
      synth.minority_affinity = number();
      synth_seen = true;
    } else if (key == "synth.per_user") {
      synth.interactions_per_user = count();
      synth_seen = true;
    } else if (key == "split.holdout") {
      config.holdout = number();
    } else if (key == "train.dim") {
      config.train.dim = count();
    } else if (key == "train.epochs") {
      config.train.epochs = count();
    } else if (key == "train.batch") {
      config.train.batch_size = count();
    } else if (key == "train.triplets") {
      config.train.triplets_per_positive = count();
    } else if (key == "train.lr") {
      config.train.learning_rate = number();
    } else if (key == "rerank.k") {
      config.k = count();
    } else if (key == "rerank.pool") {
      config.pool_size = count();
    } else if (key == "rerank.lambda") {
      config.lambda = number();
    } else if (key == "rerank.budget") {
      config.budget = number();
    } else if (key == "rerank.grid_step") {
      config.grid_step = number();
    } else if (key == "rerank.calibrate_mode") {
      if (value == "min-lambda") {
        config.calibrate_mode = CalibrateMode::kSmallestFeasible;
      } else if (value == "max-lambda") {
        config.calibrate_mode = CalibrateMode::kLargestFeasible;
      } else {
        throw std::runtime_error(source + ": line " + std::to_string(line_no) +
                                 ": calibrate_mode must be min-lambda or "
                                 "max-lambda");
      }
    } else if (key == "policy") {
      for (const auto& name : csv::split_fields(value, ',')) {
        if (!name.empty()) config.policies.push_back(name);
      }
    } else if (key == "minority") {
      config.minority = value;
    } else if (key == "seed") {
      config.seed =
          csv::parse_number<std::uint64_t>(value, "value for seed", line_no);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "emit.id_map") {
      config.emit_id_map = (value == "true" || value == "1");
    } else if (key.rfind("target.", 0) == 0) {
      config.custom_target[key.substr(7)] = number();
    } else {
      throw std::runtime_error(source + ": line " + std::to_string(line_no) +
                               ": unknown config key '" + key + "'");
    }
  }

  if (synth_seen) config.synth = synth;
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_config(in, path);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.policies.empty()) {
    throw std::invalid_argument("experiment needs a non-empty policy list");
  }
  if (!config.lambda && !config.budget) {
    throw std::invalid_argument("set rerank.lambda or rerank.budget");
  }

  BuiltPipeline pipeline = build_pipeline(config);
  PipelineData& data = pipeline.data;
  const auto& candidates = pipeline.candidates;
  const auto& normalized = pipeline.normalized;
  const auto& relevant = pipeline.relevant;
  const std::size_t excluded = pipeline.excluded;

  ExperimentResult result;
  result.evaluated_users = candidates.size();
  result.excluded_users = excluded;
  result.train_losses = pipeline.trained.epoch_losses;

  // lambda = 1 baseline: the recommender's own top-k.
  RunOutput baseline;
  baseline.label = "baseline";
  baseline.lambda = 1.0;
  for (const auto& [user, pool] : candidates) {
    baseline.rankings[user] = pool.prefix(config.k);
  }
  baseline.report = stage("evaluate", [&] {
    return build_report(baseline.rankings, relevant, data.catalog,
                        data.split.train, data.minority, config.k, excluded);
  });
  result.runs.push_back(std::move(baseline));

  for (const std::string& policy : config.policies) {
    RunOutput run;
    run.label = policy;

    std::map<UserId, ExposureDistribution> targets;
    stage("rerank", [&] {
      for (const auto& [user, pool] : candidates) {
        targets.emplace(user, policy_target(policy, data, config, user));
      }
      return 0;
    });

    double lambda;
    if (config.lambda) {
      lambda = *config.lambda;
    } else {
      lambda = stage("calibrate", [&] {
        std::vector<CalibrationCase> cases;
        cases.reserve(candidates.size());
        for (const auto& [user, pool] : normalized) {
          cases.push_back(CalibrationCase{user, pool, targets.at(user),
                                          relevant.at(user)});
        }
        RerankConfig rc{1.0, config.k, config.pool_size};
        return calibrate_lambda(cases, data.catalog, rc, *config.budget,
                                config.grid_step, config.calibrate_mode)
            .lambda;
      });
    }
    run.lambda = lambda;

    stage("rerank", [&] {
      RerankConfig rc{lambda, config.k, config.pool_size};
      for (const auto& [user, pool] : normalized) {
        RankedList list = rerank_greedy(pool, targets.at(user), rc, data.catalog);
        run.rankings[user] = with_raw_scores(list, candidates.at(user));
      }
      return 0;
    });

    run.report = stage("evaluate", [&] {
      return build_report(run.rankings, relevant, data.catalog,
                          data.split.train, data.minority, config.k, excluded);
    });

    double h_run = 0.0, h_base = 0.0, target_minority = 0.0;
    for (const auto& [user, target] : targets) {
      h_run += hellinger(target, achieved_exposure(run.rankings.at(user),
                                                   data.catalog, config.k));
      h_base += hellinger(
          target, achieved_exposure(result.runs.front().rankings.at(user),
                                    data.catalog, config.k));
      target_minority += target[data.minority];
    }
    run.mean_hellinger = h_run / static_cast<double>(targets.size());
    run.baseline_mean_hellinger = h_base / static_cast<double>(targets.size());
    run.mean_target_minority =
        target_minority / static_cast<double>(targets.size());

    result.runs.push_back(std::move(run));
  }

  if (!config.out_dir.empty()) {
    stage("emit", [&] {
      fs::create_directories(config.out_dir);
      const auto in_dir = [&](const std::string& name) {
        return (fs::path(config.out_dir) / name).string();
      };
      save_model(pipeline.trained.model, derive_seed(config.seed, "train"),
                 in_dir("model.bin"));
      write_scores_csv(candidates, data.log, in_dir("scores.csv"));
      if (config.emit_id_map) write_id_map(data.log, in_dir("id_map.csv"));

      std::vector<std::pair<std::string, const MetricsReport*>> summary_rows;
      for (const auto& run : result.runs) {
        write_rankings_csv(run.rankings, data.log,
                           in_dir("rankings_" + run.label + ".csv"));
        write_report_csv(run.report, data.log, data.catalog,
                         in_dir("report_" + run.label + ".csv"));
        std::ostringstream label;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "(lambda=%.2f", run.lambda);
        label << run.label << buf;
        if (run.mean_target_minority) {
          std::snprintf(buf, sizeof(buf), ", target_e_m=%.2f",
                        *run.mean_target_minority);
          label << buf;
        }
        label << ")";
        summary_rows.emplace_back(label.str(), &run.report);
      }
      write_summary(summary_rows, data.catalog, in_dir("summary.txt"));
      return 0;
    });
  }

  return result;
}

std::map<UserId, RankedList> rerank_external(const ExperimentConfig& config,
                                             const std::string& scores_path,
                                             const std::string& policy,
                                             std::optional<double> lambda) {
  PipelineData data = prepare_data(config);
  const double lam = lambda ? *lambda : config.lambda.value_or(1.0);

  const auto lists = stage("scores", [&] {
    return load_external_scores(scores_path, data.log);
  });

  std::map<UserId, RankedList> rankings;
  stage("rerank", [&] {
    RerankConfig rc{lam, config.k, config.pool_size};
    for (const auto& [user, pool] : lists) {
      const RankedList normalized = normalize_scores(pool);
      const auto target = policy_target(policy, data, config, user);
      RankedList list = rerank_greedy(normalized, target, rc, data.catalog);
      rankings[user] = with_raw_scores(list, pool);
    }
    return 0;
  });

  if (!config.out_dir.empty()) {
    stage("emit", [&] {
      fs::create_directories(config.out_dir);
      write_rankings_csv(
          rankings, data.log,
          (fs::path(config.out_dir) / ("rankings_" + policy + ".csv")).string());
      return 0;
    });
  }
  return rankings;
}

MetricsReport evaluate_rankings(const ExperimentConfig& config,
                                const std::string& rankings_path) {
  PipelineData data = prepare_data(config);
  auto rankings = stage("rankings", [&] {
    return load_rankings_csv(rankings_path, data.log);
  });

  std::map<UserId, std::unordered_set<ItemId>> relevant;
  std::size_t excluded = 0;
  for (auto it = rankings.begin(); it != rankings.end();) {
    const auto& test = data.test_items[it->first];
    if (test.empty()) {
      ++excluded;
      it = rankings.erase(it);
    } else {
      relevant[it->first] = std::unordered_set<ItemId>(test.begin(), test.end());
      ++it;
    }
  }

  MetricsReport report = stage("evaluate", [&] {
    return build_report(rankings, relevant, data.catalog, data.split.train,
                        data.minority, config.k, excluded);
  });

  if (!config.out_dir.empty()) {
    stage("emit", [&] {
      fs::create_directories(config.out_dir);
      write_report_csv(report, data.log, data.catalog,
                       (fs::path(config.out_dir) / "report.csv").string());
      write_summary({{"evaluated", &report}}, data.catalog,
                    (fs::path(config.out_dir) / "summary.txt").string());
      return 0;
    });
  }
  return report;
}

CalibrationResult calibrate_policy(const ExperimentConfig& config,
                                   const std::string& policy) {
  if (!config.budget) {
    throw std::invalid_argument("calibration needs rerank.budget");
  }
  BuiltPipeline pipeline = build_pipeline(config);

  std::vector<CalibrationCase> cases;
  cases.reserve(pipeline.normalized.size());
  for (const auto& [user, pool] : pipeline.normalized) {
    cases.push_back(
        CalibrationCase{user, pool,
                        policy_target(policy, pipeline.data, config, user),
                        pipeline.relevant.at(user)});
  }

  return stage("calibrate", [&] {
    RerankConfig rc{1.0, config.k, config.pool_size};
    return calibrate_lambda(cases, pipeline.data.catalog, rc, *config.budget,
                            config.grid_step, config.calibrate_mode);
  });
}

TrainOutput run_train(const ExperimentConfig& config) {
  BuiltPipeline pipeline = build_pipeline(config);
  const PipelineData& data = pipeline.data;

  std::map<UserId, RankedList> baseline;
  for (const auto& [user, pool] : pipeline.candidates) {
    baseline[user] = pool.prefix(config.k);
  }
  MetricsReport report = stage("evaluate", [&] {
    return build_report(baseline, pipeline.relevant, data.catalog,
                        data.split.train, data.minority, config.k,
                        pipeline.excluded);
  });

  if (!config.out_dir.empty()) {
    stage("emit", [&] {
      fs::create_directories(config.out_dir);
      save_model(pipeline.trained.model, derive_seed(config.seed, "train"),
                 (fs::path(config.out_dir) / "model.bin").string());
      write_scores_csv(pipeline.candidates, data.log,
                       (fs::path(config.out_dir) / "scores.csv").string());
      write_rankings_csv(baseline, data.log,
                         (fs::path(config.out_dir) / "rankings_baseline.csv")
                             .string());
      return 0;
    });
  }
  return TrainOutput{pipeline.trained.epoch_losses, std::move(report)};
}

void write_rankings_csv(const std::map<UserId, RankedList>& rankings,
                        const InteractionLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "user_id,rank,item_id,score\n";
  for (const auto& [user, list] : rankings) {
    for (std::size_t p = 1; p <= list.size(); ++p) {
      out << log.user_label(user) << ',' << p << ','
          << log.item_label(list.entries[p - 1].item) << ','
          << csv::format_double(list.entries[p - 1].score) << '\n';
    }
  }
}

std::map<UserId, RankedList> load_rankings_csv(const std::string& path,
                                               const InteractionLog& log) {
  csv::Reader reader(path, "user_id,rank,item_id,score");
  std::map<UserId, RankedList> rankings;
  std::vector<std::string> fields;
  while (reader.next(fields, 4)) {
    const auto user = log.user_index(fields[0]);
    const auto item = log.item_index(fields[2]);
    if (!user || !item) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": unknown user or item id");
    }
    const auto rank = csv::parse_number<std::size_t>(fields[1], "rank",
                                                     reader.line_no());
    auto& list = rankings[*user];
    if (rank != list.size() + 1) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": ranks must be contiguous from 1 per user");
    }
    list.entries.push_back(
        ScoredItem{*item, csv::parse_real(fields[3], "score", reader.line_no())});
  }
  if (rankings.empty()) throw std::runtime_error(path + ": no rankings");
  return rankings;
}

void write_synth_dataset(const SynthSpec& spec, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto [log, catalog] = synthesize_dataset(spec);
  write_interactions_csv(log, (fs::path(out_dir) / "interactions.csv").string());
  write_items_csv(catalog, log, (fs::path(out_dir) / "items.csv").string());
}

}  // namespace exprb
