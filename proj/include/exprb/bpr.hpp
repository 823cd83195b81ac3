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

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "exprb/dataset.hpp"
#include "exprb/types.hpp"

namespace exprb {

// User/item latent factor matrices; rows are users/items, columns the D
// latent dimensions.
class FactorModel {
 public:
  FactorModel(Eigen::MatrixXd user_factors, Eigen::MatrixXd item_factors);

  std::size_t num_users() const { return user_factors_.rows(); }
  std::size_t num_items() const { return item_factors_.rows(); }
  std::size_t dim() const { return user_factors_.cols(); }

  const Eigen::MatrixXd& user_factors() const { return user_factors_; }
  const Eigen::MatrixXd& item_factors() const { return item_factors_; }
  Eigen::MatrixXd& user_factors() { return user_factors_; }
  Eigen::MatrixXd& item_factors() { return item_factors_; }

  // Predicted relevance: dot(W_u, X_i).
  double score(UserId u, ItemId i) const {
    return user_factors_.row(u).dot(item_factors_.row(i));
  }

 private:
  Eigen::MatrixXd user_factors_;
  Eigen::MatrixXd item_factors_;
};

// One pairwise training example: `positive` is observed for `user`,
// `negative` is not.
struct Triplet {
  UserId user;
  ItemId positive;
  ItemId negative;
};

struct TrainConfig {
  std::size_t dim = 16;
  std::size_t epochs = 20;
  std::size_t batch_size = 1024;
  std::size_t triplets_per_positive = 10;
  double learning_rate = 0.001;
  std::uint64_t seed = 0;
};

// Factors sampled uniformly from [0,1]; deterministic per seed.
FactorModel init_model(std::size_t num_users, std::size_t num_items,
                       std::size_t dim, std::uint64_t seed);

// Exactly `per_positive` triplets per (user, observed item); negatives drawn
// uniformly from the items the user never interacted with. Users who
// interacted with every item are skipped with a warning.
std::vector<Triplet> sample_triplets(const InteractionLog& train,
                                     std::size_t per_positive,
                                     std::uint64_t seed);

// Mean pairwise ranking loss -ln sigmoid(score(u,i+) - score(u,i-)) over
// `triplets`, with the mean gradient accumulated into `grad_users` /
// `grad_items` (zeroed here; must match the model's shapes).
double bpr_loss_and_gradient(const FactorModel& model,
                             std::span<const Triplet> triplets,
                             Eigen::MatrixXd& grad_users,
                             Eigen::MatrixXd& grad_items);

struct TrainResult {
  FactorModel model;
  std::vector<double> epoch_losses;
};

// Adam-optimized pairwise training. The triplet set is sampled once from the
// config seed; its order is reshuffled every epoch from an epoch-indexed
// seed. Aborts with a diagnostic if factors stop being finite.
TrainResult train(FactorModel model, const InteractionLog& train_log,
                  const TrainConfig& config);

// Top `pool_size` items by score for `user`, excluding `exclude` (typically
// the user's train items). Ties break toward the lower item id. Returns all
// eligible items, with a warning, when fewer than pool_size remain.
RankedList score_candidates(const FactorModel& model, UserId user,
                            const std::vector<ItemId>& exclude,
                            std::size_t pool_size);

// Reads a `user_id,item_id,score` CSV produced by any recommender and
// resolves labels against `log`. Per-user lists come back sorted by score
// descending (ties keep file order).
std::map<UserId, RankedList> load_external_scores(const std::string& path,
                                                  const InteractionLog& log);

// Versioned binary checkpoint (magic EXPRB1): header with dims and seed,
// then row-major factor matrices.
void save_model(const FactorModel& model, std::uint64_t seed,
                const std::string& path);
struct LoadedModel {
  FactorModel model;
  std::uint64_t seed;
};
LoadedModel load_model(const std::string& path);

}  // namespace exprb
