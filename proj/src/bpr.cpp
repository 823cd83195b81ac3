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

#include "exprb/bpr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "csv.hpp"

namespace exprb {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;
constexpr char kCheckpointMagic[6] = {'E', 'X', 'P', 'R', 'B', '1'};

// ln sigmoid(-x) is -softplus(x); computed in the stable branch.
double negative_log_sigmoid(double x) {
  if (x > 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double sigmoid_of_negative(double x) {
  // sigmoid(-x), stable for large |x|.
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

struct AdamState {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;

  explicit AdamState(const Eigen::MatrixXd& shape)
      : m(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())),
        v(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())) {}

  void update(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad,
              double learning_rate, std::size_t step) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad.cwiseProduct(grad);
    const double bc1 =
        1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
    const double bc2 =
        1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
    param.array() -= learning_rate * (m.array() / bc1) /
                     ((v.array() / bc2).sqrt() + kAdamEpsilon);
  }
};

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw std::runtime_error(path + ": truncated checkpoint");
  }
  return value;
}

}  // namespace

FactorModel::FactorModel(Eigen::MatrixXd user_factors,
                         Eigen::MatrixXd item_factors)
    : user_factors_(std::move(user_factors)),
      item_factors_(std::move(item_factors)) {
  if (user_factors_.cols() != item_factors_.cols()) {
    throw std::invalid_argument("factor dimensions do not match");
  }
  if (user_factors_.rows() == 0 || item_factors_.rows() == 0 ||
      user_factors_.cols() == 0) {
    throw std::invalid_argument("factor matrices must be non-empty");
  }
}

FactorModel init_model(std::size_t num_users, std::size_t num_items,
                       std::size_t dim, std::uint64_t seed) {
  if (num_users == 0 || num_items == 0 || dim == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd users(num_users, dim);
  Eigen::MatrixXd items(num_items, dim);
  for (Eigen::Index r = 0; r < users.rows(); ++r) {
    for (Eigen::Index c = 0; c < users.cols(); ++c) users(r, c) = unit(rng);
  }
  for (Eigen::Index r = 0; r < items.rows(); ++r) {
    for (Eigen::Index c = 0; c < items.cols(); ++c) items(r, c) = unit(rng);
  }
  return FactorModel(std::move(users), std::move(items));
}

std::vector<Triplet> sample_triplets(const InteractionLog& train,
                                     std::size_t per_positive,
                                     std::uint64_t seed) {
  if (per_positive == 0) {
    throw std::invalid_argument("per_positive must be >= 1");
  }
  const std::size_t num_items = train.num_items();
  const auto by_user = train.distinct_items_by_user();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<ItemId> pick_item(
      0, static_cast<ItemId>(num_items - 1));

  std::vector<Triplet> triplets;
  std::vector<char> seen(num_items, 0);
  std::size_t saturated_users = 0;
  for (UserId u = 0; u < train.num_users(); ++u) {
    const auto& items = by_user[u];
    if (items.empty()) continue;
    if (items.size() >= num_items) {
      ++saturated_users;
      continue;
    }
    for (ItemId i : items) seen[i] = 1;
    for (ItemId positive : items) {
      for (std::size_t t = 0; t < per_positive; ++t) {
        ItemId negative = pick_item(rng);
        while (seen[negative]) negative = pick_item(rng);
        triplets.push_back(Triplet{u, positive, negative});
      }
    }
    for (ItemId i : items) seen[i] = 0;
  }
  if (saturated_users > 0) {
    warn(std::to_string(saturated_users) +
         " user(s) interacted with every item; skipped in triplet sampling");
  }
  return triplets;
}

double bpr_loss_and_gradient(const FactorModel& model,
                             std::span<const Triplet> triplets,
                             Eigen::MatrixXd& grad_users,
                             Eigen::MatrixXd& grad_items) {
  if (triplets.empty()) throw std::invalid_argument("empty triplet batch");
  grad_users.setZero();
  grad_items.setZero();

  const auto& users = model.user_factors();
  const auto& items = model.item_factors();
  const double inv_count = 1.0 / static_cast<double>(triplets.size());

  double loss = 0.0;
  for (const Triplet& t : triplets) {
    const auto w_u = users.row(t.user);
    const auto x_p = items.row(t.positive);
    const auto x_n = items.row(t.negative);
    const double x = w_u.dot(x_p) - w_u.dot(x_n);
    loss += negative_log_sigmoid(x);

    // d(-ln sigmoid(x))/dx = -sigmoid(-x)
    const double g = -sigmoid_of_negative(x) * inv_count;
    grad_users.row(t.user) += g * (x_p - x_n);
    grad_items.row(t.positive) += g * w_u;
    grad_items.row(t.negative) -= g * w_u;
  }
  return loss * inv_count;
}

TrainResult train(FactorModel model, const InteractionLog& train_log,
                  const TrainConfig& config) {
  if (model.num_users() != train_log.num_users() ||
      model.num_items() != train_log.num_items()) {
    throw std::invalid_argument("model dimensions do not match the log");
  }
  if (config.epochs == 0 || config.batch_size == 0 ||
      !(config.learning_rate >= 0.0)) {
    throw std::invalid_argument("bad train config");
  }

  const std::vector<Triplet> triplets = sample_triplets(
      train_log, config.triplets_per_positive,
      derive_seed(config.seed, "bpr.triplets"));
  if (triplets.empty()) {
    throw std::runtime_error("no triplets could be sampled");
  }

  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  Eigen::MatrixXd grad_users(model.num_users(), model.dim());
  Eigen::MatrixXd grad_items(model.num_items(), model.dim());
  AdamState adam_users(grad_users);
  AdamState adam_items(grad_items);

  std::vector<double> epoch_losses;
  epoch_losses.reserve(config.epochs);
  std::vector<Triplet> batch;
  batch.reserve(config.batch_size);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(
        derive_seed(config.seed, "bpr.shuffle", epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(start + config.batch_size, order.size());
      batch.clear();
      for (std::size_t idx = start; idx < end; ++idx) {
        batch.push_back(triplets[order[idx]]);
      }

      const double batch_loss =
          bpr_loss_and_gradient(model, batch, grad_users, grad_items);
      loss_sum += batch_loss * static_cast<double>(batch.size());

      ++step;
      adam_users.update(model.user_factors(), grad_users,
                        config.learning_rate, step);
      adam_items.update(model.item_factors(), grad_items,
                        config.learning_rate, step);

      if (!model.user_factors().allFinite() ||
          !model.item_factors().allFinite()) {
        throw std::runtime_error(
            "non-finite factors at epoch " + std::to_string(epoch + 1) +
            ", batch " + std::to_string(start / config.batch_size + 1));
      }
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(order.size()));
  }

  return TrainResult{std::move(model), std::move(epoch_losses)};
}

RankedList score_candidates(const FactorModel& model, UserId user,
                            const std::vector<ItemId>& exclude,
                            std::size_t pool_size) {
  if (user >= model.num_users()) {
    throw std::invalid_argument("user id out of range");
  }
  if (pool_size == 0) throw std::invalid_argument("pool_size must be >= 1");

  std::vector<char> excluded(model.num_items(), 0);
  for (ItemId i : exclude) {
    if (i >= model.num_items()) {
      throw std::invalid_argument("excluded item id out of range");
    }
    excluded[i] = 1;
  }

  const Eigen::VectorXd scores =
      model.item_factors() * model.user_factors().row(user).transpose();

  RankedList list;
  list.entries.reserve(model.num_items());
  for (ItemId i = 0; i < model.num_items(); ++i) {
    if (!excluded[i]) list.entries.push_back(ScoredItem{i, scores(i)});
  }
  if (list.entries.empty()) {
    throw std::runtime_error("no eligible items for user " +
                             std::to_string(user));
  }

  const auto better = [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  };
  if (list.entries.size() > pool_size) {
    std::partial_sort(list.entries.begin(), list.entries.begin() + pool_size,
                      list.entries.end(), better);
    list.entries.resize(pool_size);
  } else {
    std::sort(list.entries.begin(), list.entries.end(), better);
    if (list.entries.size() < pool_size) {
      warn("user " + std::to_string(user) + " has only " +
           std::to_string(list.entries.size()) + " eligible items (pool " +
           std::to_string(pool_size) + ")");
    }
  }
  return list;
}

std::map<UserId, RankedList> load_external_scores(const std::string& path,
                                                  const InteractionLog& log) {
  csv::Reader reader(path, "user_id,item_id,score");

  std::map<UserId, RankedList> lists;
  std::vector<std::string> fields;
  std::unordered_set<std::uint64_t> pairs;
  while (reader.next(fields, 3)) {
    const auto user = log.user_index(fields[0]);
    if (!user) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": unknown user '" + fields[0] + "'");
    }
    const auto item = log.item_index(fields[1]);
    if (!item) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": unknown item '" + fields[1] + "'");
    }
    const double score = csv::parse_real(fields[2], "score", reader.line_no());
    const std::uint64_t key = (static_cast<std::uint64_t>(*user) << 32) | *item;
    if (!pairs.insert(key).second) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": duplicate score for user '" + fields[0] +
                               "', item '" + fields[1] + "'");
    }
    lists[*user].entries.push_back(ScoredItem{*item, score});
  }
  if (lists.empty()) throw std::runtime_error(path + ": no scores");

  for (auto& [user, list] : lists) {
    std::stable_sort(
        list.entries.begin(), list.entries.end(),
        [](const ScoredItem& a, const ScoredItem& b) { return a.score > b.score; });
  }
  return lists;
}

void save_model(const FactorModel& model, std::uint64_t seed,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_raw(out, static_cast<std::uint64_t>(model.num_users()));
  write_raw(out, static_cast<std::uint64_t>(model.num_items()));
  write_raw(out, static_cast<std::uint64_t>(model.dim()));
  write_raw(out, seed);
  const auto write_matrix = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) write_raw(out, m(r, c));
    }
  };
  write_matrix(model.user_factors());
  write_matrix(model.item_factors());
  if (!out) throw std::runtime_error("failed writing " + path);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[sizeof(kCheckpointMagic)] = {};
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error(path + ": not an EXPRB1 checkpoint");
  }
  const auto num_users = read_raw<std::uint64_t>(in, path);
  const auto num_items = read_raw<std::uint64_t>(in, path);
  const auto dim = read_raw<std::uint64_t>(in, path);
  const auto seed = read_raw<std::uint64_t>(in, path);
  if (num_users == 0 || num_items == 0 || dim == 0) {
    throw std::runtime_error(path + ": bad checkpoint header");
  }
  Eigen::MatrixXd users(num_users, dim);
  Eigen::MatrixXd items(num_items, dim);
  const auto read_matrix = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = read_raw<double>(in, path);
      }
    }
  };
  read_matrix(users);
  read_matrix(items);
  return LoadedModel{FactorModel(std::move(users), std::move(items)), seed};
}

}  // namespace exprb
