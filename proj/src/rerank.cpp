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

#include "exprb/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exprb/evalkit.hpp"

namespace exprb {
namespace {

constexpr double kNormalizeFloor = 1e-6;

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must be in [0,1]");
  }
}

// H^2 of the target against the prefix exposure obtained by adding weight
// `extra` to group `added`, via the Bhattacharyya form H^2 = 1 - BC.
double prefix_h2_with(const std::vector<double>& target,
                      const std::vector<double>& group_weight,
                      double weight_total, AttrId added, double extra) {
  const double total = weight_total + extra;
  double bc = 0.0;
  for (std::size_t a = 0; a < target.size(); ++a) {
    const double w = group_weight[a] + (a == added ? extra : 0.0);
    bc += std::sqrt(target[a] * (w / total));
  }
  return 1.0 - bc;
}

}  // namespace

RankedList normalize_scores(const RankedList& list) {
  if (list.empty()) throw std::invalid_argument("normalize on an empty list");

  double lo = list.entries.front().score;
  double hi = lo;
  for (const auto& entry : list.entries) {
    lo = std::min(lo, entry.score);
    hi = std::max(hi, entry.score);
  }

  RankedList out = list;
  if (hi == lo) {
    for (auto& entry : out.entries) entry.score = 1.0;
    return out;
  }
  const double span = hi - lo;
  for (auto& entry : out.entries) {
    entry.score =
        kNormalizeFloor + (1.0 - kNormalizeFloor) * (entry.score - lo) / span;
  }
  return out;
}

double objective_value(const RankedList& selection,
                       const ExposureDistribution& target, double lambda,
                       const ItemCatalog& catalog) {
  check_lambda(lambda);
  if (selection.empty()) {
    throw std::invalid_argument("objective over an empty selection");
  }
  double relevance = 0.0;
  for (const auto& entry : selection.entries) relevance += entry.score;
  const double h =
      hellinger(target, achieved_exposure(selection, catalog, selection.size()));
  return lambda * relevance - (1.0 - lambda) * h * h;
}

RankedList rerank_greedy(const RankedList& candidates,
                         const ExposureDistribution& target,
                         const RerankConfig& config,
                         const ItemCatalog& catalog) {
  check_lambda(config.lambda);
  if (config.k == 0) throw std::invalid_argument("k must be >= 1");
  if (candidates.empty()) {
    throw std::invalid_argument("rerank on an empty candidate pool");
  }
  if (target.size() != catalog.num_attributes()) {
    throw std::invalid_argument("target domain does not match the catalog");
  }
  if (candidates.size() < config.k) {
    warn("candidate pool smaller than k; re-ranking the whole pool");
  }
  const std::size_t k = std::min(config.k, candidates.size());
  const double lambda = config.lambda;

  std::vector<char> used(candidates.size(), 0);
  std::vector<double> group_weight(catalog.num_attributes(), 0.0);
  double weight_total = 0.0;
  double score_sum = 0.0;

  RankedList out;
  out.entries.reserve(k);
  for (std::size_t p = 1; p <= k; ++p) {
    const double w = position_weight(p);
    std::size_t best = candidates.size();
    double best_value = 0.0;
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
      if (used[idx]) continue;
      const ScoredItem& cand = candidates.entries[idx];
      const double h2 =
          prefix_h2_with(target.mass(), group_weight, weight_total,
                         catalog.attribute_of(cand.item), w);
      const double value =
          lambda * (score_sum + cand.score) - (1.0 - lambda) * h2;
      if (best == candidates.size()) {
        best = idx;
        best_value = value;
        continue;
      }
      const ScoredItem& incumbent = candidates.entries[best];
      if (value > best_value ||
          (value == best_value &&
           (cand.score > incumbent.score ||
            (cand.score == incumbent.score && cand.item < incumbent.item)))) {
        best = idx;
        best_value = value;
      }
    }
    const ScoredItem& chosen = candidates.entries[best];
    used[best] = 1;
    group_weight[catalog.attribute_of(chosen.item)] += w;
    weight_total += w;
    score_sum += chosen.score;
    out.entries.push_back(chosen);
  }
  return out;
}

BruteForceResult brute_force_optimum(const RankedList& candidates,
                                     const ExposureDistribution& target,
                                     const RerankConfig& config,
                                     const ItemCatalog& catalog) {
  check_lambda(config.lambda);
  const std::size_t k = std::min(config.k, candidates.size());
  if (candidates.size() > 8 || k > 4) {
    throw std::invalid_argument("oracle bound exceeded (pool <= 8, k <= 4)");
  }
  if (candidates.empty() || k == 0) {
    throw std::invalid_argument("empty oracle instance");
  }

  BruteForceResult best{RankedList{}, 0.0};
  bool found = false;
  std::vector<char> used(candidates.size(), 0);
  RankedList prefix;
  prefix.entries.reserve(k);

  // Depth-first enumeration of ordered k-prefixes, candidates in index order.
  const auto visit = [&](auto&& self, std::size_t depth) -> void {
    if (depth == k) {
      const double value =
          objective_value(prefix, target, config.lambda, catalog);
      if (!found || value > best.value) {
        found = true;
        best.list = prefix;
        best.value = value;
      }
      return;
    }
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
      if (used[idx]) continue;
      used[idx] = 1;
      prefix.entries.push_back(candidates.entries[idx]);
      self(self, depth + 1);
      prefix.entries.pop_back();
      used[idx] = 0;
    }
  };
  visit(visit, 0);
  return best;
}

CalibrationResult calibrate_lambda(const std::vector<CalibrationCase>& cases,
                                   const ItemCatalog& catalog,
                                   const RerankConfig& config, double budget,
                                   double grid_step, CalibrateMode mode) {
  if (cases.empty()) {
    throw std::invalid_argument("no validation users for calibration");
  }
  if (!(budget > 0.0 && budget < 1.0)) {
    throw std::invalid_argument("budget must be in (0,1)");
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw std::invalid_argument("grid step must be in (0,1]");
  }
  for (const auto& c : cases) {
    if (c.relevant.empty()) {
      throw std::invalid_argument("validation user " + std::to_string(c.user) +
                                  " has no test items");
    }
  }

  CalibrationResult result;
  const auto steps =
      static_cast<std::size_t>(std::ceil(1.0 / grid_step - 1e-9));
  for (std::size_t j = 0; j < steps; ++j) {
    result.grid.push_back(static_cast<double>(j) * grid_step);
  }
  result.grid.push_back(1.0);

  result.mean_ndcg.reserve(result.grid.size());
  for (double lambda : result.grid) {
    RerankConfig cfg = config;
    cfg.lambda = lambda;
    double sum = 0.0;
    for (const auto& c : cases) {
      const RankedList list = rerank_greedy(c.candidates, c.target, cfg, catalog);
      sum += ndcg_at_k(list, c.relevant, cfg.k);
    }
    result.mean_ndcg.push_back(sum / static_cast<double>(cases.size()));
  }

  const double floor = (1.0 - budget) * result.mean_ndcg.back();
  std::size_t chosen = result.grid.size() - 1;
  if (mode == CalibrateMode::kSmallestFeasible) {
    for (std::size_t j = 0; j < result.grid.size(); ++j) {
      if (result.mean_ndcg[j] >= floor) {
        chosen = j;
        break;
      }
    }
  } else {
    for (std::size_t j = result.grid.size(); j-- > 0;) {
      if (result.mean_ndcg[j] >= floor) {
        chosen = j;
        break;
      }
    }
  }

  result.lambda = result.grid[chosen];
  result.corrected = chosen + 1 < result.grid.size();
  if (!result.corrected && mode == CalibrateMode::kSmallestFeasible) {
    warn("no lambda below 1.0 meets the NDCG budget; returning 1.0");
  }
  return result;
}

}  // namespace exprb
