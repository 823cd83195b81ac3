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

#include <unordered_set>
#include <vector>

#include "exprb/dataset.hpp"
#include "exprb/exposure.hpp"
#include "exprb/types.hpp"

namespace exprb {

struct RerankConfig {
  double lambda = 1.0;        // 1 = pure relevance, 0 = pure exposure match
  std::size_t k = 10;
  std::size_t pool_size = 100;
};

// Min-max rescale of the list's scores into [eps, 1] with eps = 1e-6;
// constant-score lists map to all ones. Order is preserved. Keeps every
// score strictly positive, as the re-ranking objective assumes.
RankedList normalize_scores(const RankedList& list);

// lambda * sum(scores) - (1 - lambda) * H^2(target, achieved exposure of the
// selection). Expects normalized scores.
double objective_value(const RankedList& selection,
                       const ExposureDistribution& target, double lambda,
                       const ItemCatalog& catalog);

// Greedy maximum-marginal-relevance construction of the top-k list: position
// by position, append the unused candidate that maximizes the objective of
// the extended prefix. Ties break toward the higher score, then the lower
// item id. Expects normalized candidates of length >= k (smaller pools are
// re-ranked whole, with a warning).
RankedList rerank_greedy(const RankedList& candidates,
                         const ExposureDistribution& target,
                         const RerankConfig& config,
                         const ItemCatalog& catalog);

// Exhaustive enumeration of every ordered k-prefix of the pool; only valid
// for pool <= 8 and k <= 4 (at most 1680 prefixes).
struct BruteForceResult {
  RankedList list;
  double value;
};
BruteForceResult brute_force_optimum(const RankedList& candidates,
                                     const ExposureDistribution& target,
                                     const RerankConfig& config,
                                     const ItemCatalog& catalog);

// One validation user for lambda calibration: normalized candidates, the
// policy target for that user, and the user's test items.
struct CalibrationCase {
  UserId user;
  RankedList candidates;
  ExposureDistribution target;
  std::unordered_set<ItemId> relevant;
};

// kSmallestFeasible returns the smallest grid lambda whose mean NDCG stays
// within the budget (maximal exposure correction); kLargestFeasible is the
// literal "highest lambda" reading.
enum class CalibrateMode { kSmallestFeasible, kLargestFeasible };

struct CalibrationResult {
  double lambda;
  bool corrected;               // false when only lambda = 1 met the budget
  std::vector<double> grid;     // evaluated lambda values, ascending
  std::vector<double> mean_ndcg;  // mean NDCG per grid entry
};

// Grid search over lambda in {0, step, ..., 1}: keeps the lambdas whose mean
// NDCG over the validation users is >= (1 - budget) * mean NDCG at lambda=1,
// then picks per `mode`. Warns and returns 1.0 when no smaller lambda
// qualifies.
CalibrationResult calibrate_lambda(
    const std::vector<CalibrationCase>& cases, const ItemCatalog& catalog,
    const RerankConfig& config, double budget, double grid_step = 0.05,
    CalibrateMode mode = CalibrateMode::kSmallestFeasible);

}  // namespace exprb
