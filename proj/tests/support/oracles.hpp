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

// Independent direct-formula evaluators used to cross-check the library.
// These deliberately share no code with the implementation they verify.

#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "exprb/bpr.hpp"
#include "exprb/dataset.hpp"
#include "exprb/types.hpp"

namespace exprb::oracle {

// Discounted exposure share per group for a prefix given as group labels in
// rank order; plain accumulation of the defining formula.
inline std::vector<double> exposure_direct(const std::vector<AttrId>& groups,
                                           std::size_t num_groups) {
  std::vector<double> mass(num_groups, 0.0);
  double denom = 0.0;
  for (std::size_t p = 1; p <= groups.size(); ++p) {
    const double weight =
        1.0 / (std::log(static_cast<double>(p) + 1.0) / std::log(2.0));
    mass[groups[p - 1]] += weight;
    denom += weight;
  }
  for (auto& v : mass) v /= denom;
  return mass;
}

// Hellinger distance evaluated literally from its definition.
inline double hellinger_direct(const std::vector<double>& p,
                               const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double diff = std::sqrt(p[a]) - std::sqrt(q[a]);
    acc += diff * diff;
  }
  return std::sqrt(0.5 * acc);
}

inline double bhattacharyya_direct(const std::vector<double>& p,
                                   const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) acc += std::sqrt(p[a] * q[a]);
  return acc;
}

// Exhaustive pairwise AUC: for each user, every (held-out positive, never
// seen negative) pair, counting ties as half.
inline double pairwise_auc(const FactorModel& model,
                           const InteractionLog& train,
                           const InteractionLog& test) {
  const auto train_items = train.distinct_items_by_user();
  const auto test_items = test.distinct_items_by_user();

  double wins = 0.0;
  std::uint64_t pairs = 0;
  for (UserId u = 0; u < train.num_users(); ++u) {
    if (test_items[u].empty()) continue;
    std::unordered_set<ItemId> seen(train_items[u].begin(),
                                    train_items[u].end());
    seen.insert(test_items[u].begin(), test_items[u].end());
    for (ItemId positive : test_items[u]) {
      const double pos_score = model.score(u, positive);
      for (ItemId negative = 0; negative < train.num_items(); ++negative) {
        if (seen.count(negative) > 0) continue;
        const double neg_score = model.score(u, negative);
        if (pos_score > neg_score) {
          wins += 1.0;
        } else if (pos_score == neg_score) {
          wins += 0.5;
        }
        ++pairs;
      }
    }
  }
  return pairs == 0 ? 0.0 : wins / static_cast<double>(pairs);
}

}  // namespace exprb::oracle
