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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "exprb/dataset.hpp"
#include "exprb/types.hpp"

namespace exprb {

// Probability vector over the attribute vocabulary A. Entries are
// non-negative and sum to 1 within 1e-9; zero entries are allowed.
class ExposureDistribution {
 public:
  explicit ExposureDistribution(std::vector<double> mass);

  const std::vector<double>& mass() const { return mass_; }
  double operator[](AttrId a) const { return mass_[a]; }
  std::size_t size() const { return mass_.size(); }

 private:
  std::vector<double> mass_;
};

// Position discount applied to rank p (1-based): 1 / log2(p + 1).
double position_weight(std::size_t position);

// Exposure share achieved by each provider group in the top-k prefix of a
// ranked list, weighting position p by 1/log2(p+1). Prefixes shorter than k
// normalize over the positions actually filled, so the result is always a
// proper distribution.
ExposureDistribution achieved_exposure(const RankedList& list,
                                       const ItemCatalog& catalog,
                                       std::size_t k);

// Target exposure policies. Cat and Int need group shares; Per needs the
// current user's profile at evaluation time.
enum class PolicyKind { kCat, kInt, kPar, kPer };

std::optional<PolicyKind> parse_policy(std::string_view name);
std::string_view policy_name(PolicyKind kind);

struct Policy {
  PolicyKind kind;
  std::optional<GroupShares> shares;  // required for kCat / kInt
};

// Target distribution for one user's list. `user_profile` is the set of
// items in the user's train profile; it is only consulted by the Per policy
// and must be non-empty in that case.
ExposureDistribution target_distribution(const Policy& policy,
                                         std::span<const ItemId> user_profile,
                                         const ItemCatalog& catalog);

// Hellinger distance (1/sqrt(2)) * sqrt(sum_a (sqrt(p_a) - sqrt(q_a))^2),
// symmetric and bounded in [0,1].
double hellinger(const ExposureDistribution& p, const ExposureDistribution& q);

// Bhattacharyya coefficient sum_a sqrt(p_a * q_a); relates to the distance
// above by H^2 = 1 - BC.
double bhattacharyya(const ExposureDistribution& p,
                     const ExposureDistribution& q);

}  // namespace exprb
