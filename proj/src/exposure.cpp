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

#include "exprb/exposure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exprb {

ExposureDistribution::ExposureDistribution(std::vector<double> mass)
    : mass_(std::move(mass)) {
  if (mass_.empty()) {
    throw std::invalid_argument("exposure distribution over empty domain");
  }
  double total = 0.0;
  for (double v : mass_) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("exposure distribution has negative mass");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("exposure distribution does not sum to 1");
  }
}

double position_weight(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

ExposureDistribution achieved_exposure(const RankedList& list,
                                       const ItemCatalog& catalog,
                                       std::size_t k) {
  if (list.empty()) {
    throw std::invalid_argument("achieved_exposure on an empty list");
  }
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  const std::size_t prefix = std::min(k, list.size());
  std::vector<double> mass(catalog.num_attributes(), 0.0);
  double total = 0.0;
  for (std::size_t p = 1; p <= prefix; ++p) {
    const double w = position_weight(p);
    mass[catalog.attribute_of(list.entries[p - 1].item)] += w;
    total += w;
  }
  for (double& v : mass) v /= total;
  return ExposureDistribution(std::move(mass));
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  if (name == "cat") return PolicyKind::kCat;
  if (name == "int") return PolicyKind::kInt;
  if (name == "par") return PolicyKind::kPar;
  if (name == "per") return PolicyKind::kPer;
  return std::nullopt;
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kCat: return "cat";
    case PolicyKind::kInt: return "int";
    case PolicyKind::kPar: return "par";
    case PolicyKind::kPer: return "per";
  }
  return "?";
}

ExposureDistribution target_distribution(const Policy& policy,
                                         std::span<const ItemId> user_profile,
                                         const ItemCatalog& catalog) {
  const std::size_t num_attrs = catalog.num_attributes();
  switch (policy.kind) {
    case PolicyKind::kCat:
      if (!policy.shares) {
        throw std::invalid_argument("cat policy requires group shares");
      }
      return ExposureDistribution(policy.shares->catalog_share);
    case PolicyKind::kInt:
      if (!policy.shares) {
        throw std::invalid_argument("int policy requires group shares");
      }
      return ExposureDistribution(policy.shares->interaction_share);
    case PolicyKind::kPar: {
      std::vector<double> mass(num_attrs,
                               1.0 / static_cast<double>(num_attrs));
      return ExposureDistribution(std::move(mass));
    }
    case PolicyKind::kPer: {
      if (user_profile.empty()) {
        throw std::invalid_argument("per policy requires a non-empty profile");
      }
      std::vector<double> mass(num_attrs, 0.0);
      for (ItemId item : user_profile) {
        mass[catalog.attribute_of(item)] += 1.0;
      }
      for (double& v : mass) v /= static_cast<double>(user_profile.size());
      return ExposureDistribution(std::move(mass));
    }
  }
  throw std::logic_error("unreachable policy kind");
}

double hellinger(const ExposureDistribution& p,
                 const ExposureDistribution& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("hellinger over mismatched domains");
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double d = std::sqrt(p.mass()[a]) - std::sqrt(q.mass()[a]);
    sum += d * d;
  }
  return std::sqrt(sum) / std::sqrt(2.0);
}

double bhattacharyya(const ExposureDistribution& p,
                     const ExposureDistribution& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("bhattacharyya over mismatched domains");
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    sum += std::sqrt(p.mass()[a] * q.mass()[a]);
  }
  return sum;
}

}  // namespace exprb
