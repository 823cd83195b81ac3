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

#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "exprb/dataset.hpp"
#include "exprb/exposure.hpp"
#include "exprb/types.hpp"

namespace exprb {

// NDCG with binary relevance and base-2 log decay. The ideal DCG places one
// hit at each of the first min(k, |relevant|) positions.
double ndcg_at_k(const RankedList& list,
                 const std::unordered_set<ItemId>& relevant, std::size_t k);

// Mean over users of the minority group's achieved exposure in the top-k.
double minority_exposure(const std::map<UserId, RankedList>& lists,
                         const ItemCatalog& catalog, AttrId minority,
                         std::size_t k);

// Fraction of the catalog recommended to at least one user.
double catalog_coverage(const std::map<UserId, RankedList>& lists,
                        std::size_t num_items);

// Mean pairwise (1 - Jaccard) over the items' category sets. Two identical
// sets (including two empty ones) count as fully similar. Singleton lists
// score 0 with a warning.
double category_diversity(const RankedList& list, const ItemCatalog& catalog);

// Fraction of users who interacted with each item in train; position a is
// item a's popularity.
std::vector<double> item_popularity(const InteractionLog& train);

// Mean over list items of (1 - popularity).
double novelty(const RankedList& list, std::span<const double> popularity);
double novelty(const RankedList& list, const InteractionLog& train);

struct UserMetrics {
  double ndcg;
  ExposureDistribution exposure;
  double diversity;
  double novelty;
};

struct AggregateMetrics {
  double ndcg;
  double minority_exposure;
  double coverage;
  double diversity;
  double novelty;
};

// Per-user and aggregate metric surface for one set of top-k lists.
// Aggregates are arithmetic means of the per-user values; coverage is
// global. `excluded_users` counts users dropped upstream for having empty
// test sets.
struct MetricsReport {
  std::vector<std::pair<UserId, UserMetrics>> per_user;  // sorted by user
  AggregateMetrics aggregate;
  std::size_t k = 0;
  AttrId minority = 0;
  std::size_t excluded_users = 0;
};

MetricsReport build_report(
    const std::map<UserId, RankedList>& lists,
    const std::map<UserId, std::unordered_set<ItemId>>& relevant,
    const ItemCatalog& catalog, const InteractionLog& train, AttrId minority,
    std::size_t k, std::size_t excluded_users);

// Per-user rows `user_id,ndcg,exposure_<attr>...,diversity,novelty`; feeds
// external significance testing.
void write_report_csv(const MetricsReport& report, const InteractionLog& log,
                      const ItemCatalog& catalog, const std::string& path);

// Aggregate table with one row per labelled report.
void write_summary(
    const std::vector<std::pair<std::string, const MetricsReport*>>& rows,
    const ItemCatalog& catalog, const std::string& path);

}  // namespace exprb
