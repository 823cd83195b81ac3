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

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "exprb/types.hpp"

namespace exprb {

// A single implicit-feedback event. The same (user, item) pair may repeat,
// but only with distinct timestamps.
struct Interaction {
  UserId user;
  ItemId item;
  std::int64_t timestamp;
};

// Implicit-feedback log with densely re-indexed ids. Original ids are kept
// so file outputs can be written in the input vocabulary. Immutable after
// construction.
class InteractionLog {
 public:
  InteractionLog(std::vector<Interaction> interactions, std::size_t num_users,
                 std::size_t num_items, std::vector<std::string> user_labels,
                 std::vector<std::string> item_labels);

  const std::vector<Interaction>& interactions() const { return interactions_; }
  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }

  const std::string& user_label(UserId u) const { return user_labels_[u]; }
  const std::string& item_label(ItemId i) const { return item_labels_[i]; }
  const std::vector<std::string>& user_labels() const { return user_labels_; }
  const std::vector<std::string>& item_labels() const { return item_labels_; }

  std::optional<UserId> user_index(const std::string& label) const;
  std::optional<ItemId> item_index(const std::string& label) const;

  // Distinct items per user (the rows of the binary feedback matrix),
  // sorted ascending.
  std::vector<std::vector<ItemId>> distinct_items_by_user() const;

 private:
  std::vector<Interaction> interactions_;
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<std::string> user_labels_;
  std::vector<std::string> item_labels_;
  std::unordered_map<std::string, UserId> user_index_;
  std::unordered_map<std::string, ItemId> item_index_;
};

// Per-item provider metadata: provider id, one attribute value drawn from a
// finite vocabulary A with |A| >= 2, and an optional category set.
class ItemCatalog {
 public:
  struct ItemInfo {
    std::uint32_t provider;
    AttrId attribute;
    std::vector<std::uint32_t> categories;  // sorted, deduplicated
  };

  ItemCatalog(std::vector<ItemInfo> items,
              std::vector<std::string> attribute_values,
              std::vector<std::string> provider_labels,
              std::vector<std::string> category_labels);

  std::size_t num_items() const { return items_.size(); }
  std::size_t num_attributes() const { return attribute_values_.size(); }

  AttrId attribute_of(ItemId i) const { return items_[i].attribute; }
  const ItemInfo& item(ItemId i) const { return items_[i]; }
  const std::vector<std::uint32_t>& categories_of(ItemId i) const {
    return items_[i].categories;
  }

  const std::string& attribute_value(AttrId a) const {
    return attribute_values_[a];
  }
  const std::vector<std::string>& attribute_values() const {
    return attribute_values_;
  }
  std::optional<AttrId> attribute_index(const std::string& value) const;

  const std::string& provider_label(std::uint32_t p) const {
    return provider_labels_[p];
  }
  const std::string& category_label(std::uint32_t c) const {
    return category_labels_[c];
  }

  // |I^a| per attribute value.
  std::vector<std::size_t> group_sizes() const;

 private:
  std::vector<ItemInfo> items_;
  std::vector<std::string> attribute_values_;
  std::vector<std::string> provider_labels_;
  std::vector<std::string> category_labels_;
};

// Temporal train/test partition of a log. Per user, every test timestamp is
// >= every train timestamp.
struct SplitPair {
  InteractionLog train;
  InteractionLog test;
};

// Group representation fractions over the attribute vocabulary; each vector
// sums to 1 within 1e-9.
struct GroupShares {
  std::vector<double> catalog_share;
  std::vector<double> interaction_share;
};

// Deterministic desk-scale dataset generator parameters.
struct SynthSpec {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  double minority_catalog_share = 0.0;
  double minority_affinity = 0.0;
  std::size_t interactions_per_user = 0;
  std::uint64_t seed = 0;
};

// Parses the interactions CSV (header `user_id,item_id,timestamp`) and
// re-indexes ids densely from 0 in first-seen order.
InteractionLog load_interactions(const std::string& path);

// Parses the items CSV (header `item_id,provider_id,attribute,categories`)
// and builds the catalog for every item in `log`. Rows for items absent from
// the log are ignored.
ItemCatalog load_item_metadata(const std::string& path,
                               const InteractionLog& log);

// Per user, the ceil(holdout * |I_u|) most recent interactions go to test.
// Ties on timestamp are broken by input order (later rows are more recent).
// A user with a single interaction stays entirely in train.
SplitPair temporal_split(const InteractionLog& log, double holdout);

// Catalog and interaction representation per attribute value. Interaction
// counts are over distinct (user, item) pairs, i.e. over the binary matrix.
GroupShares group_shares(const ItemCatalog& catalog, const InteractionLog& log);

// Two-group synthetic dataset: items fall into the minority group with
// probability spec.minority_catalog_share, and each user draws
// spec.interactions_per_user distinct items, picking the minority pool with
// probability spec.minority_affinity. Timestamps are sequential.
std::pair<InteractionLog, ItemCatalog> synthesize_dataset(
    const SynthSpec& spec);

// File writers; all emit original id labels.
void write_interactions_csv(const InteractionLog& log, const std::string& path);
void write_items_csv(const ItemCatalog& catalog, const InteractionLog& log,
                     const std::string& path);
void write_id_map(const InteractionLog& log, const std::string& path);

}  // namespace exprb
