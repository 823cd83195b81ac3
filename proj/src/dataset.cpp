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

#include "exprb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "csv.hpp"

namespace exprb {
namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

InteractionLog::InteractionLog(std::vector<Interaction> interactions,
                               std::size_t num_users, std::size_t num_items,
                               std::vector<std::string> user_labels,
                               std::vector<std::string> item_labels)
    : interactions_(std::move(interactions)),
      num_users_(num_users),
      num_items_(num_items),
      user_labels_(std::move(user_labels)),
      item_labels_(std::move(item_labels)) {
  if (user_labels_.size() != num_users_ || item_labels_.size() != num_items_) {
    throw std::invalid_argument("id label tables do not match log dimensions");
  }
  for (const auto& event : interactions_) {
    if (event.user >= num_users_ || event.item >= num_items_) {
      throw std::invalid_argument("interaction id out of range");
    }
    if (event.timestamp < 0) {
      throw std::invalid_argument("negative timestamp");
    }
  }
  user_index_.reserve(num_users_);
  for (std::size_t u = 0; u < num_users_; ++u) {
    user_index_.emplace(user_labels_[u], static_cast<UserId>(u));
  }
  item_index_.reserve(num_items_);
  for (std::size_t i = 0; i < num_items_; ++i) {
    item_index_.emplace(item_labels_[i], static_cast<ItemId>(i));
  }
}

std::optional<UserId> InteractionLog::user_index(
    const std::string& label) const {
  const auto it = user_index_.find(label);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemId> InteractionLog::item_index(
    const std::string& label) const {
  const auto it = item_index_.find(label);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::vector<ItemId>> InteractionLog::distinct_items_by_user()
    const {
  std::vector<std::vector<ItemId>> by_user(num_users_);
  for (const auto& event : interactions_) {
    by_user[event.user].push_back(event.item);
  }
  for (auto& items : by_user) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  return by_user;
}

ItemCatalog::ItemCatalog(std::vector<ItemInfo> items,
                         std::vector<std::string> attribute_values,
                         std::vector<std::string> provider_labels,
                         std::vector<std::string> category_labels)
    : items_(std::move(items)),
      attribute_values_(std::move(attribute_values)),
      provider_labels_(std::move(provider_labels)),
      category_labels_(std::move(category_labels)) {
  if (attribute_values_.size() < 2) {
    throw std::invalid_argument(
        "attribute must partition items into >=2 groups");
  }
  for (const auto& info : items_) {
    if (info.attribute >= attribute_values_.size()) {
      throw std::invalid_argument("attribute id out of range");
    }
  }
}

std::optional<AttrId> ItemCatalog::attribute_index(
    const std::string& value) const {
  for (std::size_t a = 0; a < attribute_values_.size(); ++a) {
    if (attribute_values_[a] == value) return static_cast<AttrId>(a);
  }
  return std::nullopt;
}

std::vector<std::size_t> ItemCatalog::group_sizes() const {
  std::vector<std::size_t> sizes(attribute_values_.size(), 0);
  for (const auto& info : items_) sizes[info.attribute] += 1;
  return sizes;
}

InteractionLog load_interactions(const std::string& path) {
  csv::Reader reader(path, "user_id,item_id,timestamp");

  std::vector<Interaction> events;
  std::vector<std::string> user_labels;
  std::vector<std::string> item_labels;
  std::unordered_map<std::string, UserId> user_index;
  std::unordered_map<std::string, ItemId> item_index;

  std::vector<std::string> fields;
  while (reader.next(fields, 3)) {
    if (fields[0].empty() || fields[1].empty()) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": empty id field");
    }
    const auto ts = csv::parse_number<std::int64_t>(fields[2], "timestamp",
                                                    reader.line_no());
    if (ts < 0) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": negative timestamp");
    }

    auto [uit, user_new] = user_index.try_emplace(
        fields[0], static_cast<UserId>(user_labels.size()));
    if (user_new) user_labels.push_back(fields[0]);
    auto [iit, item_new] = item_index.try_emplace(
        fields[1], static_cast<ItemId>(item_labels.size()));
    if (item_new) item_labels.push_back(fields[1]);

    events.push_back(Interaction{uit->second, iit->second, ts});
  }
  if (events.empty()) throw std::runtime_error(path + ": no interactions");
  const std::size_t num_users = user_labels.size();
  const std::size_t num_items = item_labels.size();

  // Repeated (user, item) pairs are allowed only at distinct timestamps.
  std::vector<std::size_t> order(events.size());
  for (std::size_t idx = 0; idx < order.size(); ++idx) order[idx] = idx;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = events[a];
    const auto& y = events[b];
    if (x.user != y.user) return x.user < y.user;
    if (x.item != y.item) return x.item < y.item;
    return x.timestamp < y.timestamp;
  });
  for (std::size_t idx = 1; idx < order.size(); ++idx) {
    const auto& x = events[order[idx - 1]];
    const auto& y = events[order[idx]];
    if (x.user == y.user && x.item == y.item && x.timestamp == y.timestamp) {
      throw std::runtime_error(
          path + ": duplicate interaction (user " + user_labels[x.user] +
          ", item " + item_labels[x.item] + ", timestamp " +
          std::to_string(x.timestamp) + ")");
    }
  }

  return InteractionLog(std::move(events), num_users, num_items,
                        std::move(user_labels), std::move(item_labels));
}

ItemCatalog load_item_metadata(const std::string& path,
                               const InteractionLog& log) {
  csv::Reader reader(path, "item_id,provider_id,attribute,categories");

  struct RawInfo {
    std::string provider;
    std::string attribute;
    std::vector<std::string> categories;
  };
  std::unordered_map<std::string, RawInfo> rows;

  std::vector<std::string> fields;
  while (reader.next(fields, 4)) {
    if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": empty required field");
    }
    RawInfo info;
    info.provider = fields[1];
    info.attribute = fields[2];
    if (!fields[3].empty()) {
      for (auto& cat : csv::split_fields(fields[3], '|')) {
        if (!cat.empty()) info.categories.push_back(std::move(cat));
      }
    }
    if (!rows.emplace(fields[0], std::move(info)).second) {
      throw std::runtime_error(path + ": line " +
                               std::to_string(reader.line_no()) +
                               ": duplicate item '" + fields[0] + "'");
    }
  }

  std::vector<std::string> missing;
  for (ItemId i = 0; i < log.num_items(); ++i) {
    if (rows.find(log.item_label(i)) == rows.end()) {
      if (missing.size() < 10) missing.push_back(log.item_label(i));
    }
  }
  if (!missing.empty()) {
    std::string message = path + ": items missing metadata:";
    for (const auto& id : missing) message += " " + id;
    throw std::runtime_error(message);
  }

  std::vector<ItemCatalog::ItemInfo> items(log.num_items());
  std::vector<std::string> attribute_values;
  std::vector<std::string> provider_labels;
  std::vector<std::string> category_labels;
  std::unordered_map<std::string, AttrId> attr_index;
  std::unordered_map<std::string, std::uint32_t> provider_index;
  std::unordered_map<std::string, std::uint32_t> category_index;

  for (ItemId i = 0; i < log.num_items(); ++i) {
    const RawInfo& raw = rows.at(log.item_label(i));

    auto [ait, attr_new] = attr_index.try_emplace(
        raw.attribute, static_cast<AttrId>(attribute_values.size()));
    if (attr_new) attribute_values.push_back(raw.attribute);

    auto [pit, prov_new] = provider_index.try_emplace(
        raw.provider, static_cast<std::uint32_t>(provider_labels.size()));
    if (prov_new) provider_labels.push_back(raw.provider);

    ItemCatalog::ItemInfo info;
    info.provider = pit->second;
    info.attribute = ait->second;
    for (const auto& cat : raw.categories) {
      auto [cit, cat_new] = category_index.try_emplace(
          cat, static_cast<std::uint32_t>(category_labels.size()));
      if (cat_new) category_labels.push_back(cat);
      info.categories.push_back(cit->second);
    }
    std::sort(info.categories.begin(), info.categories.end());
    info.categories.erase(
        std::unique(info.categories.begin(), info.categories.end()),
        info.categories.end());
    items[i] = std::move(info);
  }

  if (attribute_values.size() < 2) {
    throw std::runtime_error(
        path + ": attribute must partition items into >=2 groups");
  }

  return ItemCatalog(std::move(items), std::move(attribute_values),
                     std::move(provider_labels), std::move(category_labels));
}

SplitPair temporal_split(const InteractionLog& log, double holdout) {
  if (!(holdout > 0.0 && holdout < 1.0)) {
    throw std::invalid_argument("holdout must be in (0,1)");
  }

  // Per user, event indices ordered oldest -> newest, timestamp ties broken
  // by input order.
  std::vector<std::vector<std::size_t>> by_user(log.num_users());
  const auto& events = log.interactions();
  for (std::size_t idx = 0; idx < events.size(); ++idx) {
    by_user[events[idx].user].push_back(idx);
  }

  std::vector<char> in_test(events.size(), 0);
  std::size_t single_interaction_users = 0;
  for (UserId u = 0; u < log.num_users(); ++u) {
    auto& order = by_user[u];
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return events[a].timestamp < events[b].timestamp;
                     });
    const std::size_t n = order.size();
    if (n < 2) {
      if (n == 1) ++single_interaction_users;
      continue;
    }
    auto count =
        static_cast<std::size_t>(std::ceil(holdout * static_cast<double>(n) -
                                           1e-9));
    count = std::min(std::max<std::size_t>(count, 1), n - 1);
    for (std::size_t j = n - count; j < n; ++j) in_test[order[j]] = 1;
  }
  if (single_interaction_users > 0) {
    warn(std::to_string(single_interaction_users) +
         " user(s) with a single interaction kept entirely in train");
  }

  std::vector<Interaction> train_events;
  std::vector<Interaction> test_events;
  for (std::size_t idx = 0; idx < events.size(); ++idx) {
    (in_test[idx] ? test_events : train_events).push_back(events[idx]);
  }

  InteractionLog train(std::move(train_events), log.num_users(),
                       log.num_items(), log.user_labels(), log.item_labels());
  InteractionLog test(std::move(test_events), log.num_users(), log.num_items(),
                      log.user_labels(), log.item_labels());
  return SplitPair{std::move(train), std::move(test)};
}

GroupShares group_shares(const ItemCatalog& catalog,
                         const InteractionLog& log) {
  if (catalog.num_items() < log.num_items()) {
    throw std::invalid_argument("catalog does not cover the log's items");
  }
  const std::size_t num_attrs = catalog.num_attributes();

  GroupShares shares;
  shares.catalog_share.assign(num_attrs, 0.0);
  shares.interaction_share.assign(num_attrs, 0.0);

  const auto sizes = catalog.group_sizes();
  for (std::size_t a = 0; a < num_attrs; ++a) {
    shares.catalog_share[a] =
        static_cast<double>(sizes[a]) / static_cast<double>(catalog.num_items());
  }

  // Binary feedback: repeated events collapse to one (user, item) pair.
  std::unordered_set<std::uint64_t> pairs;
  pairs.reserve(log.interactions().size());
  std::vector<std::size_t> counts(num_attrs, 0);
  std::size_t total = 0;
  for (const auto& event : log.interactions()) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(event.user) << 32) | event.item;
    if (!pairs.insert(key).second) continue;
    counts[catalog.attribute_of(event.item)] += 1;
    ++total;
  }
  if (total == 0) throw std::invalid_argument("log has no interactions");
  for (std::size_t a = 0; a < num_attrs; ++a) {
    shares.interaction_share[a] =
        static_cast<double>(counts[a]) / static_cast<double>(total);
  }
  return shares;
}

std::pair<InteractionLog, ItemCatalog> synthesize_dataset(
    const SynthSpec& spec) {
  if (spec.num_users == 0 || spec.num_items == 0 ||
      spec.interactions_per_user == 0) {
    throw std::invalid_argument("synth counts must be positive");
  }
  if (!(spec.minority_catalog_share > 0.0 && spec.minority_catalog_share < 1.0) ||
      !(spec.minority_affinity > 0.0 && spec.minority_affinity < 1.0)) {
    throw std::invalid_argument("synth fractions must be in (0,1)");
  }
  if (spec.interactions_per_user > spec.num_items) {
    throw std::invalid_argument(
        "interactions_per_user exceeds the item count");
  }

  // Item assignment: minority flag, provider, 1-2 categories from a small
  // vocabulary.
  std::mt19937_64 item_rng(derive_seed(spec.seed, "synth.items"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::size_t kNumCategories = 6;

  std::vector<ItemCatalog::ItemInfo> infos(spec.num_items);
  std::vector<std::string> provider_labels(spec.num_items);
  std::vector<ItemId> minority_pool;
  std::vector<ItemId> majority_pool;
  for (ItemId i = 0; i < spec.num_items; ++i) {
    const bool minority = unit(item_rng) < spec.minority_catalog_share;
    (minority ? minority_pool : majority_pool).push_back(i);
    infos[i].provider = i;
    infos[i].attribute = minority ? 0u : 1u;
    provider_labels[i] = "p" + std::to_string(i);

    std::uniform_int_distribution<std::uint32_t> cat(0, kNumCategories - 1);
    infos[i].categories.push_back(cat(item_rng));
    if (unit(item_rng) < 0.5) {
      const std::uint32_t extra = cat(item_rng);
      if (extra != infos[i].categories[0]) infos[i].categories.push_back(extra);
    }
    std::sort(infos[i].categories.begin(), infos[i].categories.end());
  }
  if (minority_pool.empty()) {
    throw std::runtime_error("synthesized catalog has no minority items");
  }
  if (majority_pool.empty()) {
    throw std::runtime_error("synthesized catalog has no majority items");
  }

  std::vector<std::string> category_labels;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    category_labels.push_back("c" + std::to_string(c));
  }
  ItemCatalog catalog(std::move(infos), {"minority", "majority"},
                      std::move(provider_labels), std::move(category_labels));

  // Interactions: per draw, pick the minority pool with the affinity
  // probability, then a uniform unused item from that pool. Falls back to
  // the other pool when the chosen one is exhausted for this user.
  std::mt19937_64 draw_rng(derive_seed(spec.seed, "synth.interactions"));
  std::vector<Interaction> events;
  events.reserve(spec.num_users * spec.interactions_per_user);
  std::int64_t clock = 0;
  for (UserId u = 0; u < spec.num_users; ++u) {
    std::vector<ItemId> minority_left = minority_pool;
    std::vector<ItemId> majority_left = majority_pool;
    for (std::size_t d = 0; d < spec.interactions_per_user; ++d) {
      bool pick_minority = unit(draw_rng) < spec.minority_affinity;
      if (pick_minority && minority_left.empty()) pick_minority = false;
      if (!pick_minority && majority_left.empty()) pick_minority = true;
      auto& pool = pick_minority ? minority_left : majority_left;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const std::size_t slot = pick(draw_rng);
      const ItemId item = pool[slot];
      pool[slot] = pool.back();
      pool.pop_back();
      events.push_back(Interaction{u, item, clock++});
    }
  }

  std::vector<std::string> user_labels(spec.num_users);
  std::vector<std::string> item_labels(spec.num_items);
  for (UserId u = 0; u < spec.num_users; ++u) {
    user_labels[u] = std::to_string(u);
  }
  for (ItemId i = 0; i < spec.num_items; ++i) {
    item_labels[i] = std::to_string(i);
  }
  InteractionLog log(std::move(events), spec.num_users, spec.num_items,
                     std::move(user_labels), std::move(item_labels));
  return {std::move(log), std::move(catalog)};
}

void write_interactions_csv(const InteractionLog& log,
                            const std::string& path) {
  auto out = open_output(path);
  out << "user_id,item_id,timestamp\n";
  for (const auto& event : log.interactions()) {
    out << log.user_label(event.user) << ',' << log.item_label(event.item)
        << ',' << event.timestamp << '\n';
  }
}

void write_items_csv(const ItemCatalog& catalog, const InteractionLog& log,
                     const std::string& path) {
  if (catalog.num_items() != log.num_items()) {
    throw std::invalid_argument("catalog does not match log item space");
  }
  auto out = open_output(path);
  out << "item_id,provider_id,attribute,categories\n";
  for (ItemId i = 0; i < catalog.num_items(); ++i) {
    const auto& info = catalog.item(i);
    out << log.item_label(i) << ',' << catalog.provider_label(info.provider)
        << ',' << catalog.attribute_value(info.attribute) << ',';
    for (std::size_t c = 0; c < info.categories.size(); ++c) {
      if (c > 0) out << '|';
      out << catalog.category_label(info.categories[c]);
    }
    out << '\n';
  }
}

void write_id_map(const InteractionLog& log, const std::string& path) {
  auto out = open_output(path);
  out << "kind,dense_id,original_id\n";
  for (UserId u = 0; u < log.num_users(); ++u) {
    out << "user," << u << ',' << log.user_label(u) << '\n';
  }
  for (ItemId i = 0; i < log.num_items(); ++i) {
    out << "item," << i << ',' << log.item_label(i) << '\n';
  }
}

}  // namespace exprb
