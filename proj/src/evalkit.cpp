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

#include "exprb/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace exprb {
namespace {

double jaccard(const std::vector<std::uint32_t>& a,
               const std::vector<std::uint32_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  // Both sorted and deduplicated by the catalog.
  std::size_t inter = 0, ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] == b[ib]) {
      ++inter;
      ++ia;
      ++ib;
    } else if (a[ia] < b[ib]) {
      ++ia;
    } else {
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double ndcg_at_k(const RankedList& list,
                 const std::unordered_set<ItemId>& relevant, std::size_t k) {
  if (relevant.empty()) {
    throw std::invalid_argument("ndcg_at_k with empty relevant set");
  }
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  double dcg = 0.0;
  const std::size_t prefix = std::min(k, list.size());
  for (std::size_t p = 1; p <= prefix; ++p) {
    if (relevant.count(list.entries[p - 1].item) > 0) {
      dcg += position_weight(p);
    }
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, relevant.size());
  for (std::size_t p = 1; p <= ideal; ++p) idcg += position_weight(p);
  return dcg / idcg;
}

double minority_exposure(const std::map<UserId, RankedList>& lists,
                         const ItemCatalog& catalog, AttrId minority,
                         std::size_t k) {
  if (lists.empty()) throw std::invalid_argument("no lists to evaluate");
  if (minority >= catalog.num_attributes()) {
    throw std::invalid_argument("unknown attribute value");
  }
  double sum = 0.0;
  for (const auto& [user, list] : lists) {
    sum += achieved_exposure(list, catalog, k)[minority];
  }
  return sum / static_cast<double>(lists.size());
}

double catalog_coverage(const std::map<UserId, RankedList>& lists,
                        std::size_t num_items) {
  if (num_items == 0) throw std::invalid_argument("empty catalog");
  std::vector<char> seen(num_items, 0);
  std::size_t covered = 0;
  for (const auto& [user, list] : lists) {
    for (const auto& entry : list.entries) {
      if (!seen[entry.item]) {
        seen[entry.item] = 1;
        ++covered;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(num_items);
}

double category_diversity(const RankedList& list, const ItemCatalog& catalog) {
  if (list.empty()) throw std::invalid_argument("empty list");
  if (list.size() == 1) {
    warn("category_diversity on a singleton list is 0 by convention");
    return 0.0;
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      sum += 1.0 - jaccard(catalog.categories_of(list.entries[i].item),
                           catalog.categories_of(list.entries[j].item));
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

std::vector<double> item_popularity(const InteractionLog& train) {
  std::vector<std::unordered_set<UserId>> users_of(train.num_items());
  for (const auto& event : train.interactions()) {
    users_of[event.item].insert(event.user);
  }
  std::vector<double> popularity(train.num_items(), 0.0);
  for (ItemId i = 0; i < train.num_items(); ++i) {
    popularity[i] = static_cast<double>(users_of[i].size()) /
                    static_cast<double>(train.num_users());
  }
  return popularity;
}

double novelty(const RankedList& list, std::span<const double> popularity) {
  if (list.empty()) throw std::invalid_argument("empty list");
  double sum = 0.0;
  for (const auto& entry : list.entries) {
    const double pop =
        entry.item < popularity.size() ? popularity[entry.item] : 0.0;
    sum += 1.0 - pop;
  }
  return sum / static_cast<double>(list.size());
}

double novelty(const RankedList& list, const InteractionLog& train) {
  const auto popularity = item_popularity(train);
  return novelty(list, popularity);
}

MetricsReport build_report(
    const std::map<UserId, RankedList>& lists,
    const std::map<UserId, std::unordered_set<ItemId>>& relevant,
    const ItemCatalog& catalog, const InteractionLog& train, AttrId minority,
    std::size_t k, std::size_t excluded_users) {
  if (lists.empty()) throw std::invalid_argument("no users to report on");
  if (minority >= catalog.num_attributes()) {
    throw std::invalid_argument("unknown minority attribute");
  }

  const auto popularity = item_popularity(train);

  MetricsReport report;
  report.k = k;
  report.minority = minority;
  report.excluded_users = excluded_users;
  report.per_user.reserve(lists.size());

  double ndcg_sum = 0.0, expo_sum = 0.0, div_sum = 0.0, nov_sum = 0.0;
  for (const auto& [user, list] : lists) {
    const auto rel = relevant.find(user);
    if (rel == relevant.end()) {
      throw std::invalid_argument("user " + std::to_string(user) +
                                  " has no relevance set");
    }
    const RankedList top = list.prefix(k);
    UserMetrics m{ndcg_at_k(top, rel->second, k),
                  achieved_exposure(top, catalog, k),
                  category_diversity(top, catalog), novelty(top, popularity)};
    ndcg_sum += m.ndcg;
    expo_sum += m.exposure[minority];
    div_sum += m.diversity;
    nov_sum += m.novelty;
    report.per_user.emplace_back(user, std::move(m));
  }

  const auto count = static_cast<double>(report.per_user.size());
  report.aggregate.ndcg = ndcg_sum / count;
  report.aggregate.minority_exposure = expo_sum / count;
  report.aggregate.coverage = catalog_coverage(lists, catalog.num_items());
  report.aggregate.diversity = div_sum / count;
  report.aggregate.novelty = nov_sum / count;
  return report;
}

void write_report_csv(const MetricsReport& report, const InteractionLog& log,
                      const ItemCatalog& catalog, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "user_id,ndcg";
  for (const auto& value : catalog.attribute_values()) {
    out << ",exposure_" << value;
  }
  out << ",diversity,novelty\n";
  for (const auto& [user, m] : report.per_user) {
    out << log.user_label(user) << ',' << fixed6(m.ndcg);
    for (std::size_t a = 0; a < catalog.num_attributes(); ++a) {
      out << ',' << fixed6(m.exposure[static_cast<AttrId>(a)]);
    }
    out << ',' << fixed6(m.diversity) << ',' << fixed6(m.novelty) << '\n';
  }
}

void write_summary(
    const std::vector<std::pair<std::string, const MetricsReport*>>& rows,
    const ItemCatalog& catalog, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("no summary rows");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);

  out << "run\tndcg\te_minority\tcov\tdiv\tnov\n";
  for (const auto& [label, report] : rows) {
    out << label << '\t' << fixed4(report->aggregate.ndcg) << '\t'
        << fixed4(report->aggregate.minority_exposure) << '\t'
        << fixed4(report->aggregate.coverage) << '\t'
        << fixed4(report->aggregate.diversity) << '\t'
        << fixed4(report->aggregate.novelty) << '\n';
  }

  const MetricsReport& first = *rows.front().second;
  out << "\nminority attribute: "
      << catalog.attribute_value(first.minority) << "\n";
  out << "k: " << first.k << "\n";
  out << "users evaluated: " << first.per_user.size() << " (excluded "
      << first.excluded_users << " with empty test sets)\n";
}

}  // namespace exprb
