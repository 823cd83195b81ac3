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
#include <string>
#include <string_view>
#include <vector>

namespace exprb {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;
using AttrId = std::uint32_t;

// One entry of a ranked recommendation list.
struct ScoredItem {
  ItemId item;
  double score;
};

// Ordered recommendation list; positions are implicit and 1-based, so
// entries[p-1] is the item shown at position p.
struct RankedList {
  std::vector<ScoredItem> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  // 1-based position of `item`, or 0 when the item is not in the list.
  std::size_t position_of(ItemId item) const;

  // Copy of the first min(k, size) entries.
  RankedList prefix(std::size_t k) const;

  std::vector<ItemId> items() const;
};

// Stage seeds derive from one root seed with fixed labels so every pipeline
// stage is independently reproducible.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index);

// Non-fatal diagnostics go to stderr; stdout stays machine-readable.
void warn(const std::string& message);

}  // namespace exprb
