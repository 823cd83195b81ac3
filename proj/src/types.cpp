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

#include "exprb/types.hpp"

#include <iostream>

namespace exprb {
namespace {

// splitmix64 finalizer; decorrelates nearby seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::size_t RankedList::position_of(ItemId item) const {
  for (std::size_t idx = 0; idx < entries.size(); ++idx) {
    if (entries[idx].item == item) return idx + 1;
  }
  return 0;
}

RankedList RankedList::prefix(std::size_t k) const {
  RankedList out;
  const std::size_t n = std::min(k, entries.size());
  out.entries.assign(entries.begin(), entries.begin() + n);
  return out;
}

std::vector<ItemId> RankedList::items() const {
  std::vector<ItemId> out;
  out.reserve(entries.size());
  for (const auto& entry : entries) out.push_back(entry.item);
  return out;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  // FNV-1a over the label folded into the root seed.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ mix(root);
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(h);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index) {
  return mix(derive_seed(root, label) ^ mix(index));
}

void warn(const std::string& message) {
  std::cerr << "warning: " << message << "\n";
}

}  // namespace exprb
