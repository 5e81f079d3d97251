/**
 * Copyright (c) dsaplan contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

/// \file
/// Reference optimum by exhaustive enumeration of below/above orders over
/// all colliding pairs. Test oracle only; no bounding, no heuristics.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

#include "dsaplan/core.hpp"

namespace dsaplan {

inline constexpr std::size_t kBruteForceMaxPairs = 20;

inline Bytes brute_force_peak(const DsaInstance &inst) {
  // Pairs found by direct pairwise comparison, not the sweep.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  auto blocks = inst.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      if (std::max(blocks[i].alloc_time, blocks[j].alloc_time) <
          std::min(blocks[i].free_time, blocks[j].free_time))
        pairs.emplace_back(i, j);
  if (pairs.size() > kBruteForceMaxPairs)
    throw Error(ErrorCode::TooLarge,
                std::to_string(pairs.size()) + " colliding pairs exceed " +
                    std::to_string(kBruteForceMaxPairs));

  Bytes isolated = 0;
  for (const auto &b : blocks) isolated = std::max(isolated, b.size);

  // Compact the vertices that take part in a pair (at most 40).
  std::vector<int> local(blocks.size(), -1);
  std::vector<Bytes> size;
  for (auto &[i, j] : pairs)
    for (auto *v : {&i, &j}) {
      if (local[*v] < 0) {
        local[*v] = static_cast<int>(size.size());
        size.push_back(blocks[*v].size);
      }
      *v = static_cast<std::size_t>(local[*v]);
    }
  std::size_t m = size.size();

  Bytes best = std::numeric_limits<Bytes>::max();
  std::size_t count = pairs.size();
  std::vector<std::uint64_t> reach(m, 0);  // reach[v]: vertices above v
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  auto evaluate = [&] {
    std::vector<Bytes> x(m, 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (auto [lo, hi] : edges)
        if (x[hi] < x[lo] + size[lo]) {
          x[hi] = x[lo] + size[lo];
          changed = true;
        }
    }
    Bytes peak = isolated;
    for (std::size_t v = 0; v < m; ++v) peak = std::max(peak, x[v] + size[v]);
    best = std::min(best, peak);
  };

  auto enumerate = [&](auto &&self, std::size_t depth) -> void {
    if (depth == count) {
      evaluate();
      return;
    }
    auto [i, j] = pairs[depth];
    for (auto [lo, hi] : {std::pair{i, j}, std::pair{j, i}}) {
      if (reach[hi] >> lo & 1) continue;  // would close a cycle
      auto saved = reach;
      std::uint64_t gained = reach[hi] | (std::uint64_t{1} << hi);
      for (std::size_t v = 0; v < m; ++v)
        if (v == lo || (reach[v] >> lo & 1)) reach[v] |= gained;
      edges.emplace_back(lo, hi);
      self(self, depth + 1);
      edges.pop_back();
      reach = std::move(saved);
    }
  };
  enumerate(enumerate, 0);

  if (blocks.empty()) return 0;
  if (best > inst.capacity())
    throw Error(ErrorCode::Infeasible, "no order fits within capacity");
  return best;
}

}  // namespace dsaplan
