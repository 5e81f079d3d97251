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
/// Plan validation by direct pairwise checks, independent of the solvers.

#include <algorithm>
#include <vector>

#include "dsaplan/core.hpp"

namespace dsaplan {

struct Violation {
  BlockId first = 0;
  BlockId second = 0;
  Bytes overlap_bytes = 0;
  Tick overlap_ticks = 0;

  bool operator==(const Violation &) const = default;
};

struct VerifyReport {
  bool valid = false;
  std::vector<Violation> violations;
  Bytes peak_recomputed = 0;
  bool peak_matches = false;
  bool capacity_ok = false;
  double utilization = 0.0;
};

/// Checks every pair of blocks with overlapping lifetimes for disjoint
/// address ranges, and recomputes the peak against the plan's claim.
inline VerifyReport verify_plan(const DsaInstance &inst, const Plan &plan) {
  if (plan.offsets.size() != inst.size())
    throw Error(ErrorCode::MissingOffset,
                "plan has " + std::to_string(plan.offsets.size()) +
                    " offsets for " + std::to_string(inst.size()) + " blocks");
  VerifyReport report;
  auto blocks = inst.blocks();

  std::vector<std::size_t> order(blocks.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return blocks[a].alloc_time < blocks[b].alloc_time;
  });

  // Walk blocks by alloc time and compare each against everything still
  // alive at that tick.
  std::vector<std::size_t> alive;
  for (auto k : order) {
    const auto &b = blocks[k];
    std::erase_if(alive,
                  [&](auto a) { return blocks[a].free_time <= b.alloc_time; });
    Bytes lo = plan.offsets[k], hi = lo + b.size;
    for (auto a : alive) {
      Bytes alo = plan.offsets[a], ahi = alo + blocks[a].size;
      if (alo < hi && lo < ahi) {
        Violation v;
        v.first = std::min(blocks[a].id, b.id);
        v.second = std::max(blocks[a].id, b.id);
        v.overlap_bytes = std::min(hi, ahi) - std::max(lo, alo);
        v.overlap_ticks = std::min(b.free_time, blocks[a].free_time) -
                          std::max(b.alloc_time, blocks[a].alloc_time);
        report.violations.push_back(v);
      }
    }
    alive.push_back(k);
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const auto &x, const auto &y) {
              return std::pair{x.first, x.second} < std::pair{y.first, y.second};
            });

  double area = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    report.peak_recomputed =
        std::max(report.peak_recomputed, plan.offsets[k] + blocks[k].size);
    area += static_cast<double>(blocks[k].size) *
            static_cast<double>(blocks[k].lifetime());
  }
  report.peak_matches = report.peak_recomputed == plan.peak;
  report.capacity_ok = report.peak_recomputed <= inst.capacity();
  // Offsets are unsigned, so non-negativity holds by construction.
  report.valid = report.violations.empty() && report.peak_matches;
  Tick horizon = inst.max_time() - inst.min_time();
  if (report.peak_recomputed > 0 && horizon > 0)
    report.utilization = area / (static_cast<double>(report.peak_recomputed) *
                                 static_cast<double>(horizon));
  return report;
}

/// 1 - peak / baseline. Negative when the plan is worse than the baseline.
inline double reduction_vs(Bytes plan_peak, Bytes baseline_peak) {
  if (baseline_peak == 0)
    throw Error(ErrorCode::ZeroBaseline, "baseline peak is zero");
  return 1.0 - static_cast<double>(plan_peak) /
                   static_cast<double>(baseline_peak);
}

struct PlanStats {
  Bytes peak = 0;
  Bytes lower_bound = 0;
  /// peak / lower_bound, 1.0 for an empty instance.
  double gap_ratio = 1.0;
  double utilization = 0.0;
};

inline PlanStats plan_stats(const DsaInstance &inst, const Plan &plan) {
  auto report = verify_plan(inst, plan);
  PlanStats stats;
  stats.peak = report.peak_recomputed;
  stats.lower_bound = clique_lower_bound(inst);
  if (stats.lower_bound > 0)
    stats.gap_ratio = static_cast<double>(stats.peak) /
                      static_cast<double>(stats.lower_bound);
  stats.utilization = report.utilization;
  return stats;
}

}  // namespace dsaplan
