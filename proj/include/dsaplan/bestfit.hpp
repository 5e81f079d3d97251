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
/// Best-fit placement over a skyline of offset lines.
///
/// The time axis is partitioned into maximal segments ("offset lines"),
/// each carrying the lowest offset at which a new block could start over
/// that span. The solver repeatedly takes the lowest line (leftmost on
/// ties) and places the remaining block with the longest lifetime that
/// fits entirely inside the line's span. When nothing fits, the line is
/// lifted into its lower neighbour (both neighbours when they are level).

#include <algorithm>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dsaplan/core.hpp"

namespace dsaplan {

struct OffsetLine {
  Tick time_lo = 0;
  Tick time_hi = 0;
  Bytes height = 0;

  Tick span() const { return time_hi - time_lo; }
  bool contains(const BlockRequest &b) const {
    return time_lo <= b.alloc_time && b.free_time <= time_hi;
  }
  bool operator==(const OffsetLine &) const = default;
};

class OffsetLineSet {
 public:
  /// A single line [lo, hi) at height 0.
  OffsetLineSet(Tick lo, Tick hi) { insert(lo, hi, 0); }

  /// Lines must tile a contiguous span in order. Adjacent lines are not
  /// merged here; place() and lift_up() restore maximality locally.
  static OffsetLineSet from_lines(std::span<const OffsetLine> lines) {
    if (lines.empty())
      throw Error(ErrorCode::InvalidInstance, "offset line set is empty");
    OffsetLineSet set;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const auto &l = lines[k];
      if (l.time_lo >= l.time_hi)
        throw Error(ErrorCode::InvalidInstance, "empty offset line");
      if (k > 0 && lines[k - 1].time_hi != l.time_lo)
        throw Error(ErrorCode::InvalidInstance, "offset lines do not tile");
      set.insert(l.time_lo, l.time_hi, l.height);
    }
    return set;
  }

  std::vector<OffsetLine> lines() const {
    std::vector<OffsetLine> out;
    out.reserve(segments_.size());
    for (const auto &[lo, seg] : segments_)
      out.push_back({lo, seg.hi, seg.height});
    return out;
  }

  std::size_t size() const { return segments_.size(); }

  /// Lowest line; leftmost among equally low ones.
  OffsetLine choose_offset() const {
    auto [height, lo] = *queue_.begin();
    return {lo, segments_.at(lo).hi, height};
  }

  Bytes height_at(Tick t) const {
    auto it = segments_.upper_bound(t);
    if (it == segments_.begin()) return 0;
    --it;
    return t < it->second.hi ? it->second.height : 0;
  }

  Bytes max_height() const {
    return queue_.empty() ? 0 : std::prev(queue_.end())->first;
  }

  /// Merges `line` into its lower neighbour, or into both when the two
  /// neighbours are level. A boundary line merges with its only neighbour.
  void lift_up(const OffsetLine &line) {
    auto it = find(line);
    if (segments_.size() == 1)
      throw Error(ErrorCode::IllegalLift, "cannot lift the only offset line");
    auto left = it == segments_.begin() ? segments_.end() : std::prev(it);
    auto right = std::next(it);
    bool has_left = left != segments_.end();
    bool has_right = right != segments_.end();

    Tick lo = line.time_lo, hi = line.time_hi;
    Bytes height;
    if (has_left && has_right &&
        left->second.height == right->second.height) {
      lo = left->first;
      hi = right->second.hi;
      height = left->second.height;
      erase(left);
      erase(right);
    } else if (has_left &&
               (!has_right || left->second.height < right->second.height)) {
      lo = left->first;
      height = left->second.height;
      erase(left);
    } else {
      hi = right->second.hi;
      height = right->second.height;
      erase(right);
    }
    erase(it);
    insert(lo, hi, height);
  }

  /// Raises the block's lifetime span by its size and returns the offset
  /// (the line's height) the block was placed at.
  Bytes place(const OffsetLine &line, const BlockRequest &block) {
    if (!line.contains(block))
      throw Error(ErrorCode::ContainmentViolation,
                  "block " + std::to_string(block.id) +
                      " lifetime is not inside the offset line");
    auto it = find(line);
    erase(it);
    if (line.time_lo < block.alloc_time)
      insert(line.time_lo, block.alloc_time, line.height);
    if (block.free_time < line.time_hi)
      insert(block.free_time, line.time_hi, line.height);

    Tick lo = block.alloc_time, hi = block.free_time;
    Bytes raised = line.height + block.size;
    auto next = segments_.find(hi);
    if (next != segments_.end() && next->second.height == raised) {
      hi = next->second.hi;
      erase(next);
    }
    auto after = segments_.lower_bound(lo);
    if (after != segments_.begin()) {
      auto prev = std::prev(after);
      if (prev->second.hi == lo && prev->second.height == raised) {
        lo = prev->first;
        erase(prev);
      }
    }
    insert(lo, hi, raised);
    return line.height;
  }

 private:
  struct Segment {
    Tick hi;
    Bytes height;
  };
  using Iter = std::map<Tick, Segment>::iterator;

  OffsetLineSet() = default;

  Iter find(const OffsetLine &line) {
    auto it = segments_.find(line.time_lo);
    if (it == segments_.end() || it->second.hi != line.time_hi ||
        it->second.height != line.height)
      throw Error(ErrorCode::InvalidInstance,
                  "offset line [" + std::to_string(line.time_lo) + "," +
                      std::to_string(line.time_hi) + ") is not in the set");
    return it;
  }

  void insert(Tick lo, Tick hi, Bytes height) {
    segments_.emplace(lo, Segment{hi, height});
    queue_.emplace(height, lo);
  }

  void erase(Iter it) {
    queue_.erase({it->second.height, it->first});
    segments_.erase(it);
  }

  std::map<Tick, Segment> segments_;
  std::set<std::pair<Bytes, Tick>> queue_;  // (height, time_lo)
};

/// Placement priority: longer lifetime, then larger size, then smaller id.
inline bool better_candidate(const BlockRequest &a, const BlockRequest &b) {
  if (a.lifetime() != b.lifetime()) return a.lifetime() > b.lifetime();
  if (a.size != b.size) return a.size > b.size;
  return a.id < b.id;
}

/// Highest-priority block among `remaining` whose lifetime lies inside the
/// line's span. Linear scan; the solver uses an indexed equivalent.
inline std::optional<BlockRequest> find_block(
    const OffsetLine &line, std::span<const BlockRequest> remaining) {
  const BlockRequest *best = nullptr;
  for (const auto &b : remaining)
    if (line.contains(b) && (!best || better_candidate(b, *best))) best = &b;
  if (!best) return std::nullopt;
  return *best;
}

struct BestFitStats {
  std::size_t placements = 0;
  std::size_t lifts = 0;
};

namespace detail {

/// Unplaced blocks kept in placement-priority order. Lifetimes are
/// non-increasing along the order, so a line only needs to scan from the
/// first block short enough to fit its span.
class RemainingBlocks {
 public:
  explicit RemainingBlocks(std::span<const BlockRequest> blocks)
      : blocks_(blocks) {
    order_.resize(blocks.size());
    for (std::size_t k = 0; k < order_.size(); ++k)
      order_[k] = static_cast<std::uint32_t>(k);
    std::sort(order_.begin(), order_.end(), [&](auto a, auto b) {
      return better_candidate(blocks_[a], blocks_[b]);
    });
  }

  bool empty() const { return order_.empty(); }

  std::optional<std::size_t> take_best(const OffsetLine &line) {
    auto first = std::partition_point(
        order_.begin(), order_.end(),
        [&](auto k) { return blocks_[k].lifetime() > line.span(); });
    for (auto it = first; it != order_.end(); ++it) {
      if (line.contains(blocks_[*it])) {
        std::size_t k = *it;
        order_.erase(it);
        return k;
      }
    }
    return std::nullopt;
  }

 private:
  std::span<const BlockRequest> blocks_;
  std::vector<std::uint32_t> order_;
};

}  // namespace detail

/// Best-fit heuristic. Ignores the instance capacity; the returned peak
/// may exceed it. O(n^2) in the number of blocks.
inline Plan solve_bestfit(const DsaInstance &inst,
                          BestFitStats *stats = nullptr) {
  Plan plan;
  plan.provenance = Provenance::BestFit;
  plan.offsets.assign(inst.size(), 0);
  if (inst.empty()) return plan;

  auto blocks = inst.blocks();
  OffsetLineSet lines(inst.min_time(), inst.max_time());
  detail::RemainingBlocks remaining(blocks);
  BestFitStats local;
  while (!remaining.empty()) {
    auto line = lines.choose_offset();
    if (auto k = remaining.take_best(line)) {
      plan.offsets[*k] = lines.place(line, blocks[*k]);
      ++local.placements;
    } else {
      lines.lift_up(line);
      ++local.lifts;
    }
  }
  plan.peak = lines.max_height();
  if (stats) *stats = local;
  return plan;
}

}  // namespace dsaplan
