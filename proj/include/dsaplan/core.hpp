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
/// Domain types for offline memory planning: a set of blocks with fixed
/// lifetimes on an integer time axis, and a plan assigning each block a
/// byte offset so that blocks alive at the same time never share bytes.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsaplan/error.hpp"

namespace dsaplan {

using Bytes = std::uint64_t;
using Tick = std::int64_t;
using BlockId = std::uint32_t;

/// One profiled memory block. Its lifetime is the half-open tick interval
/// [alloc_time, free_time).
struct BlockRequest {
  BlockId id = 0;
  Bytes size = 0;
  Tick alloc_time = 0;
  Tick free_time = 0;
  std::string label;

  Tick lifetime() const { return free_time - alloc_time; }

  bool operator==(const BlockRequest &) const = default;
};

/// Half-open interval intersection.
inline bool lifetimes_overlap(const BlockRequest &a, const BlockRequest &b) {
  return std::max(a.alloc_time, b.alloc_time) <
         std::min(a.free_time, b.free_time);
}

inline Bytes round_up(Bytes value, Bytes alignment) {
  return (value + alignment - 1) / alignment * alignment;
}

/// An immutable, validated problem instance. Block i lives at blocks()[i-1].
class DsaInstance {
 public:
  DsaInstance() = default;

  /// Validates without renumbering or rounding. Used when reading plans
  /// back from disk, where the stored instance must round-trip exactly.
  static DsaInstance from_parts(std::vector<BlockRequest> blocks,
                                Bytes capacity, Bytes alignment) {
    if (alignment == 0)
      throw Error(ErrorCode::InvalidInstance, "alignment must be positive");
    Bytes max_size = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto &b = blocks[k];
      if (b.id != k + 1)
        throw Error(ErrorCode::InvalidInstance,
                    "block ids must be 1..n in order; found " +
                        std::to_string(b.id) + " at position " +
                        std::to_string(k + 1));
      check_block(b);
      if (b.size % alignment != 0)
        throw Error(ErrorCode::InvalidInstance,
                    "block " + std::to_string(b.id) +
                        " size is not a multiple of the alignment");
      max_size = std::max(max_size, b.size);
    }
    if (capacity < max_size)
      throw Error(ErrorCode::CapacityTooSmall,
                  "capacity " + std::to_string(capacity) +
                      " is below the largest block " +
                      std::to_string(max_size));
    DsaInstance inst;
    inst.blocks_ = std::move(blocks);
    inst.capacity_ = capacity;
    inst.alignment_ = alignment;
    return inst;
  }

  std::span<const BlockRequest> blocks() const { return blocks_; }
  const BlockRequest &block(BlockId id) const { return blocks_.at(id - 1); }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  Bytes capacity() const { return capacity_; }
  Bytes alignment() const { return alignment_; }

  Bytes total_size() const {
    Bytes total = 0;
    for (const auto &b : blocks_) total += b.size;
    return total;
  }

  Tick min_time() const {
    Tick t = 0;
    for (std::size_t k = 0; k < blocks_.size(); ++k)
      t = k == 0 ? blocks_[k].alloc_time : std::min(t, blocks_[k].alloc_time);
    return t;
  }

  Tick max_time() const {
    Tick t = 0;
    for (const auto &b : blocks_) t = std::max(t, b.free_time);
    return t;
  }

  bool operator==(const DsaInstance &) const = default;

  static void check_block(const BlockRequest &b) {
    if (b.size == 0)
      throw Error(ErrorCode::ZeroSize,
                  "block " + std::to_string(b.id) + " has size 0");
    if (b.alloc_time < 0)
      throw Error(ErrorCode::NegativeTime,
                  "block " + std::to_string(b.id) + " allocated at tick " +
                      std::to_string(b.alloc_time));
    if (b.alloc_time >= b.free_time)
      throw Error(ErrorCode::EmptyLifetime,
                  "block " + std::to_string(b.id) + " has lifetime [" +
                      std::to_string(b.alloc_time) + "," +
                      std::to_string(b.free_time) + ")");
  }

 private:
  std::vector<BlockRequest> blocks_;
  Bytes capacity_ = 0;
  Bytes alignment_ = 1;
};

/// Rounds sizes up to the alignment, renumbers ids 1..n in input order and
/// defaults the capacity to the sum of the rounded sizes.
inline DsaInstance build_instance(std::vector<BlockRequest> blocks,
                                  std::optional<Bytes> capacity = std::nullopt,
                                  Bytes alignment = 1) {
  if (alignment == 0)
    throw Error(ErrorCode::InvalidInstance, "alignment must be positive");
  Bytes total = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    auto &b = blocks[k];
    DsaInstance::check_block(b);
    b.id = static_cast<BlockId>(k + 1);
    b.size = round_up(b.size, alignment);
    total += b.size;
  }
  return DsaInstance::from_parts(std::move(blocks), capacity.value_or(total),
                                 alignment);
}

/// Pairs (i, j), i < j, of blocks whose lifetimes intersect.
struct CollidingPairs {
  std::vector<std::pair<BlockId, BlockId>> pairs;  // sorted

  bool contains(BlockId i, BlockId j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(pairs.begin(), pairs.end(), std::pair{i, j});
  }
  std::size_t size() const { return pairs.size(); }
  bool operator==(const CollidingPairs &) const = default;
};

namespace detail {

/// Block indices ordered by alloc time; the sweep order shared by the
/// interval computations below.
inline std::vector<std::size_t> by_alloc_time(const DsaInstance &inst) {
  std::vector<std::size_t> order(inst.size());
  std::iota(order.begin(), order.end(), 0);
  auto blocks = inst.blocks();
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return blocks[a].alloc_time < blocks[b].alloc_time;
  });
  return order;
}

}  // namespace detail

/// Sweep over alloc events. Blocks whose free time is at or before the
/// current alloc time leave the active set first, so touching lifetimes
/// never collide.
inline CollidingPairs colliding_pairs(const DsaInstance &inst) {
  CollidingPairs out;
  auto blocks = inst.blocks();
  std::vector<std::size_t> active;
  for (auto k : detail::by_alloc_time(inst)) {
    const auto &b = blocks[k];
    std::erase_if(active, [&](std::size_t a) {
      return blocks[a].free_time <= b.alloc_time;
    });
    for (auto a : active) {
      auto i = blocks[a].id, j = b.id;
      out.pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
    active.push_back(k);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

/// Maximum over ticks of the total size of live blocks. Any feasible plan
/// has at least this peak.
inline Bytes clique_lower_bound(const DsaInstance &inst) {
  // (tick, +size) for allocs, (tick, -size) for frees; frees sort first.
  std::vector<std::pair<Tick, std::int64_t>> events;
  events.reserve(inst.size() * 2);
  for (const auto &b : inst.blocks()) {
    events.emplace_back(b.alloc_time, static_cast<std::int64_t>(b.size));
    events.emplace_back(b.free_time, -static_cast<std::int64_t>(b.size));
  }
  std::sort(events.begin(), events.end());
  std::int64_t live = 0, best = 0;
  for (auto [t, delta] : events) {
    live += delta;
    best = std::max(best, live);
  }
  return static_cast<Bytes>(best);
}

enum class Provenance { BestFit, Exact, ExactTimeout };

constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::BestFit: return "BestFit";
    case Provenance::Exact: return "Exact";
    case Provenance::ExactTimeout: return "ExactTimeout";
  }
  return "BestFit";
}

/// Solver output. offsets[i-1] is the byte offset of block i.
struct Plan {
  std::vector<Bytes> offsets;
  Bytes peak = 0;
  Provenance provenance = Provenance::BestFit;

  Bytes offset(BlockId id) const { return offsets.at(id - 1); }
  bool operator==(const Plan &) const = default;
};

/// max(offset + size), 0 for an empty instance.
inline Bytes plan_peak(const DsaInstance &inst, std::span<const Bytes> offsets) {
  Bytes peak = 0;
  auto blocks = inst.blocks();
  for (std::size_t k = 0; k < blocks.size() && k < offsets.size(); ++k)
    peak = std::max(peak, offsets[k] + blocks[k].size);
  return peak;
}

}  // namespace dsaplan
