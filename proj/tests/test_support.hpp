// Test-only helpers: seeded instance generators and independent oracles.
#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "dsaplan/core.hpp"

namespace dsaplan::testing {

struct RandomInstanceSpec {
  std::size_t max_blocks = 10;
  Bytes max_size = 16;
  Tick horizon = 30;     // lifetimes lie in [0, horizon]
  Tick max_lifetime = 30;
};

inline std::uint64_t draw(std::mt19937_64 &rng, std::uint64_t lo,
                          std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

inline std::vector<BlockRequest> random_blocks(std::mt19937_64 &rng,
                                               const RandomInstanceSpec &spec) {
  std::size_t n = draw(rng, 1, spec.max_blocks);
  std::vector<BlockRequest> blocks(n);
  for (auto &b : blocks) {
    b.size = draw(rng, 1, spec.max_size);
    b.alloc_time = static_cast<Tick>(draw(rng, 0, spec.horizon - 1));
    Tick room = std::min(spec.max_lifetime, spec.horizon - b.alloc_time);
    b.free_time = b.alloc_time + static_cast<Tick>(draw(rng, 1, room));
  }
  return blocks;
}

inline DsaInstance random_instance(std::mt19937_64 &rng,
                                   const RandomInstanceSpec &spec = {}) {
  return build_instance(random_blocks(rng, spec));
}

/// Colliding pairs by comparing every pair.
inline std::vector<std::pair<BlockId, BlockId>> pairwise_collisions(
    const DsaInstance &inst) {
  std::vector<std::pair<BlockId, BlockId>> out;
  auto b = inst.blocks();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (std::max(b[i].alloc_time, b[j].alloc_time) <
          std::min(b[i].free_time, b[j].free_time))
        out.emplace_back(b[i].id, b[j].id);
  return out;
}

/// Live bytes evaluated at every tick.
inline Bytes tickwise_peak_live(const DsaInstance &inst) {
  Bytes best = 0;
  for (Tick t = inst.min_time(); t < inst.max_time(); ++t) {
    Bytes live = 0;
    for (const auto &b : inst.blocks())
      if (b.alloc_time <= t && t < b.free_time) live += b.size;
    best = std::max(best, live);
  }
  return best;
}

/// Optimum as the best first-fit packing over all block orders. Each block
/// goes to the lowest offset clear of earlier colliding blocks. Feasible
/// only for very small n.
inline Bytes permutation_optimum(const DsaInstance &inst) {
  auto blocks = inst.blocks();
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  Bytes best = ~Bytes{0};
  if (blocks.empty()) return 0;
  do {
    std::vector<Bytes> x(blocks.size(), 0);
    std::vector<std::size_t> placed;
    Bytes peak = 0;
    for (auto k : order) {
      std::vector<Bytes> candidates{0};
      for (auto p : placed) candidates.push_back(x[p] + blocks[p].size);
      std::sort(candidates.begin(), candidates.end());
      for (auto c : candidates) {
        bool ok = true;
        for (auto p : placed)
          if (lifetimes_overlap(blocks[k], blocks[p]) &&
              c < x[p] + blocks[p].size && x[p] < c + blocks[k].size)
            ok = false;
        if (ok) {
          x[k] = c;
          break;
        }
      }
      placed.push_back(k);
      peak = std::max(peak, x[k] + blocks[k].size);
    }
    best = std::min(best, peak);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

/// Independent overlap check on a plan.
inline bool plan_is_disjoint(const DsaInstance &inst,
                             const std::vector<Bytes> &offsets) {
  auto b = inst.blocks();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (lifetimes_overlap(b[i], b[j]) &&
          offsets[i] < offsets[j] + b[j].size &&
          offsets[j] < offsets[i] + b[i].size)
        return false;
  return true;
}

/// The worked three-block example used throughout.
inline DsaInstance three_block_instance() {
  return build_instance({{0, 4, 1, 3, ""}, {0, 2, 2, 5, ""}, {0, 3, 4, 6, ""}});
}

}  // namespace dsaplan::testing
