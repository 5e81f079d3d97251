#include <gtest/gtest.h>

#include <random>

#include "dsaplan/brute_force.hpp"
#include "dsaplan/exact.hpp"
#include "dsaplan/pool.hpp"
#include "dsaplan/profiler.hpp"

namespace dsaplan {
namespace {

TEST(PoolAllocator, FirstRequestBumpsAtZero) {
  PoolAllocator pool;
  EXPECT_EQ(pool.allocate(10).address, 0u);
  EXPECT_EQ(pool.peak(), 10u);
}

// A4, F1, A2, A2, F2, F3: the first 2-byte request reuses the cached 4-byte
// block whole; the second bumps to 4..6.
TEST(PoolAllocator, SmallestFitReuseWithoutSplitting) {
  PoolAllocator pool;
  auto a = pool.allocate(4);
  pool.release(a.handle);
  EXPECT_EQ(pool.cached_blocks(), 1u);
  auto b = pool.allocate(2);
  EXPECT_EQ(b.address, 0u);
  auto c = pool.allocate(2);
  EXPECT_EQ(c.address, 4u);
  pool.release(b.handle);
  pool.release(c.handle);
  EXPECT_EQ(pool.peak(), 6u);
  EXPECT_TRUE(pool.is_cached(0, 4));
  EXPECT_TRUE(pool.is_cached(4, 2));
}

TEST(PoolAllocator, SamePlannedTraceHasSmallerOptimum) {
  auto inst = profile_to_instance(record(parse_trace("A 4\nF 1\nA 2\nA 2\nF 2\nF 3\n")));
  ASSERT_EQ(inst.size(), 3u);
  EXPECT_EQ(inst.block(1).alloc_time, 1);
  EXPECT_EQ(inst.block(1).free_time, 2);
  EXPECT_EQ(inst.block(2).alloc_time, 3);
  EXPECT_EQ(inst.block(3).alloc_time, 4);
  EXPECT_EQ(colliding_pairs(inst).pairs,
            (std::vector<std::pair<BlockId, BlockId>>{{2, 3}}));
  EXPECT_EQ(brute_force_peak(inst), 4u);
  EXPECT_EQ(solve_exact(inst).plan.peak, 4u);
}

TEST(PoolAllocator, PicksSmallestSufficientBlock) {
  PoolAllocator pool;
  auto big = pool.allocate(8);
  auto mid = pool.allocate(5);
  auto small = pool.allocate(3);
  pool.release(big.handle);
  pool.release(mid.handle);
  pool.release(small.handle);
  EXPECT_EQ(pool.allocate(4).address, mid.address);
  EXPECT_EQ(pool.allocate(1).address, small.address);
  EXPECT_EQ(pool.allocate(6).address, big.address);
  EXPECT_EQ(pool.peak(), 16u);
}

TEST(PoolAllocator, FlushOnCapacityPressure) {
  PoolAllocator pool(Bytes{10});
  auto a = pool.allocate(4);
  auto b = pool.allocate(4);
  pool.release(a.handle);
  pool.release(b.handle);
  // 6 bytes fit neither cached block nor the 2 bytes left: flush, coalesce
  // the two holes back into the frontier, and retry.
  auto c = pool.allocate(6);
  EXPECT_EQ(c.address, 0u);
  EXPECT_EQ(pool.flushes(), 1u);
  EXPECT_EQ(pool.cached_blocks(), 0u);
  EXPECT_EQ(pool.peak(), 8u);
}

TEST(PoolAllocator, FlushReusesInteriorHoles) {
  PoolAllocator pool(Bytes{12});
  auto a = pool.allocate(4);
  auto b = pool.allocate(4);
  auto keep = pool.allocate(4);
  pool.release(a.handle);
  pool.release(b.handle);
  auto c = pool.allocate(6);  // flush merges [0,8) into one hole
  EXPECT_EQ(c.address, 0u);
  EXPECT_EQ(pool.live_blocks(), 2u);
  (void)keep;
}

TEST(PoolAllocator, OutOfMemory) {
  PoolAllocator pool(Bytes{8});
  pool.allocate(6);
  try {
    pool.allocate(4);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfMemory);
  }
}

TEST(PoolAllocator, ReleaseErrors) {
  PoolAllocator pool;
  auto a = pool.allocate(4);
  pool.release(a.handle);
  try {
    pool.release(a.handle);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::DoubleFree);
  }
  try {
    pool.release(99);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownId);
  }
  EXPECT_THROW(pool.allocate(0), Error);
}

TEST(PoolAllocator, LiveBlocksNeverOverlap) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    PoolAllocator pool(rng() % 2 ? std::optional<Bytes>{} : std::optional<Bytes>{4096});
    std::vector<std::pair<PoolAllocator::Allocation, Bytes>> live;
    Bytes last_peak = 0;
    for (int step = 0; step < 300; ++step) {
      if (live.empty() || rng() % 3 != 0) {
        Bytes size = 1 + rng() % 200;
        try {
          live.emplace_back(pool.allocate(size), size);
        } catch (const Error &) {
          continue;
        }
      } else {
        auto k = rng() % live.size();
        pool.release(live[k].first.handle);
        live.erase(live.begin() + static_cast<long>(k));
      }
      EXPECT_GE(pool.peak(), last_peak);
      last_peak = pool.peak();
      for (std::size_t i = 0; i < live.size(); ++i)
        for (std::size_t j = i + 1; j < live.size(); ++j) {
          auto ai = live[i].first.address, aj = live[j].first.address;
          EXPECT_FALSE(ai < aj + live[j].second && aj < ai + live[i].second);
        }
    }
  }
}

}  // namespace
}  // namespace dsaplan
