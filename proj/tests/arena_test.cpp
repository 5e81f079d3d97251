#include <gtest/gtest.h>

#include <random>

#include "dsaplan/arena.hpp"
#include "dsaplan/profiler.hpp"
#include "test_support.hpp"

namespace dsaplan {
namespace {

using testing::three_block_instance;

Plan worked_plan() { return {{2, 0, 2}, 6, Provenance::BestFit}; }

ErrorCode code_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::FormatError;
}

bool live_disjoint(const Arena &arena) {
  auto live = arena.live_blocks();
  for (std::size_t i = 0; i < live.size(); ++i)
    for (std::size_t j = i + 1; j < live.size(); ++j)
      if (live[i].address < live[j].address + live[j].size &&
          live[j].address < live[i].address + live[i].size)
        return false;
  return true;
}

TEST(ArenaOpen, FreshArena) {
  Arena arena(three_block_instance(), worked_plan());
  EXPECT_EQ(arena.lambda(), 1u);
  EXPECT_EQ(arena.peak_usage(), 6u);
  EXPECT_EQ(arena.live_count(), 0u);
  EXPECT_EQ(arena.expected_size(1), 4u);
}

TEST(ArenaOpen, RejectsInvalidPlans) {
  EXPECT_EQ(code_of([] {
              Arena(three_block_instance(), {{0, 0, 2}, 5, Provenance::BestFit});
            }),
            ErrorCode::InvalidPlan);
  EXPECT_EQ(code_of([] {
              Arena(three_block_instance(), {{2, 0}, 6, Provenance::BestFit});
            }),
            ErrorCode::InvalidPlan);
}

TEST(ArenaOpen, EmptyPlanServesOnlyFallback) {
  ArenaOptions opts;
  opts.extra_requests = ExtraRequestPolicy::Error;
  Arena arena(build_instance({}), Plan{}, opts);
  arena.interrupt();
  auto s = arena.allocate(9);
  EXPECT_FALSE(s.ticket.managed);
  arena.resume();
  EXPECT_EQ(code_of([&] { arena.allocate(1); }), ErrorCode::ExtraRequest);
  EXPECT_EQ(arena.peak_usage(), 9u);
}

TEST(ArenaAlloc, ServesPlannedOffsetsInOrder) {
  Arena arena(three_block_instance(), worked_plan());
  auto a = arena.allocate(4);
  auto b = arena.allocate(2);
  arena.free(a.ticket);
  auto c = arena.allocate(3);
  EXPECT_EQ(a.address, 2u);
  EXPECT_EQ(b.address, 0u);
  EXPECT_EQ(c.address, 2u);
  EXPECT_EQ(arena.lambda(), 4u);
  EXPECT_EQ(arena.reopt_count(), 0u);
}

TEST(ArenaAlloc, BaseAddressIsAdded) {
  ArenaOptions opts;
  opts.base = 0x1000;
  Arena arena(three_block_instance(), worked_plan(), opts);
  EXPECT_EQ(arena.allocate(4).address, 0x1002u);
}

TEST(ArenaAlloc, SmallerRequestDoesNotReoptimize) {
  Arena arena(three_block_instance(), worked_plan());
  EXPECT_EQ(arena.allocate(3).address, 2u);
  EXPECT_EQ(arena.reopt_count(), 0u);
  EXPECT_EQ(arena.observed_size(1), 3u);
}

TEST(ArenaAlloc, LargerRequestReoptimizes) {
  Arena arena(three_block_instance(), worked_plan());
  auto a = arena.allocate(5);
  EXPECT_EQ(arena.reopt_count(), 1u);
  EXPECT_EQ(arena.plan().peak, 7u);
  EXPECT_EQ(arena.expected_size(1), 5u);
  EXPECT_EQ(a.address, arena.plan().offset(1));
  EXPECT_EQ(a.address, 2u);
  EXPECT_EQ(arena.peak_usage(), 7u);
}

TEST(ArenaAlloc, AlignmentAbsorbsSmallGrowth) {
  auto inst = build_instance({{0, 5, 1, 3, ""}}, std::nullopt, 8);
  Arena arena(inst, solve_bestfit(inst));
  auto a = arena.allocate(7);
  EXPECT_EQ(arena.reopt_count(), 0u);
  arena.free(a.ticket);
  arena.reset();
  arena.allocate(9);
  EXPECT_EQ(arena.reopt_count(), 1u);
  EXPECT_EQ(arena.expected_size(1), 16u);
}

TEST(ArenaAlloc, TwoGrowthsInOnePass) {
  Arena arena(three_block_instance(), worked_plan());
  auto a = arena.allocate(6);
  auto b = arena.allocate(3);
  EXPECT_EQ(arena.reopt_count(), 2u);
  EXPECT_EQ(arena.expected_size(1), 6u);
  EXPECT_EQ(arena.expected_size(2), 3u);
  EXPECT_EQ(arena.expected_size(3), 3u);
  EXPECT_TRUE(live_disjoint(arena));
  arena.free(a.ticket);
  arena.allocate(2);  // block 3 expects 3
  arena.free(b.ticket);
  EXPECT_EQ(arena.reopt_count(), 2u);
}

TEST(ArenaAlloc, ReoptimizationRestoresObservedWithinExpected) {
  Arena arena(three_block_instance(), worked_plan());
  arena.allocate(9);
  arena.allocate(1);
  arena.allocate(8);
  for (BlockId id = 1; id <= 3; ++id)
    EXPECT_LE(arena.observed_size(id), arena.expected_size(id));
}

TEST(ArenaAlloc, ExtraRequestPolicies) {
  ArenaOptions strict;
  strict.extra_requests = ExtraRequestPolicy::Error;
  Arena a(three_block_instance(), worked_plan(), strict);
  for (Bytes s : {4, 2, 3}) a.allocate(s);
  EXPECT_EQ(code_of([&] { a.allocate(1); }), ErrorCode::ExtraRequest);

  Arena b(three_block_instance(), worked_plan());
  auto t1 = b.allocate(4);
  auto t2 = b.allocate(2);
  b.free(t1.ticket);
  auto t3 = b.allocate(3);
  auto t4 = b.allocate(7);
  EXPECT_EQ(b.instance().size(), 4u);
  EXPECT_EQ(b.reopt_count(), 1u);
  EXPECT_TRUE(t4.ticket.managed);
  EXPECT_EQ(t4.ticket.id, 4u);
  EXPECT_TRUE(live_disjoint(b));
  auto t5 = b.allocate(2);
  EXPECT_EQ(b.instance().size(), 5u);
  EXPECT_TRUE(live_disjoint(b));
  for (auto t : {t2, t3, t4, t5}) b.free(t.ticket);
  b.reset();
  // The appended blocks are now part of the plan.
  for (Bytes s : {4, 2}) b.allocate(s);
  EXPECT_EQ(b.reopt_count(), 2u);
}

TEST(ArenaFree, Errors) {
  Arena arena(three_block_instance(), worked_plan());
  auto a = arena.allocate(4);
  arena.free(a.ticket);
  EXPECT_EQ(arena.live_count(), 0u);
  EXPECT_EQ(code_of([&] { arena.free(a.ticket); }), ErrorCode::DoubleFree);
  EXPECT_EQ(code_of([&] { arena.free({true, 2}); }), ErrorCode::UnknownId);
  EXPECT_EQ(code_of([&] { arena.free({true, 17}); }), ErrorCode::UnknownId);
}

TEST(ArenaFree, FallbackBlocksReturnToPool) {
  Arena arena(three_block_instance(), worked_plan());
  arena.interrupt();
  auto f = arena.allocate(9);
  arena.free(f.ticket);
  arena.resume();
  EXPECT_EQ(arena.fallback().cached_blocks(), 1u);
  EXPECT_EQ(arena.peak_usage(), 6u + 9u);
}

TEST(ArenaReset, RestartsNumbering) {
  Arena arena(three_block_instance(), worked_plan());
  auto a = arena.allocate(4);
  arena.free(a.ticket);
  arena.reset();
  EXPECT_EQ(arena.lambda(), 1u);
  EXPECT_EQ(arena.allocate(4).address, 2u);
}

TEST(ArenaReset, StrictAndLenient) {
  Arena strict(three_block_instance(), worked_plan());
  strict.allocate(4);
  EXPECT_EQ(code_of([&] { strict.reset(); }), ErrorCode::LiveBlocksAtReset);

  ArenaOptions opts;
  opts.strict_reset = false;
  Arena lenient(three_block_instance(), worked_plan(), opts);
  lenient.allocate(4);
  lenient.allocate(2);
  lenient.reset();
  EXPECT_EQ(lenient.forced_closes(), 2u);
  EXPECT_EQ(lenient.live_count(), 0u);
  EXPECT_EQ(lenient.lambda(), 1u);
}

TEST(ArenaReset, AllocAfterClose) {
  Arena arena(three_block_instance(), worked_plan());
  arena.close();
  EXPECT_EQ(code_of([&] { arena.allocate(1); }), ErrorCode::AllocAfterClose);
}

TEST(ArenaRegions, UnbalancedResume) {
  Arena arena(three_block_instance(), worked_plan());
  EXPECT_EQ(code_of([&] { arena.resume(); }), ErrorCode::UnbalancedResume);
}

// Replays a trace, optionally rescaling request sizes, and checks that live
// planned blocks never share bytes. Returns the served addresses.
std::vector<Bytes> replay(Arena &arena, const std::vector<TraceEvent> &events,
                          const std::vector<double> &scale, bool &disjoint) {
  std::vector<Ticket> tickets;
  std::vector<Bytes> addresses;
  std::size_t k = 0;
  disjoint = true;
  for (const auto &e : events) {
    if (e.kind == TraceEvent::Kind::Alloc) {
      double f = scale.empty() ? 1.0 : scale[k];
      Bytes size = std::max<Bytes>(1, static_cast<Bytes>(e.size * f));
      auto s = arena.allocate(size);
      tickets.push_back(s.ticket);
      addresses.push_back(s.address);
      ++k;
      disjoint = disjoint && live_disjoint(arena);
    } else if (e.kind == TraceEvent::Kind::Free) {
      arena.free(tickets[e.ref - 1]);
    }
  }
  for (auto &t : tickets) {
    try {
      arena.free(t);
    } catch (const Error &) {
    }
  }
  arena.reset();
  return addresses;
}

std::vector<TraceEvent> random_events(std::mt19937_64 &rng) {
  std::vector<TraceEvent> events;
  std::vector<std::size_t> live;
  std::size_t allocs = 0;
  int steps = static_cast<int>(testing::draw(rng, 2, 80));
  for (int s = 0; s < steps; ++s) {
    if (live.empty() || testing::draw(rng, 0, 2) != 0) {
      events.push_back(TraceEvent::alloc(testing::draw(rng, 1, 100)));
      live.push_back(++allocs);
    } else {
      auto k = testing::draw(rng, 0, live.size() - 1);
      events.push_back(TraceEvent::free(live[k]));
      live.erase(live.begin() + static_cast<long>(k));
    }
  }
  return events;
}

TEST(ArenaProperties, ReplayIsDeterministic) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto events = random_events(rng);
    auto inst = profile_to_instance(record(events));
    Arena arena(inst, solve_bestfit(inst));
    bool ok = false;
    auto first = replay(arena, events, {}, ok);
    EXPECT_TRUE(ok);
    for (int epoch = 0; epoch < 3; ++epoch) {
      EXPECT_EQ(replay(arena, events, {}, ok), first);
      EXPECT_TRUE(ok);
    }
    EXPECT_EQ(arena.reopt_count(), 0u);
  }
}

TEST(ArenaProperties, SafeUnderReoptimization) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    auto events = random_events(rng);
    auto inst = profile_to_instance(record(events));
    Arena arena(inst, solve_bestfit(inst));
    for (int epoch = 0; epoch < 4; ++epoch) {
      std::vector<double> scale(inst.size());
      for (auto &f : scale) f = 0.5 + static_cast<double>(rng() % 1000) / 666.0;
      bool ok = false;
      replay(arena, events, scale, ok);
      EXPECT_TRUE(ok);
      EXPECT_TRUE(verify_plan(arena.instance(), arena.plan()).valid);
    }
  }
}

TEST(ArenaProperties, SmallerRequestsKeepAddresses) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    auto events = random_events(rng);
    auto inst = profile_to_instance(record(events));
    Arena arena(inst, solve_bestfit(inst));
    bool ok = false;
    auto base = replay(arena, events, {}, ok);
    std::vector<double> shrink(inst.size());
    for (auto &f : shrink) f = static_cast<double>(1 + rng() % 100) / 100.0;
    EXPECT_EQ(replay(arena, events, shrink, ok), base);
    EXPECT_EQ(arena.reopt_count(), 0u);
  }
}

}  // namespace
}  // namespace dsaplan
