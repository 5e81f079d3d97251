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
/// Replay arena serving addresses from a precomputed plan.
///
/// Requests are matched to planned blocks purely by order: the k-th
/// monitored request of a pass is block k and receives base + offset(k).
/// A request larger than its planned size triggers a re-solve with the
/// largest sizes observed so far; live blocks are remapped to the new plan.
/// Requests made while monitoring is interrupted go to a fallback pool.

#include <algorithm>
#include <optional>
#include <vector>

#include "dsaplan/bestfit.hpp"
#include "dsaplan/core.hpp"
#include "dsaplan/pool.hpp"
#include "dsaplan/verifier.hpp"

namespace dsaplan {

/// What to do with more monitored requests than the plan has blocks.
enum class ExtraRequestPolicy {
  Error,
  /// Append a block alive until the end of the pass and re-solve.
  Append,
};

struct ArenaOptions {
  Bytes base = 0;
  ExtraRequestPolicy extra_requests = ExtraRequestPolicy::Append;
  /// reset() with managed blocks still live is an error; otherwise they
  /// are closed and counted in forced_closes().
  bool strict_reset = true;
  std::optional<Bytes> fallback_capacity;
};

struct Ticket {
  bool managed = true;
  std::uint64_t id = 0;  // block id when managed, pool handle otherwise

  bool operator==(const Ticket &) const = default;
};

struct Served {
  Ticket ticket;
  Bytes address = 0;
};

struct LiveBlock {
  BlockId id = 0;
  Bytes address = 0;
  Bytes size = 0;
};

class Arena {
 public:
  Arena(DsaInstance instance, Plan plan, ArenaOptions options = {})
      : instance_(std::move(instance)),
        plan_(std::move(plan)),
        options_(options),
        fallback_(options.fallback_capacity) {
    try {
      if (!verify_plan(instance_, plan_).valid)
        throw Error(ErrorCode::InvalidPlan, "plan fails verification");
    } catch (const Error &e) {
      if (e.code() == ErrorCode::InvalidPlan) throw;
      throw Error(ErrorCode::InvalidPlan, e.what());
    }
    observed_.assign(instance_.size(), 0);
    state_.assign(instance_.size(), State::Pending);
    address_.assign(instance_.size(), 0);
    requested_.assign(instance_.size(), 0);
  }

  Served allocate(Bytes size) {
    if (closed_) throw Error(ErrorCode::AllocAfterClose, "arena is closed");
    if (interrupted_ > 0) {
      auto a = fallback_.allocate(size);
      ++clock_;
      return {{false, a.handle}, options_.base + a.address};
    }
    if (size == 0) throw Error(ErrorCode::ZeroSize, "request of 0 bytes");
    Tick now = clock_++;
    BlockId id = lambda_;
    if (id > instance_.size()) {
      if (options_.extra_requests == ExtraRequestPolicy::Error)
        throw Error(ErrorCode::ExtraRequest,
                    "request " + std::to_string(id) + " exceeds the " +
                        std::to_string(instance_.size()) + " planned blocks");
      append_block(size, now);
      observed_[id - 1] = size;
      resolve(now, id);
    } else {
      observed_[id - 1] = std::max(observed_[id - 1], size);
      if (size > instance_.block(id).size) resolve(now, id);
    }
    address_[id - 1] = options_.base + plan_.offset(id);
    requested_[id - 1] = size;
    state_[id - 1] = State::Live;
    ++live_count_;
    ++lambda_;
    return {{true, id}, address_[id - 1]};
  }

  void free(const Ticket &ticket) {
    if (!ticket.managed) {
      fallback_.release(ticket.id);
      ++clock_;
      return;
    }
    if (ticket.id == 0 || ticket.id > instance_.size() ||
        state_[ticket.id - 1] == State::Pending)
      throw Error(ErrorCode::UnknownId,
                  "block " + std::to_string(ticket.id) + " is not allocated");
    auto &s = state_[ticket.id - 1];
    if (s == State::Freed)
      throw Error(ErrorCode::DoubleFree,
                  "block " + std::to_string(ticket.id) + " freed twice");
    s = State::Freed;
    --live_count_;
    ++clock_;
  }

  void interrupt() { ++interrupted_; }

  void resume() {
    if (interrupted_ == 0)
      throw Error(ErrorCode::UnbalancedResume, "resume without interrupt");
    --interrupted_;
  }

  /// Starts the next pass: request numbering restarts at block 1.
  void reset() {
    if (live_count_ > 0) {
      if (options_.strict_reset)
        throw Error(ErrorCode::LiveBlocksAtReset,
                    std::to_string(live_count_) + " planned blocks still live");
      forced_closes_ += live_count_;
    }
    std::fill(state_.begin(), state_.end(), State::Pending);
    live_count_ = 0;
    lambda_ = 1;
    clock_ = 1;
  }

  void close() { closed_ = true; }

  /// Re-solves with every block at least as large as its largest observed
  /// request, then moves live blocks to their new offsets.
  const Plan &reoptimize() { return resolve(clock_, 0); }

  const DsaInstance &instance() const { return instance_; }
  const Plan &plan() const { return plan_; }
  const PoolAllocator &fallback() const { return fallback_; }
  BlockId lambda() const { return lambda_; }
  std::size_t reopt_count() const { return reopt_count_; }
  std::size_t forced_closes() const { return forced_closes_; }
  std::size_t live_count() const { return live_count_; }
  int interrupted_depth() const { return interrupted_; }

  Bytes expected_size(BlockId id) const { return instance_.block(id).size; }
  Bytes observed_size(BlockId id) const { return observed_.at(id - 1); }

  /// Planned peak plus the fallback pool's high-water mark.
  Bytes peak_usage() const { return plan_.peak + fallback_.peak(); }

  std::vector<LiveBlock> live_blocks() const {
    std::vector<LiveBlock> out;
    for (std::size_t k = 0; k < state_.size(); ++k)
      if (state_[k] == State::Live)
        out.push_back({static_cast<BlockId>(k + 1), address_[k], requested_[k]});
    return out;
  }

 private:
  enum class State { Pending, Live, Freed };

  // Live blocks (and the one being served) must collide in the new instance
  // even when the pass has drifted from the recorded order, so their
  // lifetimes are stretched to cover `now`.
  const Plan &resolve(Tick now, BlockId incoming) {
    std::vector<BlockRequest> blocks(instance_.blocks().begin(),
                                     instance_.blocks().end());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      blocks[k].size = std::max(blocks[k].size, observed_[k]);
      if (state_[k] == State::Live || k + 1 == incoming) {
        blocks[k].alloc_time = std::min(blocks[k].alloc_time, now);
        blocks[k].free_time = std::max(blocks[k].free_time, now + 1);
      }
    }
    instance_ = build_instance(std::move(blocks), std::nullopt,
                               instance_.alignment());
    plan_ = solve_bestfit(instance_);
    for (std::size_t k = 0; k < state_.size(); ++k)
      if (state_[k] == State::Live) address_[k] = options_.base + plan_.offsets[k];
    ++reopt_count_;
    return plan_;
  }

  void append_block(Bytes size, Tick now) {
    std::vector<BlockRequest> blocks(instance_.blocks().begin(),
                                     instance_.blocks().end());
    Tick horizon = std::max(instance_.max_time(), now + 1);
    // Earlier appended blocks stay alive until the new horizon too.
    for (auto id : appended_) blocks[id - 1].free_time = horizon;
    BlockRequest b;
    b.size = size;
    b.alloc_time = now;
    b.free_time = horizon;
    b.label = "appended";
    blocks.push_back(std::move(b));
    instance_ = build_instance(std::move(blocks), std::nullopt,
                               instance_.alignment());
    appended_.push_back(static_cast<BlockId>(instance_.size()));
    plan_.offsets.push_back(0);  // replaced by the re-solve that follows
    observed_.push_back(0);
    state_.push_back(State::Pending);
    address_.push_back(0);
    requested_.push_back(0);
  }

  DsaInstance instance_;
  Plan plan_;
  ArenaOptions options_;
  PoolAllocator fallback_;

  std::vector<Bytes> observed_;
  std::vector<State> state_;
  std::vector<Bytes> address_;
  std::vector<Bytes> requested_;
  std::vector<BlockId> appended_;

  BlockId lambda_ = 1;
  Tick clock_ = 1;
  int interrupted_ = 0;
  std::size_t live_count_ = 0;
  std::size_t reopt_count_ = 0;
  std::size_t forced_closes_ = 0;
  bool closed_ = false;
};

}  // namespace dsaplan
