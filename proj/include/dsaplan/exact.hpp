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
/// Exact solver: branch and bound over the relative order (below/above) of
/// blocks with overlapping lifetimes.
///
/// Each search node holds a partial order on colliding pairs. The offsets
/// implied by it are the longest paths in the "is below" graph, which is
/// the componentwise-minimal assignment satisfying every ordered pair.
/// A node whose minimal assignment already separates every colliding pair
/// is a complete solution for its subtree; otherwise we branch on the first
/// still-overlapping pair. Pairs are visited heaviest (w_i + w_j) first.

#include <chrono>
#include <cstdint>
#include <utility>
#include <vector>

#include "dsaplan/bestfit.hpp"
#include "dsaplan/core.hpp"

namespace dsaplan {

struct ExactOptions {
  std::chrono::nanoseconds time_limit = std::chrono::seconds(60);
  /// Seed the incumbent with the best-fit plan.
  bool heuristic_incumbent = true;
};

struct ExactResult {
  Plan plan;
  bool proven_optimal = false;
  std::uint64_t nodes_explored = 0;
  std::chrono::nanoseconds elapsed{0};
};

/// Offsets for a fixed orientation: below[k] lists the blocks that sit
/// above block k. Returns the componentwise-minimal feasible offsets, or
/// nothing when the orientation is cyclic.
inline std::optional<std::vector<Bytes>> longest_path_offsets(
    const DsaInstance &inst, const std::vector<std::pair<BlockId, BlockId>> &below) {
  std::size_t n = inst.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (auto [lo, hi] : below) {
    succ[lo - 1].push_back(hi - 1);
    ++indegree[hi - 1];
  }
  std::vector<Bytes> x(n, 0);
  std::vector<std::size_t> ready;
  for (std::size_t k = 0; k < n; ++k)
    if (indegree[k] == 0) ready.push_back(k);
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto k = ready.back();
    ready.pop_back();
    ++visited;
    for (auto s : succ[k]) {
      x[s] = std::max(x[s], x[k] + inst.blocks()[k].size);
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (visited != n) return std::nullopt;
  return x;
}

namespace detail {

class ExactSearch {
 public:
  ExactSearch(const DsaInstance &inst, const ExactOptions &opts)
      : inst_(inst), opts_(opts), n_(inst.size()), above_(n_), lb_(n_, 0) {
    for (const auto &b : inst.blocks()) size_.push_back(b.size);
    for (auto [i, j] : colliding_pairs(inst).pairs) pairs_.emplace_back(i - 1, j - 1);
    std::stable_sort(pairs_.begin(), pairs_.end(), [&](auto a, auto b) {
      return size_[a.first] + size_[a.second] > size_[b.first] + size_[b.second];
    });
  }

  ExactResult run() {
    start_ = std::chrono::steady_clock::now();
    lower_bound_ = clique_lower_bound(inst_);
    if (lower_bound_ > inst_.capacity())
      throw Error(ErrorCode::Infeasible,
                  "peak live bytes " + std::to_string(lower_bound_) +
                      " exceed capacity " + std::to_string(inst_.capacity()));

    Plan fallback = solve_bestfit(inst_);
    if (opts_.heuristic_incumbent && fallback.peak <= inst_.capacity()) {
      best_ = fallback.offsets;
      best_peak_ = fallback.peak;
      have_best_ = true;
    } else {
      best_peak_ = inst_.capacity() + 1;  // anything <= W improves on this
    }

    if (!(have_best_ && best_peak_ == lower_bound_)) {
      // Mirroring a plan (x -> u - x - w) reverses every order, so the
      // heaviest pair may be fixed one way.
      if (!pairs_.empty()) add_edge(pairs_[0].first, pairs_[0].second);
      search();
    }

    ExactResult result;
    result.nodes_explored = nodes_;
    result.proven_optimal = !timed_out_ && have_best_;
    if (have_best_) {
      result.plan.offsets = best_;
      result.plan.peak = best_peak_;
      result.plan.provenance =
          timed_out_ ? Provenance::ExactTimeout : Provenance::Exact;
    } else if (timed_out_) {
      result.plan = fallback;
      result.plan.provenance = Provenance::ExactTimeout;
    } else {
      throw Error(ErrorCode::Infeasible,
                  "no plan fits within capacity " +
                      std::to_string(inst_.capacity()));
    }
    result.elapsed = std::chrono::steady_clock::now() - start_;
    return result;
  }

 private:
  struct Trail {
    std::size_t node;
    Bytes old_lb;
  };

  Bytes bound() const {
    Bytes u = 0;
    for (std::size_t k = 0; k < n_; ++k) u = std::max(u, lb_[k] + size_[k]);
    return u;
  }

  bool overlaps(std::size_t a, std::size_t b) const {
    return lb_[a] < lb_[b] + size_[b] && lb_[b] < lb_[a] + size_[a];
  }

  bool reaches(std::size_t from, std::size_t to) {
    ++stamp_;
    if (mark_.size() != n_) mark_.assign(n_, 0);
    stack_.clear();
    stack_.push_back(from);
    mark_[from] = stamp_;
    while (!stack_.empty()) {
      auto k = stack_.back();
      stack_.pop_back();
      if (k == to) return true;
      for (auto s : above_[k])
        if (mark_[s] != stamp_) {
          mark_[s] = stamp_;
          stack_.push_back(s);
        }
    }
    return false;
  }

  /// Orders `lo` below `hi` and raises the offset bounds downstream.
  /// Returns the trail mark for undo.
  std::size_t add_edge(std::size_t lo, std::size_t hi) {
    std::size_t mark = trail_.size();
    above_[lo].push_back(hi);
    std::vector<std::size_t> work{lo};
    while (!work.empty()) {
      auto k = work.back();
      work.pop_back();
      for (auto s : above_[k]) {
        if (lb_[s] < lb_[k] + size_[k]) {
          trail_.push_back({s, lb_[s]});
          lb_[s] = lb_[k] + size_[k];
          work.push_back(s);
        }
      }
    }
    return mark;
  }

  void undo(std::size_t lo, std::size_t mark) {
    above_[lo].pop_back();
    while (trail_.size() > mark) {
      lb_[trail_.back().node] = trail_.back().old_lb;
      trail_.pop_back();
    }
  }

  bool out_of_time() {
    if (timed_out_) return true;
    if ((nodes_ & 1023) == 0 &&
        std::chrono::steady_clock::now() - start_ >= opts_.time_limit)
      timed_out_ = true;
    return timed_out_;
  }

  void search() {
    ++nodes_;
    if (out_of_time()) return;
    Bytes u = bound();
    if (u >= best_peak_) return;

    const std::pair<std::size_t, std::size_t> *conflict = nullptr;
    for (const auto &p : pairs_)
      if (overlaps(p.first, p.second)) {
        conflict = &p;
        break;
      }
    if (!conflict) {
      best_ = lb_;
      best_peak_ = u;
      have_best_ = true;
      if (best_peak_ == lower_bound_) done_ = true;
      return;
    }

    auto [a, b] = *conflict;
    if (lb_[b] < lb_[a]) std::swap(a, b);
    for (auto [lo, hi] : {std::pair{a, b}, std::pair{b, a}}) {
      if (done_ || timed_out_) return;
      if (reaches(hi, lo)) continue;
      auto mark = add_edge(lo, hi);
      search();
      undo(lo, mark);
    }
  }

  const DsaInstance &inst_;
  ExactOptions opts_;
  std::size_t n_;
  std::vector<Bytes> size_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::vector<std::size_t>> above_;
  std::vector<Bytes> lb_;
  std::vector<Trail> trail_;

  std::vector<std::uint64_t> mark_;
  std::vector<std::size_t> stack_;
  std::uint64_t stamp_ = 0;

  std::vector<Bytes> best_;
  Bytes best_peak_ = 0;
  bool have_best_ = false;
  Bytes lower_bound_ = 0;
  bool done_ = false;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Minimum-peak plan within the instance capacity. On timeout the best
/// plan found so far is returned with proven_optimal = false.
inline ExactResult solve_exact(const DsaInstance &inst,
                               const ExactOptions &opts = {}) {
  if (opts.time_limit <= std::chrono::nanoseconds::zero())
    throw Error(ErrorCode::TimeLimitZero, "time limit must be positive");
  if (inst.empty()) {
    ExactResult r;
    r.plan.provenance = Provenance::Exact;
    r.proven_optimal = true;
    return r;
  }
  return detail::ExactSearch(inst, opts).run();
}

}  // namespace dsaplan
