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

// Subcommand implementations for the dsaplan tool. Each returns the process
// exit code: 0 ok, 1 invalid result, 2 usage or I/O error.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dsaplan/dsaplan.hpp"

namespace dsaplan::cli {

inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;
inline constexpr int kUsage = 2;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

/// "90", "90s", "250ms", "2m".
inline std::chrono::nanoseconds parse_duration(const std::string &text) {
  std::size_t digits = 0;
  while (digits < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[digits])) ||
          text[digits] == '.'))
    ++digits;
  if (digits == 0) throw IoError("bad duration '" + text + "'");
  double value = std::stod(text.substr(0, digits));
  auto unit = text.substr(digits);
  double scale;
  if (unit.empty() || unit == "s")
    scale = 1e9;
  else if (unit == "ms")
    scale = 1e6;
  else if (unit == "m")
    scale = 60e9;
  else
    throw IoError("bad duration unit '" + unit + "'");
  return std::chrono::nanoseconds(static_cast<std::int64_t>(value * scale));
}

/// First pass of a (possibly multi-pass) trace file.
inline Profile profile_trace_file(const std::string &path) {
  auto segments = split_epochs(read_file(path));
  return record(parse_trace(segments.front()));
}

inline int exit_code_for(const Error &e) {
  switch (e.code()) {
    case ErrorCode::Infeasible:
    case ErrorCode::MissingOffset:
    case ErrorCode::InvalidPlan:
    case ErrorCode::CapacityTooSmall:
    case ErrorCode::ExtraRequest:
    case ErrorCode::LiveBlocksAtReset:
    case ErrorCode::DoubleFree:
    case ErrorCode::UnknownId:
    case ErrorCode::OutOfMemory:
      return kInvalid;
    default:
      return kUsage;
  }
}

/// Runs `body`, mapping failures to exit codes and messages on `err`.
template <typename Body>
int guarded(std::ostream &err, Body &&body) {
  try {
    return body();
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
  std::string trace;
  std::string solver = "bestfit";
  std::optional<Bytes> capacity;
  Bytes align = 1;
  std::string time_limit = "60s";
  std::string out;
};

inline int cmd_plan(const PlanArgs &args, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    if (args.solver != "bestfit" && args.solver != "exact") {
      err << "error: unknown solver '" << args.solver << "'\n";
      return kUsage;
    }
    auto inst = profile_to_instance(profile_trace_file(args.trace),
                                    args.capacity, args.align);
    Plan plan;
    bool proven = false;
    std::size_t nodes = 0;
    if (args.solver == "exact") {
      ExactOptions opts;
      opts.time_limit = parse_duration(args.time_limit);
      auto result = solve_exact(inst, opts);
      plan = result.plan;
      proven = result.proven_optimal;
      nodes = result.nodes_explored;
    } else {
      plan = solve_bestfit(inst);
    }
    auto stats = plan_stats(inst, plan);
    out << "blocks: " << inst.size() << "\n";
    out << "peak: " << plan.peak << "\n";
    out << "lower bound: " << stats.lower_bound << "\n";
    out << "gap: " << std::fixed << std::setprecision(4) << stats.gap_ratio
        << "\n";
    if (args.solver == "exact") {
      out << "nodes: " << nodes << "\n";
      out << (proven ? "proven optimal\n"
                     : "not proven optimal (time limit reached)\n");
    }
    if (plan.peak > inst.capacity())
      out << "warning: peak exceeds capacity " << inst.capacity() << "\n";
    if (!args.out.empty()) write_file(args.out, serialize_plan(inst, plan));
    return kOk;
  });
}

// ---------------------------------------------------------------- verify

namespace detail {

/// The plan's embedded instance, or the instance profiled from `trace`
/// (which must describe the same blocks).
inline DsaInstance instance_for(const PlanFile &file, const std::string &trace,
                                std::ostream &err, bool &mismatch) {
  mismatch = false;
  if (trace.empty()) return file.instance;
  auto profile = profile_trace_file(trace);
  if (profile.managed.size() != file.plan.offsets.size())
    throw Error(ErrorCode::MissingOffset,
                "trace has " + std::to_string(profile.managed.size()) +
                    " blocks, plan has " +
                    std::to_string(file.plan.offsets.size()));
  auto inst = profile_to_instance(profile, file.instance.capacity(),
                                  file.instance.alignment());
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const auto &a = inst.blocks()[k];
    const auto &b = file.instance.blocks()[k];
    if (a.size != b.size || a.alloc_time != b.alloc_time ||
        a.free_time != b.free_time) {
      err << "block " << a.id << " differs between trace and plan\n";
      mismatch = true;
    }
  }
  return inst;
}

}  // namespace detail

struct VerifyArgs {
  std::string trace;
  std::string plan;
  std::string out;
};

inline int cmd_verify(const VerifyArgs &args, std::ostream &out,
                      std::ostream &err) {
  return guarded(err, [&] {
    auto file = parse_plan(read_file(args.plan));
    bool mismatch = false;
    auto inst = detail::instance_for(file, args.trace, err, mismatch);
    auto report = verify_plan(inst, file.plan);
    out << (report.valid ? "valid" : "INVALID") << "\n";
    out << "peak: " << report.peak_recomputed
        << (report.peak_matches ? "" : " (plan claims " +
                                           std::to_string(file.plan.peak) + ")")
        << "\n";
    out << "capacity: " << inst.capacity()
        << (report.capacity_ok ? " ok" : " EXCEEDED") << "\n";
    for (const auto &v : report.violations)
      out << "violation: pair (" << v.first << "," << v.second << ") "
          << v.overlap_bytes << " bytes x " << v.overlap_ticks << " ticks\n";
    if (!args.out.empty())
      write_file(args.out, report_to_json(report).dump(2) + "\n");
    return report.valid && !mismatch ? kOk : kInvalid;
  });
}

// ---------------------------------------------------------------- replay

struct ReplayArgs {
  std::string trace;
  std::string plan;
  int epochs = 1;
  std::string mode = "lenient";
  std::string out;
  bool addresses = false;
};

struct EpochReport {
  int epoch = 0;
  Bytes peak = 0;
  std::size_t reopt_count = 0;
  Bytes fallback_bytes = 0;
  Bytes pool_peak = 0;
  std::vector<Bytes> addresses;
};

/// Replays one pass through both the arena and the pool baseline.
inline void replay_pass(const std::vector<TraceEvent> &events, Arena &arena,
                        PoolAllocator &pool, std::vector<Bytes> &addresses) {
  std::vector<std::optional<Ticket>> tickets;
  std::vector<std::optional<PoolAllocator::Handle>> pooled;
  for (const auto &e : events) {
    switch (e.kind) {
      case TraceEvent::Kind::Alloc:
        if (e.size == 0) {
          tickets.emplace_back();
          pooled.emplace_back();
          break;
        }
        {
          auto served = arena.allocate(e.size);
          tickets.push_back(served.ticket);
          addresses.push_back(served.address);
          pooled.push_back(pool.allocate(e.size).handle);
        }
        break;
      case TraceEvent::Kind::Free:
        if (e.ref == 0 || e.ref > tickets.size())
          throw Error(ErrorCode::UnknownBlockRef,
                      "free of allocation " + std::to_string(e.ref));
        if (!tickets[e.ref - 1]) break;  // zero-size request
        arena.free(*tickets[e.ref - 1]);
        pool.release(*pooled[e.ref - 1]);
        pooled[e.ref - 1].reset();
        break;
      case TraceEvent::Kind::Interrupt: arena.interrupt(); break;
      case TraceEvent::Kind::Resume: arena.resume(); break;
    }
  }
  for (auto &h : pooled)
    if (h) pool.release(*h);
}

inline int cmd_replay(const ReplayArgs &args, std::ostream &out,
                      std::ostream &err) {
  return guarded(err, [&] {
    if (args.mode != "strict" && args.mode != "lenient") {
      err << "error: unknown mode '" << args.mode << "'\n";
      return kUsage;
    }
    if (args.epochs < 1) {
      err << "error: --epochs must be >= 1\n";
      return kUsage;
    }
    auto file = parse_plan(read_file(args.plan));
    bool strict = args.mode == "strict";
    ArenaOptions opts;
    opts.extra_requests =
        strict ? ExtraRequestPolicy::Error : ExtraRequestPolicy::Append;
    opts.strict_reset = strict;
    Arena arena(file.instance, file.plan, opts);
    PoolAllocator pool;

    std::vector<std::vector<TraceEvent>> passes;
    for (const auto &segment : split_epochs(read_file(args.trace)))
      passes.push_back(parse_trace(segment));

    std::vector<EpochReport> epochs;
    out << "epoch  arena_peak  reopts  fallback  pool_peak\n";
    for (int e = 0; e < args.epochs; ++e) {
      EpochReport r;
      r.epoch = e + 1;
      replay_pass(passes[static_cast<std::size_t>(e) % passes.size()], arena,
                  pool, r.addresses);
      arena.reset();
      r.peak = arena.peak_usage();
      r.reopt_count = arena.reopt_count();
      r.fallback_bytes = arena.fallback().peak();
      r.pool_peak = pool.peak();
      out << std::setw(5) << r.epoch << std::setw(12) << r.peak << std::setw(8)
          << r.reopt_count << std::setw(10) << r.fallback_bytes
          << std::setw(11) << r.pool_peak << "\n";
      epochs.push_back(std::move(r));
    }
    const auto &last = epochs.back();
    out << "reopt_count: " << last.reopt_count << "\n";
    out << "final peak: " << last.peak << "\n";
    out << "pool baseline peak: " << last.pool_peak << "\n";
    if (last.pool_peak > 0)
      out << "reduction vs pool: " << std::fixed << std::setprecision(1)
          << 100.0 * reduction_vs(last.peak, last.pool_peak) << "%\n";
    if (arena.forced_closes() > 0)
      out << "forced closes: " << arena.forced_closes() << "\n";

    if (!args.out.empty()) {
      ojson doc;
      ojson list = ojson::array();
      for (const auto &r : epochs) {
        ojson je;
        je["epoch"] = r.epoch;
        je["peak"] = r.peak;
        je["reopt_count"] = r.reopt_count;
        je["fallback_bytes"] = r.fallback_bytes;
        je["pool_peak"] = r.pool_peak;
        if (args.addresses) je["addresses"] = r.addresses;
        list.push_back(std::move(je));
      }
      doc["epochs"] = std::move(list);
      doc["reopt_count"] = last.reopt_count;
      doc["final_peak"] = last.peak;
      doc["forced_closes"] = arena.forced_closes();
      write_file(args.out, doc.dump(2) + "\n");
    }
    return kOk;
  });
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::string plan;
  std::string trace;
  std::string out;
};

inline int cmd_render(const RenderArgs &args, std::ostream &out,
                      std::ostream &err) {
  return guarded(err, [&] {
    auto file = parse_plan(read_file(args.plan));
    bool mismatch = false;
    auto inst = detail::instance_for(file, args.trace, err, mismatch);
    auto report = verify_plan(inst, file.plan);
    write_file(args.out, render_svg(inst, file.plan, &report));
    out << "wrote " << args.out << " (" << inst.size() << " blocks"
        << (report.valid ? "" : ", violations highlighted") << ")\n";
    return kOk;
  });
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string model = "cnn";
  GenSpec spec;
  std::optional<int> min_len;
  std::optional<int> max_len;
  std::string out;
};

inline int cmd_gen(GenArgs args, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    if (args.model == "cnn") {
      args.spec.model = ModelKind::CnnLike;
    } else if (args.model == "rnn") {
      args.spec.model = ModelKind::RnnLike;
    } else {
      err << "error: unknown model '" << args.model << "'\n";
      return kUsage;
    }
    if (args.min_len || args.max_len) {
      int lo = args.min_len.value_or(args.max_len.value_or(32));
      int hi = args.max_len.value_or(lo);
      args.spec.variable_length = std::pair{lo, hi};
    }
    auto text = generate_trace(args.spec);
    if (args.out.empty() || args.out == "-")
      out << text;
    else
      write_file(args.out, text);
    return kOk;
  });
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::size_t> sizes{1000, 2000, 4000};
  std::uint64_t seed = 0;
  int repeats = 3;
};

/// CnnLike instance with about n blocks (activation + workspace per layer).
inline DsaInstance bench_instance(std::size_t n, std::uint64_t seed) {
  GenSpec spec;
  spec.seed = seed;
  spec.batch = 1;
  spec.layers = static_cast<int>(std::max<std::size_t>(1, n / 2));
  spec.workspace = n >= 2;
  return profile_to_instance(record(generate_cnn_events(spec)));
}

inline double time_bestfit_ms(const DsaInstance &inst, int repeats,
                              Plan *plan_out = nullptr) {
  std::vector<double> times;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    auto t0 = std::chrono::steady_clock::now();
    auto plan = solve_bestfit(inst);
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (plan_out) *plan_out = std::move(plan);
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

inline int cmd_bench(const BenchArgs &args, std::ostream &out,
                     std::ostream &err) {
  return guarded(err, [&] {
    out << "       n   blocks     time_ms  peak/lb  time_ratio\n";
    double previous = 0;
    for (auto n : args.sizes) {
      auto inst = bench_instance(n, args.seed);
      Plan plan;
      double ms = time_bestfit_ms(inst, args.repeats, &plan);
      auto lb = clique_lower_bound(inst);
      double ratio = lb ? static_cast<double>(plan.peak) / lb : 1.0;
      out << std::setw(8) << n << std::setw(9) << inst.size() << std::setw(12)
          << std::fixed << std::setprecision(3) << ms << std::setw(9)
          << std::setprecision(4) << ratio;
      if (previous > 0)
        out << std::setw(12) << std::setprecision(2) << ms / previous;
      out << "\n";
      previous = ms;
    }
    return kOk;
  });
}

}  // namespace dsaplan::cli
