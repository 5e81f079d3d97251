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
/// Allocation traces and the profiling clock.
///
/// Trace files hold one event per line:
///
///     A <size> [label]   allocate <size> bytes
///     F <k>              free the k-th allocation (1-based, all allocations)
///     I                  interrupt monitoring
///     R                  resume monitoring
///     # ...              comment
///
/// A line of the form "# epoch ..." separates passes of a multi-pass trace.

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dsaplan/core.hpp"

namespace dsaplan {

struct TraceEvent {
  enum class Kind { Alloc, Free, Interrupt, Resume };

  Kind kind = Kind::Alloc;
  Bytes size = 0;         // Alloc
  std::string label;      // Alloc, optional
  std::size_t ref = 0;    // Free: 1-based allocation ordinal

  static TraceEvent alloc(Bytes size, std::string label = {}) {
    return {Kind::Alloc, size, std::move(label), 0};
  }
  static TraceEvent free(std::size_t ref) { return {Kind::Free, 0, {}, ref}; }
  static TraceEvent interrupt() { return {Kind::Interrupt, 0, {}, 0}; }
  static TraceEvent resume() { return {Kind::Resume, 0, {}, 0}; }

  bool operator==(const TraceEvent &) const = default;
};

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' ||
                               line[k] == '\r'))
      ++k;
    std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' &&
           line[k] != '\r')
      ++k;
    if (k > start) words.push_back(line.substr(start, k - start));
  }
  return words;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view word) {
  Int value{};
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) return std::nullopt;
  return value;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

inline bool is_epoch_marker(std::string_view line) {
  auto words = split_words(line);
  return words.size() >= 2 && words[0] == "#" && words[1] == "epoch";
}

}  // namespace detail

/// Syntactic parse only; reference validity is checked by record().
inline std::vector<TraceEvent> parse_trace(std::string_view text) {
  std::vector<TraceEvent> events;
  auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    auto words = detail::split_words(lines[n]);
    if (words.empty() || words[0].front() == '#') continue;
    auto fail = [&](const std::string &what) {
      return Error(ErrorCode::SyntaxError,
                   "line " + std::to_string(n + 1) + ": " + what);
    };
    auto op = words[0];
    if (op == "A") {
      if (words.size() < 2 || words.size() > 3)
        throw fail("expected 'A <size> [label]'");
      if (words[1].front() == '-' && detail::parse_int<std::int64_t>(words[1]))
        throw Error(ErrorCode::NegativeSize,
                    "line " + std::to_string(n + 1) + ": size " +
                        std::string(words[1]));
      auto size = detail::parse_int<Bytes>(words[1]);
      if (!size) throw fail("bad size '" + std::string(words[1]) + "'");
      events.push_back(TraceEvent::alloc(
          *size, words.size() == 3 ? std::string(words[2]) : std::string()));
    } else if (op == "F") {
      if (words.size() != 2) throw fail("expected 'F <k>'");
      auto ref = detail::parse_int<std::size_t>(words[1]);
      if (!ref || *ref == 0)
        throw fail("bad block reference '" + std::string(words[1]) + "'");
      events.push_back(TraceEvent::free(*ref));
    } else if (op == "I" && words.size() == 1) {
      events.push_back(TraceEvent::interrupt());
    } else if (op == "R" && words.size() == 1) {
      events.push_back(TraceEvent::resume());
    } else {
      throw fail("unknown event '" + std::string(lines[n]) + "'");
    }
  }
  return events;
}

inline std::string format_trace(const std::vector<TraceEvent> &events) {
  std::string out;
  for (const auto &e : events) {
    switch (e.kind) {
      case TraceEvent::Kind::Alloc:
        out += "A " + std::to_string(e.size);
        if (!e.label.empty()) out += " " + e.label;
        break;
      case TraceEvent::Kind::Free: out += "F " + std::to_string(e.ref); break;
      case TraceEvent::Kind::Interrupt: out += "I"; break;
      case TraceEvent::Kind::Resume: out += "R"; break;
    }
    out += '\n';
  }
  return out;
}

/// Splits a multi-pass trace at "# epoch" lines. Text before the first
/// marker is kept only if it contains events.
inline std::vector<std::string> split_epochs(std::string_view text) {
  std::vector<std::string> segments(1);
  bool marked = false;
  bool leading_events = false;
  for (auto line : detail::split_lines(text)) {
    if (detail::is_epoch_marker(line)) {
      if (!marked && !leading_events)
        segments.back().clear();
      else
        segments.emplace_back();
      marked = true;
      continue;
    }
    auto words = detail::split_words(line);
    if (!marked && !words.empty() && words[0].front() != '#')
      leading_events = true;
    segments.back().append(line).push_back('\n');
  }
  return segments;
}

struct Profile {
  std::vector<BlockRequest> managed;
  std::size_t unmanaged_count = 0;
  Tick horizon = 1;
};

/// Runs the profiling clock over a trace. The clock starts at 1 and
/// advances after every non-empty allocation and free, monitored or not.
/// Monitored allocations take consecutive ids from 1; blocks still alive at
/// the end are closed at the final clock value.
inline Profile record(const std::vector<TraceEvent> &events) {
  enum class State { Live, Freed };
  struct Allocation {
    std::optional<std::size_t> managed;  // index into Profile::managed
    bool empty = false;
    State state = State::Live;
  };

  Profile profile;
  std::vector<Allocation> allocations;
  Tick y = 1;
  int depth = 0;
  for (const auto &e : events) {
    switch (e.kind) {
      case TraceEvent::Kind::Alloc: {
        Allocation a;
        if (e.size == 0) {
          a.empty = true;
        } else if (depth > 0) {
          ++profile.unmanaged_count;
          ++y;
        } else {
          a.managed = profile.managed.size();
          BlockRequest b;
          b.id = static_cast<BlockId>(profile.managed.size() + 1);
          b.size = e.size;
          b.alloc_time = y;
          b.label = e.label;
          profile.managed.push_back(std::move(b));
          ++y;
        }
        allocations.push_back(a);
        break;
      }
      case TraceEvent::Kind::Free: {
        if (e.ref == 0 || e.ref > allocations.size())
          throw Error(ErrorCode::UnknownBlockRef,
                      "free of allocation " + std::to_string(e.ref) +
                          " before it was made");
        auto &a = allocations[e.ref - 1];
        if (a.state == State::Freed)
          throw Error(ErrorCode::DoubleFree,
                      "allocation " + std::to_string(e.ref) + " freed twice");
        a.state = State::Freed;
        if (a.empty) break;
        if (a.managed) profile.managed[*a.managed].free_time = y;
        ++y;
        break;
      }
      case TraceEvent::Kind::Interrupt: ++depth; break;
      case TraceEvent::Kind::Resume:
        if (depth == 0)
          throw Error(ErrorCode::UnbalancedResume, "resume without interrupt");
        --depth;
        break;
    }
  }
  profile.horizon = y;
  for (std::size_t k = 0; k < allocations.size(); ++k)
    if (allocations[k].managed && allocations[k].state == State::Live)
      profile.managed[*allocations[k].managed].free_time = y;
  return profile;
}

inline DsaInstance profile_to_instance(const Profile &profile,
                                       std::optional<Bytes> capacity = std::nullopt,
                                       Bytes alignment = 1) {
  return build_instance(profile.managed, capacity, alignment);
}

}  // namespace dsaplan
