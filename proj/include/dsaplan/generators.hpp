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
/// Synthetic training-step traces.
///
/// CnnLike: layer i allocates its activation on the way forward and frees
/// it on the way back, so activation lifetimes nest; each layer also takes
/// a short-lived workspace.
///
/// RnnLike: one trace per pass. The padded sequence buffer scales with the
/// pass's sequence length; recurrent state and workspaces do not.
///
/// Output depends only on the GenSpec: sampling uses mt19937_64, whose output
/// sequence is fixed by the standard.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dsaplan/profiler.hpp"

namespace dsaplan {

enum class ModelKind { CnnLike, RnnLike };

struct GenSpec {
  ModelKind model = ModelKind::CnnLike;
  int layers = 8;
  int batch = 32;
  std::uint64_t seed = 0;
  /// RnnLike sequence length range, inclusive. Defaults to (32, 32).
  std::optional<std::pair<int, int>> variable_length;
  int epochs = 1;          // RnnLike passes
  bool workspace = true;   // CnnLike per-layer workspace blocks
  bool untimed = false;    // RnnLike interrupted decode region
};

namespace detail {

inline std::uint64_t uniform(std::mt19937_64 &rng, std::uint64_t lo,
                             std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

inline void check_spec(const GenSpec &spec) {
  if (spec.layers < 1 || spec.batch < 1)
    throw Error(ErrorCode::InvalidInstance, "layers and batch must be >= 1");
  if (spec.epochs < 1)
    throw Error(ErrorCode::InvalidInstance, "epochs must be >= 1");
  if (spec.variable_length &&
      (spec.variable_length->first < 1 ||
       spec.variable_length->first > spec.variable_length->second))
    throw Error(ErrorCode::InvalidInstance, "bad sequence length range");
}

}  // namespace detail

inline std::vector<TraceEvent> generate_cnn_events(const GenSpec &spec) {
  detail::check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const Bytes batch = static_cast<Bytes>(spec.batch);
  const int layers = spec.layers;

  std::vector<TraceEvent> events;
  std::vector<std::size_t> activation_ref(layers);
  std::size_t allocs = 0;
  for (int i = 0; i < layers; ++i) {
    // Spatial extent halves over five stages while channels widen.
    Bytes stage = static_cast<Bytes>(5 * i / layers);
    Bytes side = 112 >> stage;
    Bytes channels = 16 * detail::uniform(rng, 2, 8) << stage;
    Bytes activation = batch * channels * side * side * 4;
    std::string name = "L" + std::to_string(i + 1);
    events.push_back(TraceEvent::alloc(activation, name + ".act"));
    activation_ref[i] = ++allocs;
    if (spec.workspace) {
      Bytes workspace = activation * detail::uniform(rng, 1, 16) / 8;
      events.push_back(TraceEvent::alloc(workspace, name + ".ws"));
      events.push_back(TraceEvent::free(++allocs));
    }
  }
  for (int i = layers - 1; i >= 0; --i)
    events.push_back(TraceEvent::free(activation_ref[i]));
  return events;
}

/// Sequence length of every pass, in order.
inline std::vector<int> rnn_lengths(const GenSpec &spec) {
  detail::check_spec(spec);
  auto [lo, hi] = spec.variable_length.value_or(std::pair{32, 32});
  std::mt19937_64 rng(spec.seed);
  std::vector<int> lengths;
  for (int e = 0; e < spec.epochs; ++e)
    lengths.push_back(static_cast<int>(detail::uniform(
        rng, static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi))));
  return lengths;
}

inline std::vector<TraceEvent> generate_rnn_pass(const GenSpec &spec,
                                                 int length) {
  const Bytes batch = static_cast<Bytes>(spec.batch);
  const Bytes hidden = 256;
  const Bytes token_bytes = batch * hidden * 4;

  std::vector<TraceEvent> events;
  std::size_t allocs = 0;
  events.push_back(
      TraceEvent::alloc(token_bytes * static_cast<Bytes>(length), "seq"));
  std::size_t sequence = ++allocs;
  std::vector<std::size_t> state(spec.layers);
  for (int l = 0; l < spec.layers; ++l) {
    std::string name = "L" + std::to_string(l + 1);
    // hidden and cell state with their gate activations
    events.push_back(TraceEvent::alloc(token_bytes * 4, name + ".state"));
    state[l] = ++allocs;
    events.push_back(TraceEvent::alloc(token_bytes * 2, name + ".ws"));
    events.push_back(TraceEvent::free(++allocs));
  }
  if (spec.untimed) {
    events.push_back(TraceEvent::interrupt());
    events.push_back(TraceEvent::alloc(
        batch * static_cast<Bytes>(length) * 1024, "decode"));
    events.push_back(TraceEvent::free(++allocs));
    events.push_back(TraceEvent::resume());
  }
  for (int l = spec.layers - 1; l >= 0; --l)
    events.push_back(TraceEvent::free(state[l]));
  events.push_back(TraceEvent::free(sequence));
  return events;
}

/// Trace file text. RnnLike passes are separated by "# epoch" lines.
inline std::string generate_trace(const GenSpec &spec) {
  detail::check_spec(spec);
  if (spec.model == ModelKind::CnnLike) {
    return "# cnn layers=" + std::to_string(spec.layers) +
           " batch=" + std::to_string(spec.batch) +
           " seed=" + std::to_string(spec.seed) + "\n" +
           format_trace(generate_cnn_events(spec));
  }
  std::string out = "# rnn layers=" + std::to_string(spec.layers) +
                    " batch=" + std::to_string(spec.batch) +
                    " seed=" + std::to_string(spec.seed) + "\n";
  auto lengths = rnn_lengths(spec);
  for (std::size_t e = 0; e < lengths.size(); ++e) {
    out += "# epoch " + std::to_string(e + 1) + " length " +
           std::to_string(lengths[e]) + "\n";
    out += format_trace(generate_rnn_pass(spec, lengths[e]));
  }
  return out;
}

}  // namespace dsaplan
