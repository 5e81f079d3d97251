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

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsaplan {

enum class ErrorCode {
  // instance construction
  EmptyLifetime,
  ZeroSize,
  NegativeTime,
  CapacityTooSmall,
  InvalidInstance,
  // trace parsing and profiling
  SyntaxError,
  NegativeSize,
  UnknownBlockRef,
  DoubleFree,
  UnbalancedResume,
  // solvers
  IllegalLift,
  ContainmentViolation,
  Infeasible,
  TimeLimitZero,
  TooLarge,
  // verification
  MissingOffset,
  ZeroBaseline,
  // replay
  InvalidPlan,
  ExtraRequest,
  AllocAfterClose,
  UnknownId,
  LiveBlocksAtReset,
  OutOfMemory,
  // serialization
  FormatError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyLifetime: return "EmptyLifetime";
    case ErrorCode::ZeroSize: return "ZeroSize";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::CapacityTooSmall: return "CapacityTooSmall";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::NegativeSize: return "NegativeSize";
    case ErrorCode::UnknownBlockRef: return "UnknownBlockRef";
    case ErrorCode::DoubleFree: return "DoubleFree";
    case ErrorCode::UnbalancedResume: return "UnbalancedResume";
    case ErrorCode::IllegalLift: return "IllegalLift";
    case ErrorCode::ContainmentViolation: return "ContainmentViolation";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::TimeLimitZero: return "TimeLimitZero";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::MissingOffset: return "MissingOffset";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::ExtraRequest: return "ExtraRequest";
    case ErrorCode::AllocAfterClose: return "AllocAfterClose";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::LiveBlocksAtReset: return "LiveBlocksAtReset";
    case ErrorCode::OutOfMemory: return "OutOfMemory";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

/// All library failures are reported as this exception; code() identifies
/// the failure class, what() carries "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dsaplan
