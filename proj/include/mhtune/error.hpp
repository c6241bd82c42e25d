/*
 * Copyright 2026 The mhtune Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
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

namespace mhtune {

enum class ErrorCode {
  InvalidParameter,
  NotAbsolutelyContinuous,
  NonFiniteIntegrand,
  TargetZeroAtCurrentState,
  TargetZeroAtStart,
  DerivativeUnbounded,
  UnreachableSupport,
  AllDiverged,
  NotALowerBound,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NotAbsolutelyContinuous: return "NotAbsolutelyContinuous";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::TargetZeroAtCurrentState: return "TargetZeroAtCurrentState";
    case ErrorCode::TargetZeroAtStart: return "TargetZeroAtStart";
    case ErrorCode::DerivativeUnbounded: return "DerivativeUnbounded";
    case ErrorCode::UnreachableSupport: return "UnreachableSupport";
    case ErrorCode::AllDiverged: return "AllDiverged";
    case ErrorCode::NotALowerBound: return "NotALowerBound";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mhtune
