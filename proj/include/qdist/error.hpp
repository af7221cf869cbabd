// Copyright 2026 The qdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdist {

enum class ErrorCode {
  kNotHermitian,
  kNoConvergence,
  kDimensionMismatch,
  kRankOutOfRange,
  kInvalidState,
  kAlphaOutOfRange,
  kDomainError,
  kEpsOutOfRange,
  kXOutOfRange,
  kSeriesUnbounded,
  kScaleNotOne,
  kMOutOfRange,
  kPrecondition,
  kDimensionCapExceeded,
  kGapViolation,
  kUnknownSide,
  kTypeClassOverflow,
  kNotUnitary,
  kParamOutOfRange,
  kParse,
  kIo,
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRankOutOfRange: return "RankOutOfRange";
    case ErrorCode::kInvalidState: return "InvalidState";
    case ErrorCode::kAlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kEpsOutOfRange: return "EpsOutOfRange";
    case ErrorCode::kXOutOfRange: return "XOutOfRange";
    case ErrorCode::kSeriesUnbounded: return "SeriesUnbounded";
    case ErrorCode::kScaleNotOne: return "ScaleNotOne";
    case ErrorCode::kMOutOfRange: return "MOutOfRange";
    case ErrorCode::kPrecondition: return "Precondition";
    case ErrorCode::kDimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::kGapViolation: return "GapViolation";
    case ErrorCode::kUnknownSide: return "UnknownSide";
    case ErrorCode::kTypeClassOverflow: return "TypeClassOverflow";
    case ErrorCode::kNotUnitary: return "NotUnitary";
    case ErrorCode::kParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code that
/// callers (and tests) can match on without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qdist
