// Copyright 2026 The sitopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sitopt/errors.hpp"

namespace sitopt {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "InvalidParameter";
    case ErrorCode::kHypothesisViolation: return "HypothesisViolation";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kStepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::kInvariantBreach: return "InvariantBreach";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNoMinimum: return "NoMinimum";
    case ErrorCode::kInfeasibleHorizon: return "InfeasibleHorizon";
    case ErrorCode::kStructureViolation: return "StructureViolation";
    case ErrorCode::kShiftOverflow: return "ShiftOverflow";
    case ErrorCode::kNotReached: return "NotReached";
    case ErrorCode::kMaxIterations: return "MaxIterations";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kStructureMismatch: return "StructureMismatch";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace sitopt
