// Copyright 2026 The vqsyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vqsyn/error.hpp"

namespace vqsyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MismatchedLengths: return "MismatchedLengths";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::ChainTooShort: return "ChainTooShort";
    case ErrorCode::EvenWindow: return "EvenWindow";
    case ErrorCode::InvalidInternalCoordinate: return "InvalidInternalCoordinate";
    case ErrorCode::NegativeTau: return "NegativeTau";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewCodes: return "TooFewCodes";
    case ErrorCode::TokenOutOfRange: return "TokenOutOfRange";
    case ErrorCode::MismatchedCodebook: return "MismatchedCodebook";
    case ErrorCode::SingleConformation: return "SingleConformation";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::TooFewConformations: return "TooFewConformations";
    case ErrorCode::NonSPDCovariance: return "NonSPDCovariance";
    case ErrorCode::NoCalpha: return "NoCalpha";
    case ErrorCode::InconsistentModels: return "InconsistentModels";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::CoordinateOverflow: return "CoordinateOverflow";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::DuplicateRows: return "DuplicateRows";
    case ErrorCode::NonIntegerToken: return "NonIntegerToken";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::BrokenChain: return "BrokenChain";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numeric_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::InvalidInternalCoordinate:
    case ErrorCode::ConstantInput:
    case ErrorCode::NonSPDCovariance:
    case ErrorCode::CoordinateOverflow:
    case ErrorCode::BrokenChain:
      return true;
    default:
      return false;
  }
}

}  // namespace vqsyn
