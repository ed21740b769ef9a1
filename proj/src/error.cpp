// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include "sphot/error.hpp"

namespace sphot {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AntipodalPoints: return "AntipodalPoints";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::DegenerateSupport: return "DegenerateSupport";
    case ErrorCode::EmptyPrototypeSet: return "EmptyPrototypeSet";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::AllZeroLikelihoods: return "AllZeroLikelihoods";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::InfeasibleWeights: return "InfeasibleWeights";
    case ErrorCode::ZeroCoupling: return "ZeroCoupling";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::EmptyRow: return "EmptyRow";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::TTooLarge: return "TTooLarge";
    case ErrorCode::UnmappedTube: return "UnmappedTube";
    case ErrorCode::MissingTruth: return "MissingTruth";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::IdCountMismatch: return "IdCountMismatch";
    case ErrorCode::InfeasibleSeparation: return "InfeasibleSeparation";
    case ErrorCode::FileError: return "FileError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace sphot
