// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sphot {

enum class ErrorCode {
  // geometry
  ZeroVector,
  DimensionMismatch,
  AntipodalPoints,
  AllZeroWeights,
  DegenerateSupport,
  // measures
  EmptyPrototypeSet,
  KTooLarge,
  EmptyInput,
  EmptySelection,
  AllZeroLikelihoods,
  DegenerateWeights,
  // transport
  InfeasibleWeights,
  ZeroCoupling,
  NumericalUnderflow,
  // pipeline
  EmptyRow,
  IndexMismatch,
  TTooLarge,
  UnmappedTube,
  // metrics
  MissingTruth,
  EmptyClass,
  // io / synth
  BadMagic,
  TruncatedPayload,
  IdCountMismatch,
  InfeasibleSeparation,
  FileError,
  // generic contract violations
  InvalidArgument,
  InvalidConfig,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. `code()` is stable and machine-parseable; the CLI
/// prints errors as `ERROR:<code>:<message>`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* code_name() const noexcept { return to_string(code_); }

  /// I/O-category errors map to CLI exit code 2, everything else to 1.
  bool is_io() const noexcept {
    switch (code_) {
      case ErrorCode::BadMagic:
      case ErrorCode::TruncatedPayload:
      case ErrorCode::IdCountMismatch:
      case ErrorCode::FileError:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace sphot
