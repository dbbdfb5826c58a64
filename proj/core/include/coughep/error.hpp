// Copyright     2026  The cough-ep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coughep {

enum class ErrorKind {
  kFormat,
  kUnsupported,
  kEmptyInput,
  kValidation,
  kInvalidConfig,
  kShape,
  kDegenerateData,
  kUndefinedMetric,
  kUnattainableTarget,
  kIo,
};

/// Stable machine-readable name, used in the CLI's error JSON.
std::string_view ErrorKindName(ErrorKind kind);

/// Every module reports failures through this one exception type; callers
/// dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by threshold selection when the requested statistic cannot be met.
/// best_achievable() is the closest value any curve point reached.
class UnattainableTargetError : public Error {
 public:
  UnattainableTargetError(const std::string& message, double target,
                          double best_achievable, double best_threshold)
      : Error(ErrorKind::kUnattainableTarget, message),
        target_(target),
        best_achievable_(best_achievable),
        best_threshold_(best_threshold) {}

  double target() const noexcept { return target_; }
  double best_achievable() const noexcept { return best_achievable_; }
  double best_threshold() const noexcept { return best_threshold_; }

 private:
  double target_;
  double best_achievable_;
  double best_threshold_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& message);

}  // namespace coughep
