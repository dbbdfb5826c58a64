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

#include <string>
#include <vector>

#include "coughep/geometry.hpp"

namespace coughep {

/// Per-frame cough posteriors in [0, 1] at a model's output geometry.
struct ScoreSequence {
  std::vector<double> scores;
  FrameGeometry geometry;
  std::string source;

  std::int64_t size() const { return static_cast<std::int64_t>(scores.size()); }
  /// Throws kShape / kValidation on length mismatch or out-of-range values.
  void Validate() const;
};

}  // namespace coughep
