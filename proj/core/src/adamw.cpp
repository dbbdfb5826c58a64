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

#include "coughep/adamw.hpp"

#include <cmath>

#include "coughep/error.hpp"

namespace coughep {

AdamW::AdamW(std::size_t n_params, const AdamWParams& params)
    : hp_(params), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamW::Step(std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    Fail(ErrorKind::kShape, "AdamW: parameter count changed between steps");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= lr * hp_.weight_decay * params[i];
    m_[i] = hp_.beta1 * m_[i] + (1.0 - hp_.beta1) * grads[i];
    v_[i] = hp_.beta2 * v_[i] + (1.0 - hp_.beta2) * grads[i] * grads[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + hp_.eps);
  }
}

}  // namespace coughep
