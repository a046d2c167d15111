// Copyright 2026 The TextPGD Authors
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

#include "textpgd/num/adam.h"

#include <cmath>

#include "textpgd/util/error.h"

namespace textpgd {

AdamState MakeAdamState(const ModelParams& params) {
  AdamState s;
  for (const auto& [name, t] : NamedTensors(params)) {
    s.m.push_back(Tensor::ZerosLike(*t));
    s.v.push_back(Tensor::ZerosLike(*t));
  }
  return s;
}

void AdamStep(ModelParams& params, const ModelParams& grads, AdamState& state,
              const AdamOptions& opt) {
  auto p = NamedTensors(params);
  const auto g = NamedTensors(grads);
  Require(p.size() == g.size() && p.size() == state.m.size() &&
              p.size() == state.v.size(),
          ErrorCode::kShapeMismatch, "adam: parameter/gradient/state mismatch");
  state.t += 1;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.t));
  for (size_t k = 0; k < p.size(); ++k) {
    Tensor& w = *p[k].second;
    const Tensor& gk = *g[k].second;
    CheckSameShape(w, gk, "adam gradient");
    CheckSameShape(w, state.m[k], "adam moment");
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    for (size_t i = 0; i < w.size(); ++i) {
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * gk[i];
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * gk[i] * gk[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
    }
  }
}

}  // namespace textpgd
