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

#ifndef TEXTPGD_NUM_ADAM_H_
#define TEXTPGD_NUM_ADAM_H_

#include <cstdint>
#include <vector>

#include "textpgd/models/params.h"

namespace textpgd {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moments mirror NamedTensors(params) order.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  int64_t t = 0;
};

AdamState MakeAdamState(const ModelParams& params);

// Bias-corrected Adam update of every parameter tensor; increments t.
void AdamStep(ModelParams& params, const ModelParams& grads, AdamState& state,
              const AdamOptions& opt);

}  // namespace textpgd

#endif  // TEXTPGD_NUM_ADAM_H_
