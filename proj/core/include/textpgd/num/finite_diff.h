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

#ifndef TEXTPGD_NUM_FINITE_DIFF_H_
#define TEXTPGD_NUM_FINITE_DIFF_H_

#include <functional>

#include "textpgd/num/tensor.h"

namespace textpgd {

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per coordinate.
// Used as the independent check on reverse-mode gradients.
Tensor FiniteDiffGradient(const std::function<double(const Tensor&)>& f,
                          const Tensor& x, double h = 1e-5);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps
// near-zero coordinates from turning round-off into huge ratios.
double MaxRelativeError(const Tensor& a, const Tensor& b, double floor = 1e-6);

}  // namespace textpgd

#endif  // TEXTPGD_NUM_FINITE_DIFF_H_
