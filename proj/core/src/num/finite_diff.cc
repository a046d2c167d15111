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

#include "textpgd/num/finite_diff.h"

#include <algorithm>
#include <cmath>

#include "textpgd/util/error.h"

namespace textpgd {

Tensor FiniteDiffGradient(const std::function<double(const Tensor&)>& f,
                          const Tensor& x, double h) {
  Require(h > 0.0, ErrorCode::kInvalidArgument, "finite-difference step must be > 0");
  Tensor grad = Tensor::ZerosLike(x);
  Tensor probe = x;
  for (size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double MaxRelativeError(const Tensor& a, const Tensor& b, double floor) {
  CheckSameShape(a, b, "MaxRelativeError");
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace textpgd
