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

#include "textpgd/eval/victim.h"

namespace textpgd {

ForwardOutput QueryCountingVictim::Query(std::span<const TokenId> ids) {
  ++counter_;
  const std::vector<uint8_t> valid = ValidFromIds(ids);
  return ClassifierForward(*model_, Embed(*model_, ids), valid);
}

ForwardOutput QueryCountingVictim::QueryEmbeddings(const Tensor& emb) {
  ++counter_;
  return ClassifierForward(*model_, emb);
}

GradResult QueryCountingVictim::QueryGradient(
    const Tensor& emb, int label, Objective objective,
    std::optional<std::span<const double>> ref, double lambda_sem) {
  ++counter_;
  return LossAndGrad(*model_, emb, label, objective, ref, lambda_sem);
}

}  // namespace textpgd
