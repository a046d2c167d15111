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

#ifndef TEXTPGD_EVAL_VICTIM_H_
#define TEXTPGD_EVAL_VICTIM_H_

#include <cstdint>
#include <optional>
#include <span>

#include "textpgd/models/params.h"
#include "textpgd/num/network.h"

namespace textpgd {

// Meters every forward pass through a victim model. One instance per
// attack; never shared between concurrent attacks.
class QueryCountingVictim {
 public:
  explicit QueryCountingVictim(const ModelParams& model) : model_(&model) {}

  const ModelParams& model() const { return *model_; }
  int64_t queries() const { return counter_; }
  void Reset() { counter_ = 0; }

  ForwardOutput Query(std::span<const TokenId> ids);
  ForwardOutput QueryEmbeddings(const Tensor& emb);
  GradResult QueryGradient(const Tensor& emb, int label, Objective objective,
                           std::optional<std::span<const double>> ref,
                           double lambda_sem);

 private:
  const ModelParams* model_;
  int64_t counter_ = 0;
};

}  // namespace textpgd

#endif  // TEXTPGD_EVAL_VICTIM_H_
