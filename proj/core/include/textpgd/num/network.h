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

#ifndef TEXTPGD_NUM_NETWORK_H_
#define TEXTPGD_NUM_NETWORK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "textpgd/models/params.h"
#include "textpgd/num/tensor.h"
#include "textpgd/text/vocab.h"

namespace textpgd {

inline constexpr double kLayerNormEps = 1e-9;

// Attention key / pooling mask: 1 for real tokens, 0 for PAD. An empty span
// means every position is real.
using ValidMask = std::span<const uint8_t>;

std::vector<uint8_t> ValidFromIds(std::span<const TokenId> ids);

// Rows of the embedding matrix for ids. Throws on out-of-range ids.
Tensor Embed(const ModelParams& params, std::span<const TokenId> ids);

// Transformer: positional addition then `layers` post-LN blocks. avg_mlp has
// no encoder and returns emb unchanged.
Tensor EncodeForward(const ModelParams& params, const Tensor& emb,
                     ValidMask valid = {});

struct ForwardOutput {
  std::vector<double> logits;
  std::vector<double> pooled;  // sentence representation fed to the head
};

ForwardOutput ClassifierForward(const ModelParams& params, const Tensor& emb,
                                ValidMask valid = {});

enum class Objective {
  kCls,         // J = cross-entropy(logits, y)
  kClsPlusSim,  // J_aug = J - lambda * (1 - cos(pooled, ref))
};

struct GradResult {
  double loss = 0.0;
  Tensor grad_embeddings;  // same shape as the input embeddings
  int64_t forward_count = 0;
  std::vector<double> logits;
  std::vector<double> pooled;
};

// Exact reverse-mode gradient of the selected objective w.r.t. emb.
// Throws kNumerical ("numerical overflow") on a non-finite loss.
GradResult LossAndGrad(const ModelParams& params, const Tensor& emb, int label,
                       Objective objective,
                       std::optional<std::span<const double>> ref_sentence_emb,
                       double lambda_sem, ValidMask valid = {});

double CrossEntropy(std::span<const double> logits, int label);

// Training objectives. Parameter gradients are accumulated into `grads`
// scaled by `weight`; the unscaled loss is returned.
double ClassifierLossAndParamGrads(const ModelParams& params,
                                   std::span<const TokenId> ids, int label,
                                   double weight, ModelParams& grads);

struct MlmTarget {
  size_t pos;
  TokenId token;
};

// ids must already carry MASK at every target position. Loss is the mean
// cross-entropy over targets.
double MlmLossAndParamGrads(const ModelParams& params,
                            std::span<const TokenId> ids,
                            std::span<const MlmTarget> targets, double weight,
                            ModelParams& grads);

// Masked-LM logits E h[pos] + bias over the vocabulary.
std::vector<double> MlmLogits(const ModelParams& params,
                              std::span<const TokenId> ids, size_t pos);

}  // namespace textpgd

#endif  // TEXTPGD_NUM_NETWORK_H_
