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

#ifndef TEXTPGD_MODELS_MODEL_H_
#define TEXTPGD_MODELS_MODEL_H_

#include <span>
#include <vector>

#include "textpgd/models/params.h"
#include "textpgd/num/tensor.h"
#include "textpgd/text/vocab.h"

namespace textpgd {

// Classifier logits for token ids (PAD positions masked) or for a
// continuous embedding sequence (all positions treated as real).
std::vector<double> Classify(const ModelParams& params,
                             std::span<const TokenId> ids);
std::vector<double> Classify(const ModelParams& params, const Tensor& emb);

int Argmax(std::span<const double> values);
inline int Predict(const ModelParams& params, std::span<const TokenId> ids) {
  return Argmax(Classify(params, ids));
}

// Mean of encoder hidden states over non-PAD positions (CLS included).
std::vector<double> SentenceEmbedding(const ModelParams& params,
                                      std::span<const TokenId> ids);
std::vector<double> SentenceEmbedding(const ModelParams& params,
                                      const Tensor& emb);

// softmax(E h[pos] + b) with MASK placed at pos. Position 0 is rejected
// with "CLS not maskable".
std::vector<double> MlmPredict(const ModelParams& params, const TokenSeq& seq,
                               size_t pos);

double CosineSimilarity(std::span<const double> a, std::span<const double> b);

}  // namespace textpgd

#endif  // TEXTPGD_MODELS_MODEL_H_
