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

#include "textpgd/models/model.h"

#include <algorithm>

#include "textpgd/num/network.h"
#include "textpgd/util/error.h"

namespace textpgd {

std::vector<double> Classify(const ModelParams& params,
                             std::span<const TokenId> ids) {
  const std::vector<uint8_t> valid = ValidFromIds(ids);
  return ClassifierForward(params, Embed(params, ids), valid).logits;
}

std::vector<double> Classify(const ModelParams& params, const Tensor& emb) {
  return ClassifierForward(params, emb).logits;
}

int Argmax(std::span<const double> values) {
  Require(!values.empty(), ErrorCode::kInvalidArgument, "argmax of empty vector");
  return static_cast<int>(std::max_element(values.begin(), values.end()) -
                          values.begin());
}

std::vector<double> SentenceEmbedding(const ModelParams& params,
                                      std::span<const TokenId> ids) {
  const std::vector<uint8_t> valid = ValidFromIds(ids);
  return ClassifierForward(params, Embed(params, ids), valid).pooled;
}

std::vector<double> SentenceEmbedding(const ModelParams& params,
                                      const Tensor& emb) {
  return ClassifierForward(params, emb).pooled;
}

std::vector<double> MlmPredict(const ModelParams& params, const TokenSeq& seq,
                               size_t pos) {
  Require(pos != 0, ErrorCode::kInvalidArgument, "CLS not maskable");
  Require(pos < seq.size(), ErrorCode::kInvalidArgument,
          "mask position out of range");
  std::vector<TokenId> ids = seq.ids;
  ids[pos] = kMaskId;
  std::vector<double> probs = MlmLogits(params, ids, pos);
  SoftmaxInPlace(probs);
  return probs;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), ErrorCode::kShapeMismatch,
          "cosine of vectors with different lengths");
  const double na = Norm2(a), nb = Norm2(b);
  Require(na > 0.0 && nb > 0.0, ErrorCode::kNumerical,
          "degenerate representation");
  const double c = Dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace textpgd
