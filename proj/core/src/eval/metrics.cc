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

#include "textpgd/eval/metrics.h"

#include <algorithm>

#include "textpgd/models/model.h"
#include "textpgd/util/error.h"

namespace textpgd {

double CleanAccuracy(const ModelParams& model, const Vocab& vocab,
                     const Dataset& data) {
  Require(!data.empty(), ErrorCode::kInvalidArgument, "empty dataset");
  size_t correct = 0;
  for (const auto& ex : data) {
    const TokenSeq seq = Tokenize(vocab, ex.text, model.dims.max_len);
    if (Predict(model, seq.ids) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double AttackedAccuracy(std::span<const AttackResult> results) {
  Require(!results.empty(), ErrorCode::kInvalidArgument, "no attack results");
  size_t attacked = 0, failed = 0;
  for (const auto& r : results) {
    if (r.skipped) continue;
    ++attacked;
    if (!r.success) ++failed;
  }
  Require(attacked > 0, ErrorCode::kInvalidArgument, "no attackable examples");
  return static_cast<double>(failed) / static_cast<double>(attacked);
}

double SuccessRate(std::span<const AttackResult> results) {
  return 1.0 - AttackedAccuracy(results);
}

double PerturbationPercent(const TokenSeq& orig, const TokenSeq& adv,
                           size_t attackable_positions) {
  Require(orig.size() == adv.size(), ErrorCode::kInvalidArgument,
          "perturbation percent needs equal-length sequences");
  size_t changed = 0;
  for (size_t i = 1; i < orig.size(); ++i) {
    if (orig.ids[i] != adv.ids[i]) ++changed;
  }
  if (changed == 0) return 0.0;
  Require(attackable_positions > 0, ErrorCode::kInvalidArgument,
          "changed tokens but no attackable positions");
  return 100.0 * static_cast<double>(changed) /
         static_cast<double>(attackable_positions);
}

double PerturbationPercent(const TokenSeq& orig, const TokenSeq& adv,
                           const std::vector<bool>& attackable) {
  return PerturbationPercent(
      orig, adv,
      static_cast<size_t>(std::count(attackable.begin(), attackable.end(), true)));
}

double SemanticSimilarity(const ModelParams& encoder, const TokenSeq& orig,
                          const TokenSeq& adv) {
  return CosineSimilarity(SentenceEmbedding(encoder, orig.ids),
                          SentenceEmbedding(encoder, adv.ids));
}

}  // namespace textpgd
