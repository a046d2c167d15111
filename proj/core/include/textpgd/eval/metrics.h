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

#ifndef TEXTPGD_EVAL_METRICS_H_
#define TEXTPGD_EVAL_METRICS_H_

#include <span>
#include <vector>

#include "textpgd/attack/result.h"
#include "textpgd/models/params.h"
#include "textpgd/text/dataset.h"
#include "textpgd/text/vocab.h"

namespace textpgd {

// Fraction of examples whose argmax logit equals the label.
double CleanAccuracy(const ModelParams& model, const Vocab& vocab,
                     const Dataset& data);

// Failures / non-skipped results. Throws "no attackable examples" when every
// result is skipped.
double AttackedAccuracy(std::span<const AttackResult> results);
double SuccessRate(std::span<const AttackResult> results);

// 100 * changed positions (CLS excluded) / attackable positions. Symmetric.
double PerturbationPercent(const TokenSeq& orig, const TokenSeq& adv,
                           size_t attackable_positions);
double PerturbationPercent(const TokenSeq& orig, const TokenSeq& adv,
                           const std::vector<bool>& attackable);

// Cosine between the encoder's mean-pooled representations.
double SemanticSimilarity(const ModelParams& encoder, const TokenSeq& orig,
                          const TokenSeq& adv);

}  // namespace textpgd

#endif  // TEXTPGD_EVAL_METRICS_H_
