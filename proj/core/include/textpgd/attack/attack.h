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

#ifndef TEXTPGD_ATTACK_ATTACK_H_
#define TEXTPGD_ATTACK_ATTACK_H_

#include <span>
#include <vector>

#include "textpgd/attack/config.h"
#include "textpgd/attack/result.h"
#include "textpgd/eval/victim.h"
#include "textpgd/models/params.h"
#include "textpgd/num/tensor.h"
#include "textpgd/text/dataset.h"
#include "textpgd/text/vocab.h"

namespace textpgd {

// score[i] = logit_y(seq) - logit_y(seq with MASK at i) for attackable i,
// 0 elsewhere. Costs 1 + (#attackable) victim queries.
std::vector<double> TokenSaliency(QueryCountingVictim& victim,
                                  const TokenSeq& seq, int label,
                                  const std::vector<bool>& attackable);

struct Candidate {
  TokenId id;
  double prob;
  bool operator==(const Candidate&) const = default;
};

// Top-k masked-LM substitutes at pos, most probable first (ties: lower id),
// excluding special tokens and the current token. With tau > 0, entries
// below tau are dropped, so the list may be shorter than k or empty.
std::vector<Candidate> GenerateCandidates(const ModelParams& mlm,
                                          const TokenSeq& seq, size_t pos,
                                          int k, double tau);

// eps_i = eps_base * (0.5 + s_i+ / (2 max_j s_j+)) on attackable positions
// (eps_base when every s+ is 0, or when adaptive is false); 0 elsewhere.
std::vector<double> AdaptiveBudgets(std::span<const double> saliency,
                                    double eps_base,
                                    const std::vector<bool>& attackable,
                                    bool adaptive = true);

// Continuous attack state. The perturbation is always current - original;
// it is never stored separately.
struct PerturbationState {
  Tensor original;               // [n x d] clean embeddings
  Tensor current;                // [n x d] perturbed embeddings
  std::vector<double> budgets;   // per position l-inf radius
  TokenSeq tokens;               // latest discrete readout
  int iter = 0;

  Tensor Delta() const;
};

PerturbationState MakePerturbationState(const Tensor& original,
                                        std::vector<double> budgets,
                                        TokenSeq tokens);

// current <- clip(current + alpha * sign(grad), original +- budget_i).
// sign(0) = 0. Increments iter.
void PgdStep(PerturbationState& state, const Tensor& grad, double alpha);

// Largest number of substituted positions allowed for an attack.
size_t MaxChanges(size_t attackable_positions, double max_perturb_pct);

// Discretizes state.current: each attackable position takes the token among
// {original} + candidates[i] whose embedding row is nearest in l2 (ties go
// to the original token, then to the lower id). At most
// MaxChanges(...) positions keep a substitution, preferring higher saliency
// (ties: lower position).
TokenSeq ProjectToTokens(const PerturbationState& state, const TokenSeq& original,
                         const std::vector<std::vector<Candidate>>& candidates,
                         const Tensor& embedding, std::span<const double> saliency,
                         const std::vector<bool>& attackable,
                         double max_perturb_pct, const Vocab& vocab);

// Victim and MLM must share `vocab`. `victim` is reset at the start; the
// returned result carries the attack's own query tally, which must equal
// victim.queries() afterwards.
AttackResult AttackPgd(QueryCountingVictim& victim, const ModelParams& mlm,
                       const Vocab& vocab, const LabeledExample& example,
                       const AttackConfig& config);

AttackResult AttackBaseline(QueryCountingVictim& victim, const ModelParams& mlm,
                            const Vocab& vocab, const LabeledExample& example,
                            const AttackConfig& config);

// Dispatches on config.method with a fresh query counter.
AttackResult RunAttack(const ModelParams& victim, const ModelParams& mlm,
                       const Vocab& vocab, const LabeledExample& example,
                       const AttackConfig& config);

// Attacks every example, in order, on up to `threads` workers.
std::vector<AttackResult> RunAttacks(const ModelParams& victim,
                                     const ModelParams& mlm, const Vocab& vocab,
                                     const Dataset& data,
                                     const AttackConfig& config, size_t threads);

}  // namespace textpgd

#endif  // TEXTPGD_ATTACK_ATTACK_H_
