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

#include "textpgd/attack/attack.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "textpgd/eval/metrics.h"
#include "textpgd/models/model.h"
#include "textpgd/num/network.h"
#include "textpgd/util/error.h"
#include "textpgd/util/parallel.h"

namespace textpgd {

std::vector<double> TokenSaliency(QueryCountingVictim& victim,
                                  const TokenSeq& seq, int label,
                                  const std::vector<bool>& attackable) {
  Require(attackable.size() == seq.size(), ErrorCode::kShapeMismatch,
          "attackable mask length does not match sequence");
  std::vector<double> scores(seq.size(), 0.0);
  const double base = victim.Query(seq.ids).logits.at(label);
  std::vector<TokenId> probe = seq.ids;
  for (size_t i = 1; i < seq.size(); ++i) {
    if (!attackable[i]) continue;
    probe[i] = kMaskId;
    scores[i] = base - victim.Query(probe).logits.at(label);
    probe[i] = seq.ids[i];
  }
  return scores;
}

std::vector<Candidate> GenerateCandidates(const ModelParams& mlm,
                                          const TokenSeq& seq, size_t pos,
                                          int k, double tau) {
  Require(k >= 1, ErrorCode::kInvalidArgument, "K must be >= 1");
  const std::vector<double> probs = MlmPredict(mlm, seq, pos);
  std::vector<Candidate> all;
  all.reserve(probs.size());
  for (size_t id = kNumSpecialTokens; id < probs.size(); ++id) {
    if (static_cast<TokenId>(id) == seq.ids[pos]) continue;
    all.push_back({static_cast<TokenId>(id), probs[id]});
  }
  const size_t keep = std::min(all.size(), static_cast<size_t>(k));
  std::partial_sort(all.begin(), all.begin() + keep, all.end(),
                    [](const Candidate& a, const Candidate& b) {
                      if (a.prob != b.prob) return a.prob > b.prob;
                      return a.id < b.id;
                    });
  all.resize(keep);
  if (tau > 0.0) {
    std::erase_if(all, [tau](const Candidate& c) { return c.prob < tau; });
  }
  return all;
}

std::vector<double> AdaptiveBudgets(std::span<const double> saliency,
                                    double eps_base,
                                    const std::vector<bool>& attackable,
                                    bool adaptive) {
  Require(eps_base > 0.0, ErrorCode::kInvalidArgument, "eps_base must be > 0");
  Require(saliency.size() == attackable.size(), ErrorCode::kShapeMismatch,
          "saliency and attackable mask differ in length");
  double max_pos = 0.0;
  for (size_t i = 0; i < saliency.size(); ++i) {
    if (attackable[i]) max_pos = std::max(max_pos, saliency[i]);
  }
  std::vector<double> budgets(saliency.size(), 0.0);
  for (size_t i = 0; i < saliency.size(); ++i) {
    if (!attackable[i]) continue;
    if (!adaptive || max_pos <= 0.0) {
      budgets[i] = eps_base;
    } else {
      const double s = std::max(saliency[i], 0.0);
      budgets[i] = eps_base * (0.5 + s / (2.0 * max_pos));
    }
  }
  return budgets;
}

Tensor PerturbationState::Delta() const {
  Tensor d = current;
  AddInPlace(d, original, -1.0);
  return d;
}

PerturbationState MakePerturbationState(const Tensor& original,
                                        std::vector<double> budgets,
                                        TokenSeq tokens) {
  Require(budgets.size() == original.rows(), ErrorCode::kShapeMismatch,
          "one budget per position required");
  PerturbationState s;
  s.original = original;
  s.current = original;
  s.budgets = std::move(budgets);
  s.tokens = std::move(tokens);
  return s;
}

void PgdStep(PerturbationState& state, const Tensor& grad, double alpha) {
  CheckSameShape(state.current, grad, "pgd_step gradient");
  const size_t n = state.current.rows(), d = state.current.cols();
  for (size_t i = 0; i < n; ++i) {
    const double eps = state.budgets[i];
    for (size_t j = 0; j < d; ++j) {
      const double g = grad.at(i, j);
      const double sign = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
      const double x0 = state.original.at(i, j);
      const double stepped = state.current.at(i, j) + alpha * sign;
      state.current.at(i, j) = std::clamp(stepped, x0 - eps, x0 + eps);
    }
  }
  ++state.iter;
}

size_t MaxChanges(size_t attackable_positions, double max_perturb_pct) {
  return static_cast<size_t>(std::ceil(
      max_perturb_pct * static_cast<double>(attackable_positions) / 100.0));
}

namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

// Orders positions by saliency (descending), ties by position.
std::vector<size_t> BySaliency(std::vector<size_t> positions,
                               std::span<const double> saliency) {
  std::stable_sort(positions.begin(), positions.end(),
                   [&](size_t a, size_t b) {
                     if (saliency[a] != saliency[b]) return saliency[a] > saliency[b];
                     return a < b;
                   });
  return positions;
}

size_t CountTrue(const std::vector<bool>& v) {
  return static_cast<size_t>(std::count(v.begin(), v.end(), true));
}

}  // namespace

TokenSeq ProjectToTokens(const PerturbationState& state, const TokenSeq& original,
                         const std::vector<std::vector<Candidate>>& candidates,
                         const Tensor& embedding, std::span<const double> saliency,
                         const std::vector<bool>& attackable,
                         double max_perturb_pct, const Vocab& vocab) {
  const size_t n = original.size();
  Require(state.current.rows() == n && candidates.size() == n &&
              attackable.size() == n && saliency.size() == n,
          ErrorCode::kShapeMismatch, "project_to_tokens: inconsistent lengths");
  TokenSeq out = original;
  std::vector<size_t> changed;
  std::vector<TokenId> ids;
  for (size_t i = 1; i < n; ++i) {
    if (!attackable[i] || candidates[i].empty()) continue;
    const auto x = state.current.row(i);
    TokenId best = original.ids[i];
    double best_d = SquaredDistance(embedding.row(static_cast<size_t>(best)), x);
    ids.clear();
    for (const Candidate& c : candidates[i]) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    for (TokenId id : ids) {
      const double dist = SquaredDistance(embedding.row(static_cast<size_t>(id)), x);
      if (dist < best_d) {
        best_d = dist;
        best = id;
      }
    }
    if (best != original.ids[i]) {
      out.ids[i] = best;
      changed.push_back(i);
    }
  }
  const size_t cap = MaxChanges(CountTrue(attackable), max_perturb_pct);
  if (changed.size() > cap) {
    const std::vector<size_t> ranked = BySaliency(changed, saliency);
    for (size_t r = cap; r < ranked.size(); ++r) {
      out.ids[ranked[r]] = original.ids[ranked[r]];
    }
  }
  for (size_t i = 1; i < n; ++i) {
    if (out.ids[i] != original.ids[i]) out.words[i] = vocab.token(out.ids[i]);
  }
  return out;
}

namespace {

struct Prepared {
  TokenSeq seq;
  std::vector<bool> attackable;
  int label = 0;
};

Prepared Prepare(const QueryCountingVictim& victim, const ModelParams& mlm,
                 const Vocab& vocab, const LabeledExample& example,
                 const AttackConfig& config) {
  Validate(config);
  const ModelParams& model = victim.model();
  Require(model.dims.vocab_size == vocab.size() && mlm.dims.vocab_size == vocab.size(),
          ErrorCode::kVocabMismatch, "victim, MLM and vocab sizes disagree");
  Require(mlm.has_mlm_head(), ErrorCode::kInvalidArgument,
          "attacker model has no masked-LM head");
  Require(example.label >= 0 &&
              static_cast<size_t>(example.label) < model.dims.classes,
          ErrorCode::kInvalidArgument, "example label outside victim classes");
  Prepared p;
  p.seq = Tokenize(vocab, example.text,
                   std::min(model.dims.max_len, mlm.dims.max_len));
  p.attackable = AttackableMask(p.seq, example.attackable);
  p.label = example.label;
  return p;
}

AttackResult BaseResult(const Prepared& p) {
  AttackResult r;
  r.original = p.seq;
  r.adversarial = p.seq;
  r.attackable = p.attackable;
  r.true_label = p.label;
  r.predicted_label = p.label;
  r.similarity = 1.0;
  return r;
}

std::vector<std::vector<Candidate>> CandidateSets(const ModelParams& mlm,
                                                  const Prepared& p,
                                                  const AttackConfig& config) {
  std::vector<std::vector<Candidate>> sets(p.seq.size());
  for (size_t i = 1; i < p.seq.size(); ++i) {
    if (p.attackable[i]) sets[i] = GenerateCandidates(mlm, p.seq, i, config.k, config.tau);
  }
  return sets;
}

void Finish(AttackResult& r, const ModelParams& mlm, const TokenSeq& adversarial,
            int predicted) {
  r.adversarial = adversarial;
  r.predicted_label = predicted;
  r.perturb_pct = PerturbationPercent(r.original, adversarial, r.attackable);
  r.similarity = SemanticSimilarity(mlm, r.original, adversarial);
  r.success = true;
}

}  // namespace

AttackResult AttackPgd(QueryCountingVictim& victim, const ModelParams& mlm,
                       const Vocab& vocab, const LabeledExample& example,
                       const AttackConfig& config) {
  const Prepared p = Prepare(victim, mlm, vocab, example, config);
  victim.Reset();
  AttackResult result = BaseResult(p);
  int64_t queries = 0;

  // (a) clean query
  const ForwardOutput clean = victim.Query(p.seq.ids);
  ++queries;
  if (Argmax(clean.logits) != p.label) {
    result.skipped = true;
    result.predicted_label = Argmax(clean.logits);
    result.queries = queries;
    return result;
  }

  // (b) saliency and per-position budgets
  const std::vector<double> saliency =
      TokenSaliency(victim, p.seq, p.label, p.attackable);
  queries += 1 + static_cast<int64_t>(CountTrue(p.attackable));
  const std::vector<double> budgets = AdaptiveBudgets(
      saliency, config.eps_base, p.attackable, config.adaptive_budget);

  // (c) candidate sets from the original sentence
  const auto candidates = CandidateSets(mlm, p, config);
  const bool any_candidate = std::any_of(
      candidates.begin(), candidates.end(), [](const auto& c) { return !c.empty(); });

  // (d) sign-gradient iterations with discrete readout
  const ModelParams& model = victim.model();
  PerturbationState state = MakePerturbationState(Embed(model, p.seq.ids), budgets, p.seq);
  std::vector<TokenId> last_ids = p.seq.ids;
  int last_pred = p.label;
  double prev_loss = 0.0;
  int stall = 0;
  const int max_iters = any_candidate ? config.max_iters : 0;
  for (int it = 0; it < max_iters; ++it) {
    const GradResult g =
        victim.QueryGradient(state.current, p.label, Objective::kClsPlusSim,
                             std::span<const double>(clean.pooled), config.lambda_sem);
    ++queries;
    result.iterations = it + 1;
    PgdStep(state, g.grad_embeddings, config.alpha);
    state.tokens = ProjectToTokens(state, p.seq, candidates, model.embedding, saliency,
                                   p.attackable, config.max_perturb_pct, vocab);
    if (state.tokens.ids != last_ids) {
      last_pred = Argmax(victim.Query(state.tokens.ids).logits);
      ++queries;
      last_ids = state.tokens.ids;
    }
    if (last_pred != p.label &&
        SemanticSimilarity(mlm, p.seq, state.tokens) >= config.sim_min) {
      Finish(result, mlm, state.tokens, last_pred);
      break;
    }
    if (it > 0) {
      stall = (g.loss - prev_loss < config.early_stop_tol) ? stall + 1 : 0;
      if (stall >= config.early_stop_patience) break;
    }
    prev_loss = g.loss;
  }
  result.queries = queries;
  return result;
}

AttackResult AttackBaseline(QueryCountingVictim& victim, const ModelParams& mlm,
                            const Vocab& vocab, const LabeledExample& example,
                            const AttackConfig& config) {
  const Prepared p = Prepare(victim, mlm, vocab, example, config);
  victim.Reset();
  AttackResult result = BaseResult(p);
  int64_t queries = 0;

  const ForwardOutput clean = victim.Query(p.seq.ids);
  ++queries;
  if (Argmax(clean.logits) != p.label) {
    result.skipped = true;
    result.predicted_label = Argmax(clean.logits);
    result.queries = queries;
    return result;
  }
  const std::vector<double> saliency =
      TokenSaliency(victim, p.seq, p.label, p.attackable);
  queries += 1 + static_cast<int64_t>(CountTrue(p.attackable));
  const auto candidates = CandidateSets(mlm, p, config);

  std::vector<size_t> positions;
  for (size_t i = 1; i < p.seq.size(); ++i) {
    if (p.attackable[i]) positions.push_back(i);
  }
  const size_t cap = MaxChanges(positions.size(), config.max_perturb_pct);
  TokenSeq current = p.seq;
  double current_loss = CrossEntropy(clean.logits, p.label);
  size_t changes = 0;
  for (size_t pos : BySaliency(positions, saliency)) {
    if (changes >= cap) break;
    if (candidates[pos].empty()) continue;
    ++result.iterations;
    double best_loss = current_loss;
    TokenId best = current.ids[pos];
    for (const Candidate& c : candidates[pos]) {
      const TokenSeq trial = WithToken(vocab, current, pos, c.id);
      const ForwardOutput out = victim.Query(trial.ids);
      ++queries;
      const int pred = Argmax(out.logits);
      if (pred != p.label && SemanticSimilarity(mlm, p.seq, trial) >= config.sim_min) {
        Finish(result, mlm, trial, pred);
        result.queries = queries;
        return result;
      }
      const double loss = CrossEntropy(out.logits, p.label);
      if (loss > best_loss) {
        best_loss = loss;
        best = c.id;
      }
    }
    if (best != current.ids[pos]) {
      current = WithToken(vocab, current, pos, best);
      current_loss = best_loss;
      ++changes;
    }
  }
  result.queries = queries;
  return result;
}

AttackResult RunAttack(const ModelParams& victim, const ModelParams& mlm,
                       const Vocab& vocab, const LabeledExample& example,
                       const AttackConfig& config) {
  QueryCountingVictim metered(victim);
  return config.method == AttackMethod::kPgd
             ? AttackPgd(metered, mlm, vocab, example, config)
             : AttackBaseline(metered, mlm, vocab, example, config);
}

std::vector<AttackResult> RunAttacks(const ModelParams& victim,
                                     const ModelParams& mlm, const Vocab& vocab,
                                     const Dataset& data,
                                     const AttackConfig& config, size_t threads) {
  Validate(config);
  return ParallelMap<AttackResult>(data.size(), threads, [&](size_t i) {
    return RunAttack(victim, mlm, vocab, data[i], config);
  });
}

}  // namespace textpgd
