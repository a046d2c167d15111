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

#include "oracles/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "textpgd/eval/metrics.h"
#include "textpgd/models/model.h"

namespace textpgd::oracle {
namespace {

using Mat = std::vector<std::vector<double>>;

Mat Mul(const Mat& a, const Tensor& w) {
  Mat out(a.size(), std::vector<double>(w.cols(), 0.0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < w.rows(); ++k)
      for (size_t j = 0; j < w.cols(); ++j) out[i][j] += a[i][k] * w.at(k, j);
  return out;
}

void LayerNorm(Mat& x, const Tensor& gain, const Tensor& bias) {
  for (auto& row : x) {
    const double n = static_cast<double>(row.size());
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= n;
    const double denom = std::sqrt(var + 1e-9);
    for (size_t j = 0; j < row.size(); ++j) {
      row[j] = gain[j] * (row[j] - mean) / denom + bias[j];
    }
  }
}

double LogSumExp(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

double Xent(const std::vector<double>& logits, int label) {
  return LogSumExp(logits) - logits[static_cast<size_t>(label)];
}

int ArgmaxFirst(const std::vector<double>& v) {
  int best = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

std::vector<std::string> FrequencyVocab(const std::vector<std::string>& corpus,
                                        int min_freq) {
  std::map<std::string, int> counts;
  for (const std::string& line : corpus) {
    std::istringstream in(line);
    std::string w;
    while (in >> w) {
      for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      ++counts[w];
    }
  }
  std::vector<std::pair<int, std::string>> rows;
  for (const auto& [w, c] : counts) {
    if (c >= min_freq) rows.emplace_back(-c, w);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.second);
  return out;
}

Forward BruteForward(const ModelParams& p, const std::vector<TokenId>& ids) {
  const size_t n = ids.size(), d = p.dims.dim;
  Mat x(n, std::vector<double>(d));
  std::vector<bool> real(n);
  for (size_t i = 0; i < n; ++i) {
    real[i] = ids[i] != kPadId;
    for (size_t j = 0; j < d; ++j) {
      x[i][j] = p.embedding.at(static_cast<size_t>(ids[i]), j);
      if (p.arch == Arch::kTransformer) x[i][j] += p.positional.at(i, j);
    }
  }
  if (p.arch == Arch::kTransformer) {
    for (const LayerParams& l : p.layers) {
      const Mat q = Mul(x, l.wq), k = Mul(x, l.wk), v = Mul(x, l.wv);
      Mat ctx(n, std::vector<double>(d, 0.0));
      for (size_t i = 0; i < n; ++i) {
        std::vector<double> w(n, 0.0);
        double mx = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < n; ++j) {
          if (!real[j]) continue;
          double s = 0.0;
          for (size_t t = 0; t < d; ++t) s += q[i][t] * k[j][t];
          w[j] = s / std::sqrt(static_cast<double>(d));
          mx = std::max(mx, w[j]);
        }
        double z = 0.0;
        for (size_t j = 0; j < n; ++j) {
          w[j] = real[j] ? std::exp(w[j] - mx) : 0.0;
          z += w[j];
        }
        for (size_t j = 0; j < n; ++j)
          for (size_t t = 0; t < d; ++t) ctx[i][t] += w[j] / z * v[j][t];
      }
      Mat h1 = Mul(ctx, l.wo);
      for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < d; ++t) h1[i][t] += x[i][t];
      LayerNorm(h1, l.ln1_gain, l.ln1_bias);
      Mat u = Mul(h1, l.ff_w1);
      for (auto& row : u)
        for (size_t j = 0; j < row.size(); ++j) row[j] = std::max(0.0, row[j] + l.ff_b1[j]);
      Mat h2 = Mul(u, l.ff_w2);
      for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < d; ++t) h2[i][t] += l.ff_b2[t] + h1[i][t];
      LayerNorm(h2, l.ln2_gain, l.ln2_bias);
      x = std::move(h2);
    }
  }
  Forward f;
  f.hidden = x;
  f.pooled.assign(d, 0.0);
  double count = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!real[i]) continue;
    count += 1.0;
    for (size_t t = 0; t < d; ++t) f.pooled[t] += x[i][t];
  }
  for (double& v : f.pooled) v /= count;
  std::vector<double> feat = f.pooled;
  if (p.arch == Arch::kAvgMlp) {
    feat.assign(p.dims.hidden, 0.0);
    for (size_t j = 0; j < p.dims.hidden; ++j) {
      double s = p.mlp_b[j];
      for (size_t t = 0; t < d; ++t) s += f.pooled[t] * p.mlp_w.at(t, j);
      feat[j] = std::max(0.0, s);
    }
  }
  f.logits.assign(p.dims.classes, 0.0);
  for (size_t c = 0; c < p.dims.classes; ++c) {
    double s = p.cls_b[c];
    for (size_t t = 0; t < feat.size(); ++t) s += feat[t] * p.cls_w.at(t, c);
    f.logits[c] = s;
  }
  return f;
}

std::vector<double> BruteMlm(const ModelParams& p, std::vector<TokenId> ids,
                             size_t pos) {
  ids[pos] = kMaskId;
  const Forward f = BruteForward(p, ids);
  std::vector<double> z(p.dims.vocab_size);
  for (size_t w = 0; w < z.size(); ++w) {
    double s = p.mlm_bias[w];
    for (size_t t = 0; t < p.dims.dim; ++t) s += p.embedding.at(w, t) * f.hidden[pos][t];
    z[w] = s;
  }
  const double lse = LogSumExp(z);
  for (double& v : z) v = std::exp(v - lse);
  return z;
}

std::vector<double> MaskingSaliency(const ModelParams& victim,
                                    const std::vector<TokenId>& ids, int label,
                                    const std::vector<bool>& attackable) {
  const auto y = static_cast<size_t>(label);
  const double base = Classify(victim, ids)[y];
  std::vector<double> out(ids.size(), 0.0);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i == 0 || !attackable[i]) continue;
    std::vector<TokenId> masked = ids;
    masked[i] = kMaskId;
    out[i] = base - Classify(victim, masked)[y];
  }
  return out;
}

std::vector<Candidate> SortFilterCandidates(const std::vector<double>& probs,
                                            TokenId original, int k, double tau) {
  std::vector<Candidate> all;
  for (size_t id = 0; id < probs.size(); ++id) {
    all.push_back({static_cast<TokenId>(id), probs[id]});
  }
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return a.prob > b.prob;
  });
  std::vector<Candidate> out;
  for (const Candidate& c : all) {
    if (c.id <= kClsId || c.id == original) continue;
    if (static_cast<int>(out.size()) == k) break;
    out.push_back(c);
  }
  std::vector<Candidate> kept;
  for (const Candidate& c : out) {
    if (tau <= 0.0 || c.prob >= tau) kept.push_back(c);
  }
  return kept;
}

std::vector<TokenId> NearestNeighborReadout(
    const Mat& current, const std::vector<TokenId>& original,
    const std::vector<std::vector<Candidate>>& candidates, const Mat& embedding,
    const std::vector<double>& saliency, const std::vector<bool>& attackable,
    double max_perturb_pct) {
  const size_t n = original.size();
  std::vector<TokenId> out = original;
  std::vector<size_t> changed;
  size_t n_attackable = 0;
  for (size_t i = 0; i < n; ++i) n_attackable += attackable[i] ? 1 : 0;
  for (size_t i = 1; i < n; ++i) {
    if (!attackable[i] || candidates[i].empty()) continue;
    // (distance, is_not_original, id) lexicographic minimum.
    std::vector<std::tuple<double, int, TokenId>> pool;
    auto dist = [&](TokenId id) {
      double s = 0.0;
      for (size_t j = 0; j < current[i].size(); ++j) {
        const double t = embedding[static_cast<size_t>(id)][j] - current[i][j];
        s += t * t;
      }
      return s;
    };
    pool.emplace_back(dist(original[i]), 0, original[i]);
    for (const Candidate& c : candidates[i]) pool.emplace_back(dist(c.id), 1, c.id);
    const auto best = *std::min_element(pool.begin(), pool.end());
    if (std::get<2>(best) != original[i]) {
      out[i] = std::get<2>(best);
      changed.push_back(i);
    }
  }
  const auto cap = static_cast<size_t>(
      std::ceil(max_perturb_pct * static_cast<double>(n_attackable) / 100.0));
  if (changed.size() > cap) {
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t i : changed) ranked.emplace_back(-saliency[i], i);
    std::sort(ranked.begin(), ranked.end());
    for (size_t r = cap; r < ranked.size(); ++r) {
      out[ranked[r].second] = original[ranked[r].second];
    }
  }
  return out;
}

bool ExistsSingleFlip(const ModelParams& victim, const std::vector<TokenId>& ids,
                      int label, const std::vector<std::vector<Candidate>>& cands,
                      const std::vector<bool>& attackable) {
  for (size_t i = 1; i < ids.size(); ++i) {
    if (!attackable[i]) continue;
    for (const Candidate& c : cands[i]) {
      std::vector<TokenId> t = ids;
      t[i] = c.id;
      if (ArgmaxFirst(BruteForward(victim, t).logits) != label) return true;
    }
  }
  return false;
}

BaselineReplay ReplayBaseline(const ModelParams& victim, const ModelParams& mlm,
                              const Vocab& vocab, const LabeledExample& example,
                              const AttackConfig& config) {
  BaselineReplay r;
  const TokenSeq seq = Tokenize(vocab, example.text,
                                std::min(victim.dims.max_len, mlm.dims.max_len));
  const std::vector<bool> attackable = AttackableMask(seq, example.attackable);
  r.adversarial = seq.ids;
  const std::vector<double> clean = Classify(victim, seq.ids);
  ++r.queries;
  if (ArgmaxFirst(clean) != example.label) return r;

  size_t n_attackable = 0;
  std::vector<std::pair<double, size_t>> order;
  ++r.queries;  // unmasked reference for saliency
  const std::vector<double> sal =
      MaskingSaliency(victim, seq.ids, example.label, attackable);
  for (size_t i = 1; i < seq.size(); ++i) {
    if (!attackable[i]) continue;
    ++n_attackable;
    ++r.queries;
    order.emplace_back(-sal[i], i);
  }
  std::sort(order.begin(), order.end());
  const auto cap = static_cast<size_t>(
      std::ceil(config.max_perturb_pct * static_cast<double>(n_attackable) / 100.0));

  std::vector<TokenId> cur = seq.ids;
  double cur_loss = Xent(clean, example.label);
  size_t changes = 0;
  for (const auto& [neg, pos] : order) {
    if (changes >= cap) break;
    const auto cands = SortFilterCandidates(MlmPredict(mlm, seq, pos), seq.ids[pos],
                                            config.k, config.tau);
    if (cands.empty()) continue;
    double best_loss = cur_loss;
    TokenId best = cur[pos];
    for (const Candidate& c : cands) {
      std::vector<TokenId> trial = cur;
      trial[pos] = c.id;
      const std::vector<double> logits = Classify(victim, trial);
      ++r.queries;
      TokenSeq trial_seq = seq;
      trial_seq.ids = trial;
      if (ArgmaxFirst(logits) != example.label &&
          SemanticSimilarity(mlm, seq, trial_seq) >= config.sim_min) {
        r.adversarial = trial;
        r.success = true;
        return r;
      }
      const double loss = Xent(logits, example.label);
      if (loss > best_loss) {
        best_loss = loss;
        best = c.id;
      }
    }
    if (best != cur[pos]) {
      cur[pos] = best;
      cur_loss = best_loss;
      ++changes;
    }
  }
  return r;
}

size_t CountCorrect(const ModelParams& model, const Vocab& vocab,
                    const Dataset& data) {
  size_t correct = 0;
  for (const LabeledExample& ex : data) {
    const TokenSeq seq = Tokenize(vocab, ex.text, model.dims.max_len);
    if (ArgmaxFirst(BruteForward(model, seq.ids).logits) == ex.label) ++correct;
  }
  return correct;
}

double Cosine(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(dot / std::sqrt(na * nb));
}

double DiffPercent(const std::vector<TokenId>& a, const std::vector<TokenId>& b,
                   const std::vector<bool>& attackable) {
  double diff = 0.0, total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (i > 0 && a[i] != b[i]) diff += 1.0;
    if (attackable[i]) total += 1.0;
  }
  return 100.0 * diff / total;
}

Mat Rows(const Tensor& t) {
  Mat out(t.rows(), std::vector<double>(t.cols()));
  for (size_t i = 0; i < t.rows(); ++i)
    for (size_t j = 0; j < t.cols(); ++j) out[i][j] = t.at(i, j);
  return out;
}

}  // namespace textpgd::oracle
