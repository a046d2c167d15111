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

#include "textpgd/num/network.h"

#include <cmath>
#include <limits>

#include "textpgd/util/error.h"

namespace textpgd {

namespace {

struct LayerNormCache {
  Tensor xhat;
  std::vector<double> inv_std;
};

Tensor LayerNormForward(const Tensor& x, const Tensor& gain, const Tensor& bias,
                        LayerNormCache& cache) {
  const size_t n = x.rows(), d = x.cols();
  Tensor y = Tensor::Matrix(n, d);
  cache.xhat = Tensor::Matrix(n, d);
  cache.inv_std.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    double mu = 0.0;
    for (double v : xi) mu += v;
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (double v : xi) var += (v - mu) * (v - mu);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.inv_std[i] = inv;
    for (size_t j = 0; j < d; ++j) {
      const double xh = (xi[j] - mu) * inv;
      cache.xhat.at(i, j) = xh;
      y.at(i, j) = gain[j] * xh + bias[j];
    }
  }
  return y;
}

Tensor LayerNormBackward(const Tensor& dy, const Tensor& gain,
                         const LayerNormCache& cache, Tensor* dgain,
                         Tensor* dbias) {
  const size_t n = dy.rows(), d = dy.cols();
  Tensor dx = Tensor::Matrix(n, d);
  std::vector<double> dxhat(d);
  for (size_t i = 0; i < n; ++i) {
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (size_t j = 0; j < d; ++j) {
      const double g = dy.at(i, j);
      const double xh = cache.xhat.at(i, j);
      if (dgain) (*dgain)[j] += g * xh;
      if (dbias) (*dbias)[j] += g;
      dxhat[j] = g * gain[j];
      mean_dxhat += dxhat[j];
      mean_dxhat_xhat += dxhat[j] * xh;
    }
    mean_dxhat /= static_cast<double>(d);
    mean_dxhat_xhat /= static_cast<double>(d);
    for (size_t j = 0; j < d; ++j) {
      dx.at(i, j) = cache.inv_std[i] *
                    (dxhat[j] - mean_dxhat - cache.xhat.at(i, j) * mean_dxhat_xhat);
    }
  }
  return dx;
}

struct LayerCache {
  Tensor in, q, k, v, attn, ctx;
  LayerNormCache ln1;
  Tensor h1, u, act;
  LayerNormCache ln2;
};

struct EncoderCache {
  std::vector<uint8_t> valid;
  size_t n_valid = 0;
  std::vector<LayerCache> layers;
  Tensor hidden;
};

std::vector<uint8_t> ResolveValid(ValidMask valid, size_t n) {
  if (valid.empty()) return std::vector<uint8_t>(n, 1);
  Require(valid.size() == n, ErrorCode::kShapeMismatch,
          "valid mask length does not match sequence length");
  return {valid.begin(), valid.end()};
}

EncoderCache RunEncoder(const ModelParams& p, const Tensor& emb, ValidMask valid,
                        bool keep_cache) {
  const size_t n = emb.rows(), d = p.dims.dim;
  Require(emb.rank() == 2 && emb.cols() == d, ErrorCode::kShapeMismatch,
          "embedding input " + ShapeString(emb.shape()) +
              " does not have model dimension " + std::to_string(d));
  Require(n >= 1, ErrorCode::kShapeMismatch, "empty sequence");
  EncoderCache cache;
  cache.valid = ResolveValid(valid, n);
  for (uint8_t v : cache.valid) cache.n_valid += v ? 1 : 0;
  Require(cache.n_valid > 0, ErrorCode::kInvalidArgument,
          "sequence has no non-PAD positions");

  if (p.arch == Arch::kAvgMlp) {
    cache.hidden = emb;
    return cache;
  }
  Require(n <= p.dims.max_len, ErrorCode::kShapeMismatch,
          "sequence length " + std::to_string(n) + " exceeds max_len " +
              std::to_string(p.dims.max_len));

  Tensor x = emb;
  for (size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    auto pi = p.positional.row(i);
    for (size_t j = 0; j < d; ++j) xi[j] += pi[j];
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  for (const LayerParams& l : p.layers) {
    LayerCache c;
    c.q = MatMul(x, l.wq);
    c.k = MatMul(x, l.wk);
    c.v = MatMul(x, l.wv);
    c.attn = MatMulTransB(c.q, c.k);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        c.attn.at(i, j) = cache.valid[j] ? c.attn.at(i, j) * scale : kNegInf;
      }
    }
    SoftmaxRowsInPlace(c.attn);
    c.ctx = MatMul(c.attn, c.v);
    Tensor r1 = MatMul(c.ctx, l.wo);
    AddInPlace(r1, x);
    c.h1 = LayerNormForward(r1, l.ln1_gain, l.ln1_bias, c.ln1);
    c.u = MatMul(c.h1, l.ff_w1);
    AddRowVector(c.u, l.ff_b1);
    c.act = c.u;
    for (double& a : c.act.data()) a = a > 0.0 ? a : 0.0;
    Tensor r2 = MatMul(c.act, l.ff_w2);
    AddRowVector(r2, l.ff_b2);
    AddInPlace(r2, c.h1);
    Tensor out = LayerNormForward(r2, l.ln2_gain, l.ln2_bias, c.ln2);
    c.in = std::move(x);
    x = std::move(out);
    if (keep_cache) {
      cache.layers.push_back(std::move(c));
    }
  }
  cache.hidden = std::move(x);
  return cache;
}

// Returns d(loss)/d(emb). Accumulates parameter gradients when grads != null.
Tensor BackwardEncoder(const ModelParams& p, const EncoderCache& cache,
                       Tensor d_hidden, ModelParams* grads) {
  if (p.arch == Arch::kAvgMlp) return d_hidden;
  const size_t n = d_hidden.rows(), d = p.dims.dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Tensor dx = std::move(d_hidden);
  for (size_t li = p.layers.size(); li-- > 0;) {
    const LayerParams& l = p.layers[li];
    const LayerCache& c = cache.layers[li];
    LayerParams* g = grads ? &grads->layers[li] : nullptr;

    Tensor dr2 = LayerNormBackward(dx, l.ln2_gain, c.ln2,
                                   g ? &g->ln2_gain : nullptr,
                                   g ? &g->ln2_bias : nullptr);
    // r2 = act W2 + b2 + h1
    Tensor dh1 = dr2;
    if (g) {
      AddMatMulTransA(c.act, dr2, g->ff_w2);
      AccumulateColumnSums(dr2, g->ff_b2);
    }
    Tensor dact = MatMulTransB(dr2, l.ff_w2);
    for (size_t i = 0; i < dact.size(); ++i) {
      if (c.u[i] <= 0.0) dact[i] = 0.0;
    }
    if (g) {
      AddMatMulTransA(c.h1, dact, g->ff_w1);
      AccumulateColumnSums(dact, g->ff_b1);
    }
    AddInPlace(dh1, MatMulTransB(dact, l.ff_w1));

    Tensor dr1 = LayerNormBackward(dh1, l.ln1_gain, c.ln1,
                                   g ? &g->ln1_gain : nullptr,
                                   g ? &g->ln1_bias : nullptr);
    // r1 = ctx Wo + in
    Tensor din = dr1;
    if (g) AddMatMulTransA(c.ctx, dr1, g->wo);
    Tensor dctx = MatMulTransB(dr1, l.wo);
    // ctx = attn v
    Tensor dattn = MatMulTransB(dctx, c.v);
    Tensor dv = MatMulTransA(c.attn, dctx);
    // attn = softmax(scale * q k^T), masked keys have zero probability.
    Tensor ds = Tensor::Matrix(n, n);
    for (size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (size_t j = 0; j < n; ++j) dot += dattn.at(i, j) * c.attn.at(i, j);
      for (size_t j = 0; j < n; ++j) {
        ds.at(i, j) = c.attn.at(i, j) * (dattn.at(i, j) - dot) * scale;
      }
    }
    Tensor dq = MatMul(ds, c.k);
    Tensor dk = MatMulTransA(ds, c.q);
    if (g) {
      AddMatMulTransA(c.in, dq, g->wq);
      AddMatMulTransA(c.in, dk, g->wk);
      AddMatMulTransA(c.in, dv, g->wv);
    }
    AddInPlace(din, MatMulTransB(dq, l.wq));
    AddInPlace(din, MatMulTransB(dk, l.wk));
    AddInPlace(din, MatMulTransB(dv, l.wv));
    dx = std::move(din);
  }
  if (grads) {
    for (size_t i = 0; i < n; ++i) {
      auto gi = grads->positional.row(i);
      auto di = dx.row(i);
      for (size_t j = 0; j < d; ++j) gi[j] += di[j];
    }
  }
  return dx;
}

std::vector<double> MeanPool(const Tensor& hidden,
                             const std::vector<uint8_t>& valid,
                             size_t n_valid) {
  std::vector<double> pooled(hidden.cols(), 0.0);
  for (size_t i = 0; i < hidden.rows(); ++i) {
    if (!valid[i]) continue;
    auto hi = hidden.row(i);
    for (size_t j = 0; j < pooled.size(); ++j) pooled[j] += hi[j];
  }
  for (double& x : pooled) x /= static_cast<double>(n_valid);
  return pooled;
}

struct HeadCache {
  std::vector<double> pooled;
  std::vector<double> u;  // avg_mlp hidden pre-activation
  std::vector<double> z;
  std::vector<double> logits;
};

HeadCache HeadForward(const ModelParams& p, const EncoderCache& enc) {
  HeadCache h;
  h.pooled = MeanPool(enc.hidden, enc.valid, enc.n_valid);
  const std::vector<double>* feat = &h.pooled;
  if (p.arch == Arch::kAvgMlp) {
    const size_t hid = p.dims.hidden;
    h.u.assign(p.mlp_b.data().begin(), p.mlp_b.data().end());
    for (size_t i = 0; i < h.pooled.size(); ++i) {
      auto wi = p.mlp_w.row(i);
      for (size_t j = 0; j < hid; ++j) h.u[j] += h.pooled[i] * wi[j];
    }
    h.z = h.u;
    for (double& x : h.z) x = x > 0.0 ? x : 0.0;
    feat = &h.z;
  }
  const size_t c = p.dims.classes;
  h.logits.assign(p.cls_b.data().begin(), p.cls_b.data().end());
  for (size_t i = 0; i < feat->size(); ++i) {
    auto wi = p.cls_w.row(i);
    for (size_t j = 0; j < c; ++j) h.logits[j] += (*feat)[i] * wi[j];
  }
  return h;
}

// d_pooled from d_logits (and optional extra d_pooled contribution).
std::vector<double> HeadBackward(const ModelParams& p, const HeadCache& h,
                                 const std::vector<double>& dlogits,
                                 ModelParams* grads) {
  const size_t c = p.dims.classes;
  const std::vector<double>& feat = p.arch == Arch::kAvgMlp ? h.z : h.pooled;
  std::vector<double> dfeat(feat.size(), 0.0);
  for (size_t i = 0; i < feat.size(); ++i) {
    auto wi = p.cls_w.row(i);
    for (size_t j = 0; j < c; ++j) {
      dfeat[i] += wi[j] * dlogits[j];
      if (grads) grads->cls_w.at(i, j) += feat[i] * dlogits[j];
    }
  }
  if (grads) {
    for (size_t j = 0; j < c; ++j) grads->cls_b[j] += dlogits[j];
  }
  if (p.arch != Arch::kAvgMlp) return dfeat;

  std::vector<double> du(dfeat.size());
  for (size_t j = 0; j < du.size(); ++j) du[j] = h.u[j] > 0.0 ? dfeat[j] : 0.0;
  std::vector<double> dpooled(h.pooled.size(), 0.0);
  for (size_t i = 0; i < h.pooled.size(); ++i) {
    auto wi = p.mlp_w.row(i);
    for (size_t j = 0; j < du.size(); ++j) {
      dpooled[i] += wi[j] * du[j];
      if (grads) grads->mlp_w.at(i, j) += h.pooled[i] * du[j];
    }
  }
  if (grads) {
    for (size_t j = 0; j < du.size(); ++j) grads->mlp_b[j] += du[j];
  }
  return dpooled;
}

Tensor SpreadPooledGrad(const std::vector<double>& dpooled,
                        const EncoderCache& enc) {
  Tensor dh = Tensor::Matrix(enc.hidden.rows(), enc.hidden.cols());
  const double inv_n = 1.0 / static_cast<double>(enc.n_valid);
  for (size_t i = 0; i < dh.rows(); ++i) {
    if (!enc.valid[i]) continue;
    auto di = dh.row(i);
    for (size_t j = 0; j < di.size(); ++j) di[j] = dpooled[j] * inv_n;
  }
  return dh;
}

// Softmax-minus-onehot, returns loss.
double CrossEntropyGrad(std::span<const double> logits, int label,
                        std::vector<double>& dlogits) {
  dlogits.assign(logits.begin(), logits.end());
  SoftmaxInPlace(dlogits);
  const double loss = CrossEntropy(logits, label);
  dlogits[label] -= 1.0;
  return loss;
}

void CheckLabel(const ModelParams& p, int label) {
  Require(label >= 0 && static_cast<size_t>(label) < p.dims.classes,
          ErrorCode::kInvalidArgument,
          "label " + std::to_string(label) + " out of range");
}

}  // namespace

std::vector<uint8_t> ValidFromIds(std::span<const TokenId> ids) {
  std::vector<uint8_t> valid(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) valid[i] = ids[i] != kPadId;
  return valid;
}

Tensor Embed(const ModelParams& params, std::span<const TokenId> ids) {
  const size_t d = params.dims.dim;
  Tensor emb = Tensor::Matrix(ids.size(), d);
  for (size_t i = 0; i < ids.size(); ++i) {
    const TokenId id = ids[i];
    Require(id >= 0 && static_cast<size_t>(id) < params.dims.vocab_size,
            ErrorCode::kInvalidArgument,
            "token id " + std::to_string(id) + " outside vocabulary");
    auto src = params.embedding.row(static_cast<size_t>(id));
    std::copy(src.begin(), src.end(), emb.row(i).begin());
  }
  return emb;
}

Tensor EncodeForward(const ModelParams& params, const Tensor& emb,
                     ValidMask valid) {
  Tensor hidden = RunEncoder(params, emb, valid, false).hidden;
  CheckFinite(hidden, "encoder forward");
  return hidden;
}

ForwardOutput ClassifierForward(const ModelParams& params, const Tensor& emb,
                                ValidMask valid) {
  const EncoderCache enc = RunEncoder(params, emb, valid, false);
  HeadCache head = HeadForward(params, enc);
  for (double x : head.logits) {
    Require(std::isfinite(x), ErrorCode::kNumerical, "numerical overflow");
  }
  return {std::move(head.logits), std::move(head.pooled)};
}

double CrossEntropy(std::span<const double> logits, int label) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : logits) mx = std::max(mx, x);
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - mx);
  return std::log(sum) + mx - logits[label];
}

GradResult LossAndGrad(const ModelParams& params, const Tensor& emb, int label,
                       Objective objective,
                       std::optional<std::span<const double>> ref_sentence_emb,
                       double lambda_sem, ValidMask valid) {
  CheckLabel(params, label);
  if (objective == Objective::kClsPlusSim) {
    Require(ref_sentence_emb.has_value() && lambda_sem >= 0.0,
            ErrorCode::kInvalidArgument,
            "cls_plus_sim needs a reference embedding and lambda_sem >= 0");
  }
  const EncoderCache enc = RunEncoder(params, emb, valid, true);
  const HeadCache head = HeadForward(params, enc);
  std::vector<double> dlogits;
  double loss = CrossEntropyGrad(head.logits, label, dlogits);
  std::vector<double> dpooled = HeadBackward(params, head, dlogits, nullptr);

  if (objective == Objective::kClsPlusSim && lambda_sem != 0.0) {
    const auto& ref = *ref_sentence_emb;
    Require(ref.size() == head.pooled.size(), ErrorCode::kShapeMismatch,
            "reference sentence embedding has wrong dimension");
    const double np = Norm2(head.pooled);
    const double nr = Norm2(ref);
    Require(np > 0.0 && nr > 0.0, ErrorCode::kNumerical,
            "degenerate representation");
    const double cos = Dot(head.pooled, ref) / (np * nr);
    loss -= lambda_sem * (1.0 - cos);
    for (size_t j = 0; j < dpooled.size(); ++j) {
      const double dcos = ref[j] / (np * nr) - cos * head.pooled[j] / (np * np);
      dpooled[j] += lambda_sem * dcos;
    }
  }
  Require(std::isfinite(loss), ErrorCode::kNumerical, "numerical overflow");

  GradResult out;
  out.loss = loss;
  out.grad_embeddings =
      BackwardEncoder(params, enc, SpreadPooledGrad(dpooled, enc), nullptr);
  CheckFinite(out.grad_embeddings, "loss gradient");
  out.forward_count = 1;
  out.logits = head.logits;
  out.pooled = head.pooled;
  return out;
}

double ClassifierLossAndParamGrads(const ModelParams& params,
                                   std::span<const TokenId> ids, int label,
                                   double weight, ModelParams& grads) {
  CheckLabel(params, label);
  const Tensor emb = Embed(params, ids);
  const std::vector<uint8_t> valid = ValidFromIds(ids);
  const EncoderCache enc = RunEncoder(params, emb, valid, true);
  const HeadCache head = HeadForward(params, enc);
  std::vector<double> dlogits;
  const double loss = CrossEntropyGrad(head.logits, label, dlogits);
  Require(std::isfinite(loss), ErrorCode::kNumerical, "numerical overflow");
  for (double& g : dlogits) g *= weight;
  const std::vector<double> dpooled = HeadBackward(params, head, dlogits, &grads);
  const Tensor demb =
      BackwardEncoder(params, enc, SpreadPooledGrad(dpooled, enc), &grads);
  for (size_t i = 0; i < ids.size(); ++i) {
    auto gi = grads.embedding.row(static_cast<size_t>(ids[i]));
    auto di = demb.row(i);
    for (size_t j = 0; j < gi.size(); ++j) gi[j] += di[j];
  }
  return loss;
}

double MlmLossAndParamGrads(const ModelParams& params,
                            std::span<const TokenId> ids,
                            std::span<const MlmTarget> targets, double weight,
                            ModelParams& grads) {
  Require(params.has_mlm_head(), ErrorCode::kInvalidArgument,
          "masked-LM objective requires the transformer architecture");
  Require(!targets.empty(), ErrorCode::kInvalidArgument, "no MLM targets");
  const size_t v = params.dims.vocab_size, d = params.dims.dim;
  const Tensor emb = Embed(params, ids);
  const std::vector<uint8_t> valid = ValidFromIds(ids);
  const EncoderCache enc = RunEncoder(params, emb, valid, true);
  Tensor dh = Tensor::Matrix(ids.size(), d);
  const double per = weight / static_cast<double>(targets.size());
  double loss = 0.0;
  std::vector<double> logits(v), dlogits;
  for (const MlmTarget& t : targets) {
    Require(t.pos > 0 && t.pos < ids.size(), ErrorCode::kInvalidArgument,
            "MLM target position out of range");
    auto h = enc.hidden.row(t.pos);
    for (size_t w = 0; w < v; ++w) {
      logits[w] = Dot(params.embedding.row(w), h) + params.mlm_bias[w];
    }
    loss += CrossEntropyGrad(logits, t.token, dlogits);
    auto dht = dh.row(t.pos);
    for (size_t w = 0; w < v; ++w) {
      const double g = dlogits[w] * per;
      if (g == 0.0) continue;
      grads.mlm_bias[w] += g;
      auto ew = params.embedding.row(w);
      auto gw = grads.embedding.row(w);
      for (size_t j = 0; j < d; ++j) {
        dht[j] += g * ew[j];
        gw[j] += g * h[j];
      }
    }
  }
  loss /= static_cast<double>(targets.size());
  Require(std::isfinite(loss), ErrorCode::kNumerical, "numerical overflow");
  const Tensor demb = BackwardEncoder(params, enc, std::move(dh), &grads);
  for (size_t i = 0; i < ids.size(); ++i) {
    auto gi = grads.embedding.row(static_cast<size_t>(ids[i]));
    auto di = demb.row(i);
    for (size_t j = 0; j < gi.size(); ++j) gi[j] += di[j];
  }
  return loss;
}

std::vector<double> MlmLogits(const ModelParams& params,
                              std::span<const TokenId> ids, size_t pos) {
  Require(params.has_mlm_head(), ErrorCode::kInvalidArgument,
          "model has no masked-LM head");
  const Tensor emb = Embed(params, ids);
  const std::vector<uint8_t> valid = ValidFromIds(ids);
  const Tensor hidden = EncodeForward(params, emb, valid);
  const size_t v = params.dims.vocab_size;
  std::vector<double> logits(v);
  auto h = hidden.row(pos);
  for (size_t w = 0; w < v; ++w) {
    logits[w] = Dot(params.embedding.row(w), h) + params.mlm_bias[w];
  }
  return logits;
}

}  // namespace textpgd
