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

#include "textpgd/models/params.h"

#include <cmath>

#include "textpgd/util/error.h"

namespace textpgd {

std::string_view ArchName(Arch arch) {
  return arch == Arch::kTransformer ? "transformer" : "avg_mlp";
}

Arch ParseArch(std::string_view name) {
  if (name == "transformer") return Arch::kTransformer;
  if (name == "avg_mlp") return Arch::kAvgMlp;
  Fail(ErrorCode::kInvalidArgument, "unknown arch '" + std::string(name) + "'");
}

ModelParams ZeroParams(Arch arch, const ModelDims& dims) {
  Require(dims.vocab_size >= 4 && dims.dim > 0 &&
              dims.classes >= 2 && dims.hidden > 0 && dims.max_len > 0,
          ErrorCode::kInvalidArgument, "invalid model dims");
  const size_t v = dims.vocab_size, d = dims.dim, h = dims.hidden;
  ModelParams p;
  p.arch = arch;
  p.dims = dims;
  p.embedding = Tensor::Matrix(v, d);
  if (arch == Arch::kTransformer) {
    p.positional = Tensor::Matrix(dims.max_len, d);
    p.layers.resize(dims.layers);
    for (auto& l : p.layers) {
      l.wq = Tensor::Matrix(d, d);
      l.wk = Tensor::Matrix(d, d);
      l.wv = Tensor::Matrix(d, d);
      l.wo = Tensor::Matrix(d, d);
      l.ln1_gain = Tensor::Vector(d);
      l.ln1_bias = Tensor::Vector(d);
      l.ff_w1 = Tensor::Matrix(d, h);
      l.ff_b1 = Tensor::Vector(h);
      l.ff_w2 = Tensor::Matrix(h, d);
      l.ff_b2 = Tensor::Vector(d);
      l.ln2_gain = Tensor::Vector(d);
      l.ln2_bias = Tensor::Vector(d);
    }
    p.cls_w = Tensor::Matrix(d, dims.classes);
    p.mlm_bias = Tensor::Vector(v);
  } else {
    p.mlp_w = Tensor::Matrix(d, h);
    p.mlp_b = Tensor::Vector(h);
    p.cls_w = Tensor::Matrix(h, dims.classes);
  }
  p.cls_b = Tensor::Vector(dims.classes);
  return p;
}

ModelParams InitParams(Arch arch, const ModelDims& dims, CounterRng rng) {
  ModelParams p = ZeroParams(arch, dims);
  for (auto& [name, t] : NamedTensors(p)) {
    CounterRng stream = rng.Split(name);
    const bool is_gain = name.find("_gain") != std::string::npos;
    const bool is_bias = !is_gain && (name.find("_b") != std::string::npos ||
                                      name.find("bias") != std::string::npos);
    if (is_gain) {
      t->Fill(1.0);
    } else if (is_bias) {
      t->Fill(0.0);
    } else {
      double scale = 1.0;
      if (name != "embedding" && name != "positional") {
        scale = 1.0 / std::sqrt(static_cast<double>(t->rows()));
      }
      for (double& x : t->data()) x = scale * stream.Normal();
    }
  }
  return p;
}

namespace {

template <typename P, typename T>
std::vector<std::pair<std::string, T*>> Named(P& p) {
  std::vector<std::pair<std::string, T*>> out;
  out.emplace_back("embedding", &p.embedding);
  if (p.arch == Arch::kTransformer) {
    out.emplace_back("positional", &p.positional);
    for (size_t i = 0; i < p.layers.size(); ++i) {
      auto& l = p.layers[i];
      const std::string pre = "layer" + std::to_string(i) + ".";
      out.emplace_back(pre + "wq", &l.wq);
      out.emplace_back(pre + "wk", &l.wk);
      out.emplace_back(pre + "wv", &l.wv);
      out.emplace_back(pre + "wo", &l.wo);
      out.emplace_back(pre + "ln1_gain", &l.ln1_gain);
      out.emplace_back(pre + "ln1_bias", &l.ln1_bias);
      out.emplace_back(pre + "ff_w1", &l.ff_w1);
      out.emplace_back(pre + "ff_b1", &l.ff_b1);
      out.emplace_back(pre + "ff_w2", &l.ff_w2);
      out.emplace_back(pre + "ff_b2", &l.ff_b2);
      out.emplace_back(pre + "ln2_gain", &l.ln2_gain);
      out.emplace_back(pre + "ln2_bias", &l.ln2_bias);
    }
  } else {
    out.emplace_back("mlp_w", &p.mlp_w);
    out.emplace_back("mlp_b", &p.mlp_b);
  }
  out.emplace_back("cls_w", &p.cls_w);
  out.emplace_back("cls_b", &p.cls_b);
  if (p.arch == Arch::kTransformer) out.emplace_back("mlm_bias", &p.mlm_bias);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> NamedTensors(ModelParams& p) {
  return Named<ModelParams, Tensor>(p);
}

std::vector<std::pair<std::string, const Tensor*>> NamedTensors(
    const ModelParams& p) {
  return Named<const ModelParams, const Tensor>(p);
}

void ValidateParams(const ModelParams& p) {
  Require(p.layers.size() == (p.arch == Arch::kTransformer ? p.dims.layers : 0),
          ErrorCode::kShapeMismatch, "layer count does not match dims");
  const ModelParams ref = ZeroParams(p.arch, p.dims);
  const auto expected = NamedTensors(ref);
  const auto actual = NamedTensors(p);
  Require(expected.size() == actual.size(), ErrorCode::kShapeMismatch,
          "parameter set does not match arch");
  for (size_t i = 0; i < expected.size(); ++i) {
    Require(expected[i].second->shape() == actual[i].second->shape(),
            ErrorCode::kShapeMismatch,
            "tensor '" + actual[i].first + "' has shape " +
                ShapeString(actual[i].second->shape()) + ", expected " +
                ShapeString(expected[i].second->shape()));
  }
}

size_t ParameterCount(const ModelParams& p) {
  size_t n = 0;
  for (const auto& [name, t] : NamedTensors(p)) n += t->size();
  return n;
}

}  // namespace textpgd
