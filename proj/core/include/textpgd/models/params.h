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

#ifndef TEXTPGD_MODELS_PARAMS_H_
#define TEXTPGD_MODELS_PARAMS_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textpgd/num/tensor.h"
#include "textpgd/util/rng.h"

namespace textpgd {

enum class Arch {
  kTransformer,  // single-head post-LN encoder, tied masked-LM head
  kAvgMlp,       // mean of embeddings -> ReLU layer -> logits
};

std::string_view ArchName(Arch arch);
Arch ParseArch(std::string_view name);

struct ModelDims {
  size_t vocab_size = 0;
  size_t dim = 32;
  size_t max_len = 64;
  size_t layers = 2;
  size_t classes = 2;
  size_t hidden = 64;  // feed-forward width (transformer) or MLP width

  bool operator==(const ModelDims&) const = default;
};

struct LayerParams {
  Tensor wq, wk, wv, wo;           // [d x d]
  Tensor ln1_gain, ln1_bias;       // [d]
  Tensor ff_w1, ff_b1;             // [d x h], [h]
  Tensor ff_w2, ff_b2;             // [h x d], [d]
  Tensor ln2_gain, ln2_bias;       // [d]
};

// Every learnable tensor of one model. Also used as the gradient container
// (same layout, zero-initialized).
struct ModelParams {
  Arch arch = Arch::kTransformer;
  ModelDims dims;

  Tensor embedding;   // [V x d]
  Tensor positional;  // [L x d], transformer only
  std::vector<LayerParams> layers;
  Tensor mlp_w, mlp_b;  // [d x h], [h], avg_mlp only
  Tensor cls_w, cls_b;  // [d x C] (transformer) or [h x C] (avg_mlp), [C]
  Tensor mlm_bias;      // [V], transformer only; logits = E h + mlm_bias

  bool has_mlm_head() const { return arch == Arch::kTransformer; }
};

// Zero-valued parameters with the layout implied by (arch, dims).
ModelParams ZeroParams(Arch arch, const ModelDims& dims);

// Random initialization: embeddings N(0, 1), weight matrices
// N(0, 1/fan_in), layernorm gains 1, biases 0.
ModelParams InitParams(Arch arch, const ModelDims& dims, CounterRng rng);

// Stable, named views of every tensor, in checkpoint order.
std::vector<std::pair<std::string, Tensor*>> NamedTensors(ModelParams& p);
std::vector<std::pair<std::string, const Tensor*>> NamedTensors(
    const ModelParams& p);

// Throws kShapeMismatch if any tensor disagrees with (arch, dims).
void ValidateParams(const ModelParams& p);

size_t ParameterCount(const ModelParams& p);

}  // namespace textpgd

#endif  // TEXTPGD_MODELS_PARAMS_H_
