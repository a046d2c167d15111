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

#ifndef TEXTPGD_MODELS_TRAINING_H_
#define TEXTPGD_MODELS_TRAINING_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textpgd/models/params.h"
#include "textpgd/text/dataset.h"
#include "textpgd/text/vocab.h"

namespace textpgd {

struct TrainHyper {
  Arch arch = Arch::kTransformer;
  double lr = 3e-3;
  int epochs = 6;
  int batch = 16;
  uint64_t seed = 1;
  size_t dim = 32;
  size_t layers = 2;
  size_t hidden = 64;
  size_t max_len = kDefaultMaxLen;
  double mask_rate = 0.15;  // masked-LM only

  ModelDims Dims(size_t vocab_size, size_t classes) const;
};

nlohmann::json ToJson(const TrainHyper& h);
// Missing keys keep their defaults; unknown keys are rejected.
TrainHyper TrainHyperFromJson(const nlohmann::json& j,
                              TrainHyper base = TrainHyper{});

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;  // classifier accuracy or masked-token recovery
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

nlohmann::json ToJson(const std::vector<EpochLog>& log);

// Mini-batch Adam on cross-entropy. Needs at least two distinct labels.
TrainResult TrainClassifier(const Dataset& data, const Vocab& vocab,
                            const TrainHyper& hyper);

// Masks mask_rate of the content positions (at least one, never CLS, never
// UNK) of each sentence and trains the tied-embedding masked-LM head.
TrainResult TrainMlm(const std::vector<std::string>& corpus, const Vocab& vocab,
                     const TrainHyper& hyper);

// Positions to mask for one sentence; deterministic in rng.
std::vector<size_t> ChooseMaskPositions(const TokenSeq& seq, double rate,
                                        CounterRng& rng);

// Top-1 recovery accuracy over one randomly masked position per sentence.
double MlmTop1Accuracy(const ModelParams& params, const Vocab& vocab,
                       const std::vector<std::string>& corpus, uint64_t seed);

double ClassifierAccuracy(const ModelParams& params, const Vocab& vocab,
                          const Dataset& data);

}  // namespace textpgd

#endif  // TEXTPGD_MODELS_TRAINING_H_
