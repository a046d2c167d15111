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

#include "textpgd/models/training.h"

#include <cmath>
#include <numeric>
#include <set>

#include "textpgd/models/model.h"
#include "textpgd/num/adam.h"
#include "textpgd/num/network.h"
#include "textpgd/util/error.h"

namespace textpgd {

ModelDims TrainHyper::Dims(size_t vocab_size, size_t classes) const {
  ModelDims d;
  d.vocab_size = vocab_size;
  d.dim = dim;
  d.max_len = max_len;
  d.layers = arch == Arch::kTransformer ? layers : 0;
  d.classes = classes;
  d.hidden = hidden;
  return d;
}

nlohmann::json ToJson(const TrainHyper& h) {
  return nlohmann::json{{"arch", std::string(ArchName(h.arch))},
                        {"lr", h.lr},
                        {"epochs", h.epochs},
                        {"batch", h.batch},
                        {"seed", h.seed},
                        {"dim", h.dim},
                        {"layers", h.layers},
                        {"hidden", h.hidden},
                        {"max_len", h.max_len},
                        {"mask_rate", h.mask_rate}};
}

TrainHyper TrainHyperFromJson(const nlohmann::json& j, TrainHyper base) {
  Require(j.is_object(), ErrorCode::kDataFormat, "training config must be an object");
  static const std::set<std::string> kKnown = {
      "arch", "lr", "epochs", "batch", "seed", "dim",
      "layers", "hidden", "max_len", "mask_rate"};
  for (const auto& [key, value] : j.items()) {
    Require(kKnown.count(key) > 0, ErrorCode::kDataFormat,
            "unknown training config key '" + key + "'");
  }
  try {
    if (j.contains("arch")) base.arch = ParseArch(j["arch"].get<std::string>());
    if (j.contains("lr")) base.lr = j["lr"].get<double>();
    if (j.contains("epochs")) base.epochs = j["epochs"].get<int>();
    if (j.contains("batch")) base.batch = j["batch"].get<int>();
    if (j.contains("seed")) base.seed = j["seed"].get<uint64_t>();
    if (j.contains("dim")) base.dim = j["dim"].get<size_t>();
    if (j.contains("layers")) base.layers = j["layers"].get<size_t>();
    if (j.contains("hidden")) base.hidden = j["hidden"].get<size_t>();
    if (j.contains("max_len")) base.max_len = j["max_len"].get<size_t>();
    if (j.contains("mask_rate")) base.mask_rate = j["mask_rate"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, std::string("training config: ") + e.what());
  }
  Require(base.lr > 0 && base.epochs >= 0 && base.batch >= 1 && base.dim >= 1 &&
              base.hidden >= 1 && base.max_len >= 1 && base.mask_rate > 0 &&
              base.mask_rate <= 1,
          ErrorCode::kInvalidArgument, "training config value out of range");
  return base;
}

nlohmann::json ToJson(const std::vector<EpochLog>& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : log) {
    arr.push_back({{"epoch", e.epoch},
                   {"loss", e.loss},
                   {"train_accuracy", e.train_accuracy}});
  }
  return arr;
}

namespace {

void ZeroGrads(ModelParams& grads) {
  for (auto& [name, t] : NamedTensors(grads)) t->Fill(0.0);
}

std::vector<size_t> EpochOrder(size_t n, const CounterRng& rng, int epoch) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  CounterRng e = rng.Split(static_cast<uint64_t>(epoch));
  e.Shuffle(order);
  return order;
}

}  // namespace

double ClassifierAccuracy(const ModelParams& params, const Vocab& vocab,
                          const Dataset& data) {
  Require(!data.empty(), ErrorCode::kInvalidArgument, "empty dataset");
  size_t correct = 0;
  for (const auto& ex : data) {
    const TokenSeq seq = Tokenize(vocab, ex.text, params.dims.max_len);
    if (Predict(params, seq.ids) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult TrainClassifier(const Dataset& data, const Vocab& vocab,
                            const TrainHyper& hyper) {
  Require(!data.empty(), ErrorCode::kInvalidArgument, "empty dataset");
  std::set<int> labels;
  int max_label = 0;
  for (const auto& ex : data) {
    labels.insert(ex.label);
    max_label = std::max(max_label, ex.label);
  }
  Require(labels.size() >= 2, ErrorCode::kInvalidArgument,
          "training data contains a single class");
  const size_t classes = std::max<size_t>(2, static_cast<size_t>(max_label) + 1);
  const CounterRng root = CounterRng(hyper.seed).Split("train/classifier");

  TrainResult out;
  out.params = InitParams(hyper.arch, hyper.Dims(vocab.size(), classes),
                          root.Split("init"));
  ModelParams grads = ZeroParams(out.params.arch, out.params.dims);
  AdamState adam = MakeAdamState(out.params);
  const AdamOptions opt{.lr = hyper.lr};

  std::vector<TokenSeq> seqs;
  seqs.reserve(data.size());
  for (const auto& ex : data) {
    seqs.push_back(Tokenize(vocab, ex.text, hyper.max_len));
  }
  const CounterRng order_rng = root.Split("order");
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const auto order = EpochOrder(data.size(), order_rng, epoch);
    double loss_sum = 0.0;
    for (size_t start = 0; start < order.size(); start += hyper.batch) {
      const size_t end = std::min(order.size(), start + hyper.batch);
      const double weight = 1.0 / static_cast<double>(end - start);
      ZeroGrads(grads);
      for (size_t b = start; b < end; ++b) {
        const size_t i = order[b];
        loss_sum += ClassifierLossAndParamGrads(out.params, seqs[i].ids,
                                                data[i].label, weight, grads);
      }
      AdamStep(out.params, grads, adam, opt);
    }
    EpochLog entry;
    entry.epoch = epoch + 1;
    entry.loss = loss_sum / static_cast<double>(data.size());
    entry.train_accuracy = ClassifierAccuracy(out.params, vocab, data);
    out.log.push_back(entry);
  }
  return out;
}

std::vector<size_t> ChooseMaskPositions(const TokenSeq& seq, double rate,
                                        CounterRng& rng) {
  std::vector<size_t> content;
  for (size_t i = 1; i < seq.size(); ++i) {
    if (!IsSpecial(seq.ids[i])) content.push_back(i);
  }
  if (content.empty()) return {};
  const size_t k = std::max<size_t>(
      1, static_cast<size_t>(std::lround(rate * static_cast<double>(content.size()))));
  rng.Shuffle(content);
  content.resize(std::min(k, content.size()));
  std::sort(content.begin(), content.end());
  return content;
}

TrainResult TrainMlm(const std::vector<std::string>& corpus, const Vocab& vocab,
                     const TrainHyper& hyper) {
  Require(!corpus.empty(), ErrorCode::kInvalidArgument, "empty corpus");
  Require(hyper.arch == Arch::kTransformer, ErrorCode::kInvalidArgument,
          "masked-LM training requires the transformer architecture");
  const CounterRng root = CounterRng(hyper.seed).Split("train/mlm");
  TrainResult out;
  out.params = InitParams(Arch::kTransformer, hyper.Dims(vocab.size(), 2),
                          root.Split("init"));
  ModelParams grads = ZeroParams(out.params.arch, out.params.dims);
  AdamState adam = MakeAdamState(out.params);
  const AdamOptions opt{.lr = hyper.lr};

  std::vector<TokenSeq> seqs;
  for (const auto& text : corpus) {
    TokenSeq s = Tokenize(vocab, text, hyper.max_len);
    seqs.push_back(std::move(s));
  }
  const CounterRng order_rng = root.Split("order");
  const CounterRng mask_rng = root.Split("mask");
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const auto order = EpochOrder(seqs.size(), order_rng, epoch);
    const CounterRng epoch_mask = mask_rng.Split(static_cast<uint64_t>(epoch));
    double loss_sum = 0.0;
    size_t n_targets = 0, n_correct = 0, n_loss = 0;
    for (size_t start = 0; start < order.size(); start += hyper.batch) {
      const size_t end = std::min(order.size(), start + hyper.batch);
      const double weight = 1.0 / static_cast<double>(end - start);
      ZeroGrads(grads);
      bool any = false;
      for (size_t b = start; b < end; ++b) {
        const size_t i = order[b];
        CounterRng r = epoch_mask.Split(static_cast<uint64_t>(i));
        const auto positions = ChooseMaskPositions(seqs[i], hyper.mask_rate, r);
        if (positions.empty()) continue;
        std::vector<TokenId> ids = seqs[i].ids;
        std::vector<MlmTarget> targets;
        for (size_t pos : positions) {
          targets.push_back({pos, ids[pos]});
          ids[pos] = kMaskId;
        }
        loss_sum += MlmLossAndParamGrads(out.params, ids, targets, weight, grads);
        ++n_loss;
        any = true;
      }
      if (any) AdamStep(out.params, grads, adam, opt);
    }
    // Recovery accuracy after the epoch, on a fixed probe subset.
    const size_t probe = std::min<size_t>(seqs.size(), 400);
    for (size_t i = 0; i < probe; ++i) {
      CounterRng r = mask_rng.Split("probe").Split(static_cast<uint64_t>(i));
      for (size_t pos : ChooseMaskPositions(seqs[i], hyper.mask_rate, r)) {
        const auto probs = MlmPredict(out.params, seqs[i], pos);
        ++n_targets;
        if (Argmax(probs) == seqs[i].ids[pos]) ++n_correct;
      }
    }
    EpochLog entry;
    entry.epoch = epoch + 1;
    entry.loss = n_loss ? loss_sum / static_cast<double>(n_loss) : 0.0;
    entry.train_accuracy =
        n_targets ? static_cast<double>(n_correct) / static_cast<double>(n_targets)
                  : 0.0;
    out.log.push_back(entry);
  }
  return out;
}

double MlmTop1Accuracy(const ModelParams& params, const Vocab& vocab,
                       const std::vector<std::string>& corpus, uint64_t seed) {
  Require(!corpus.empty(), ErrorCode::kInvalidArgument, "empty corpus");
  const CounterRng root = CounterRng(seed).Split("eval/mlm");
  size_t total = 0, correct = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const TokenSeq seq = Tokenize(vocab, corpus[i], params.dims.max_len);
    CounterRng r = root.Split(static_cast<uint64_t>(i));
    const auto positions = ChooseMaskPositions(seq, 1e-9, r);
    if (positions.empty()) continue;
    const size_t pos = positions.front();
    ++total;
    if (Argmax(MlmPredict(params, seq, pos)) == seq.ids[pos]) ++correct;
  }
  Require(total > 0, ErrorCode::kInvalidArgument, "no maskable positions");
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace textpgd
