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

#ifndef TEXTPGD_EVAL_REPORT_H_
#define TEXTPGD_EVAL_REPORT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textpgd/attack/config.h"
#include "textpgd/attack/result.h"
#include "textpgd/models/params.h"
#include "textpgd/text/dataset.h"
#include "textpgd/text/vocab.h"

namespace textpgd {

// Corpus-level aggregates in the layout of the usual attack tables.
// Means: queries over non-skipped results; perturbation and similarity over
// successful attacks (0 when there are none).
struct EvalReport {
  std::string dataset_id;
  std::string method;
  double clean_accuracy = 0.0;
  double attacked_accuracy = 0.0;
  double perturb_pct_mean = 0.0;
  double queries_mean = 0.0;
  double similarity_mean = 0.0;
  int64_t n_examples = 0;
  int64_t n_skipped = 0;
  int64_t n_success = 0;
  nlohmann::json config = nlohmann::json::object();
  uint64_t seed = 0;
};

EvalReport MakeEvalReport(std::span<const AttackResult> results,
                          double clean_accuracy, const std::string& dataset_id,
                          const AttackConfig& config);

nlohmann::json ToJson(const EvalReport& r);
EvalReport EvalReportFromJson(const nlohmann::json& j);

struct TransferReport {
  double clean_accuracy = 0.0;     // model B on the original inputs
  double attacked_accuracy = 0.0;  // model B on adversarial inputs from A
  double perturb_pct_mean = 0.0;   // carried over from A's successful attacks
  int64_t n_examples = 0;
};

// Replays A's results on B. Accuracies are over all results; skipped and
// failed attacks replay their (unchanged) original text.
TransferReport TransferEval(std::span<const AttackResult> results_from_a,
                            const ModelParams& model_b, const Vocab& vocab_a,
                            const Vocab& vocab_b);

nlohmann::json ToJson(const TransferReport& r);

struct KStudyRow {
  double tau = 0.0;
  std::string mode;  // "fixed_k" or "threshold"
  EvalReport report;
};

// One attack run per tau with otherwise identical config and seed.
// taus must contain 0 (the fixed-K row).
std::vector<KStudyRow> KStudy(const ModelParams& victim, const ModelParams& mlm,
                              const Vocab& vocab, const Dataset& data,
                              const AttackConfig& base, std::span<const double> taus,
                              const std::string& dataset_id, size_t threads);

nlohmann::json ToJson(std::span<const KStudyRow> rows);

// Side-by-side document with per-metric deltas (a - b) and the better side
// per metric. Reports must share dataset_id and seed.
nlohmann::json CompareReports(const EvalReport& a, const EvalReport& b);

// 2-space indent, sorted keys, trailing newline.
std::string CanonicalJson(const nlohmann::json& j);
void WriteCanonicalJson(const nlohmann::json& j, const std::string& path);
nlohmann::json ReadJsonFile(const std::string& path);

}  // namespace textpgd

#endif  // TEXTPGD_EVAL_REPORT_H_
