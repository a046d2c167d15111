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

#ifndef TEXTPGD_ATTACK_RESULT_H_
#define TEXTPGD_ATTACK_RESULT_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textpgd/text/vocab.h"

namespace textpgd {

struct AttackResult {
  TokenSeq original;
  TokenSeq adversarial;
  std::vector<bool> attackable;
  int true_label = 0;
  int predicted_label = 0;
  bool success = false;
  bool skipped = false;  // victim already wrong on the clean input
  int64_t queries = 0;
  int iterations = 0;
  double perturb_pct = 0.0;
  double similarity = 1.0;
};

// One JSONL line of a results file. Token sequences are stored as
// {"ids": [...], "words": [...]}.
nlohmann::json ToJson(const AttackResult& r);
AttackResult AttackResultFromJson(const nlohmann::json& j);

void SaveResults(const std::vector<AttackResult>& results, const std::string& path);
std::vector<AttackResult> LoadResults(const std::string& path);

// Lists every violated type invariant; empty when the result is consistent.
std::vector<std::string> ContractViolations(const AttackResult& r, double sim_min);

}  // namespace textpgd

#endif  // TEXTPGD_ATTACK_RESULT_H_
