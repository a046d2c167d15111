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

#ifndef TEXTPGD_TEXT_DATASET_H_
#define TEXTPGD_TEXT_DATASET_H_

#include <optional>
#include <string>
#include <vector>

#include "textpgd/text/vocab.h"

namespace textpgd {

struct LabeledExample {
  std::string text;
  int label = 0;
  // Per token position, CLS included. Position 0 must be false.
  std::optional<std::vector<bool>> attackable;
};

using Dataset = std::vector<LabeledExample>;

// Reads JSONL: one {"text": str, "label": int, "attackable": [bool]?} per
// line. Blank lines are ignored; errors name the 1-based line number.
Dataset LoadDataset(const std::string& path);

// Writes JSONL with sorted keys, one example per line.
void SaveDataset(const Dataset& data, const std::string& path);

std::vector<std::string> Texts(const Dataset& data);

// Positions an attack may change: 1..n-1, minus UNK positions, intersected
// with the example's own mask when present. Throws when the mask length does
// not match the token count.
std::vector<bool> AttackableMask(const TokenSeq& seq,
                                 const std::optional<std::vector<bool>>& mask);

}  // namespace textpgd

#endif  // TEXTPGD_TEXT_DATASET_H_
