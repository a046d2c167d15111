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

#ifndef TEXTPGD_TEXT_CORPUS_H_
#define TEXTPGD_TEXT_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "textpgd/text/dataset.h"

namespace textpgd {

enum class CorpusTask { kSentiment };

struct CorpusSplit {
  Dataset train;
  Dataset test;
};

// Lexicons behind the synthetic sentiment task. Exposed for tests.
const std::vector<std::string>& PositiveWords();
const std::vector<std::string>& NegativeWords();
const std::vector<std::string>& CorpusTemplates();

// Template-generated two-class sentiment text. Label 1 = positive.
// test gets size/5 examples and train the rest; each split is label-balanced
// within one example. A pure function of (seed, size, task).
CorpusSplit MakeCorpus(uint64_t seed, size_t size,
                       CorpusTask task = CorpusTask::kSentiment);

}  // namespace textpgd

#endif  // TEXTPGD_TEXT_CORPUS_H_
