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

#ifndef TEXTPGD_MODELS_CHECKPOINT_H_
#define TEXTPGD_MODELS_CHECKPOINT_H_

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "textpgd/models/params.h"
#include "textpgd/text/vocab.h"

namespace textpgd {

inline constexpr int kCheckpointVersion = 1;
inline constexpr char kManifestFile[] = "manifest.json";
inline constexpr char kParamsFile[] = "params.bin";
inline constexpr char kVocabFile[] = "vocab.json";

// Writes <dir>/manifest.json and <dir>/params.bin (little-endian float32,
// row-major, tensors packed in NamedTensors order). When vocab is given it
// is written to <dir>/vocab.json and its fingerprint recorded in the
// manifest. Creates dir if needed.
void SaveCheckpoint(const ModelParams& params, const std::string& dir,
                    const Vocab* vocab = nullptr);

// Errors: kVersionMismatch, kTruncated (params.bin shorter than the manifest
// says), kCorrupt (an entry out of bounds, overlapping, or mis-shaped; the
// message names the tensor).
ModelParams LoadCheckpoint(const std::string& dir);

// The vocabulary stored next to the checkpoint, if any.
std::optional<Vocab> LoadCheckpointVocab(const std::string& dir);

nlohmann::json ReadManifest(const std::string& dir);

}  // namespace textpgd

#endif  // TEXTPGD_MODELS_CHECKPOINT_H_
