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

#include "textpgd/models/checkpoint.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>

#include "textpgd/util/error.h"

namespace textpgd {

namespace fs = std::filesystem;

namespace {

std::string HexU64(uint64_t v) {
  static const char* kDigits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = kDigits[v & 0xf];
    v >>= 4;
  }
  return s;
}

void PutF32(std::string& buf, double value) {
  const uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>(value));
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double GetF32(const std::string& buf, size_t offset) {
  uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<uint32_t>(static_cast<unsigned char>(buf[offset + i])) << (8 * i);
  }
  return static_cast<double>(std::bit_cast<float>(bits));
}

nlohmann::json DimsJson(const ModelDims& d) {
  return {{"vocab_size", d.vocab_size}, {"dim", d.dim},
          {"max_len", d.max_len},       {"layers", d.layers},
          {"classes", d.classes},       {"hidden", d.hidden}};
}

ModelDims DimsFromJson(const nlohmann::json& j) {
  ModelDims d;
  d.vocab_size = j.at("vocab_size").get<size_t>();
  d.dim = j.at("dim").get<size_t>();
  d.max_len = j.at("max_len").get<size_t>();
  d.layers = j.at("layers").get<size_t>();
  d.classes = j.at("classes").get<size_t>();
  d.hidden = j.at("hidden").get<size_t>();
  return d;
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  Require(out.good(), ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Require(out.good(), ErrorCode::kIo, "write failed: " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void SaveCheckpoint(const ModelParams& params, const std::string& dir,
                    const Vocab* vocab) {
  ValidateParams(params);
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec, ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());

  std::string buffer;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, t] : NamedTensors(params)) {
    CheckFinite(*t, name.c_str());
    const size_t offset = buffer.size();
    for (double x : t->data()) PutF32(buffer, x);
    entries.push_back({{"name", name},
                       {"shape", t->shape()},
                       {"offset", offset},
                       {"nbytes", buffer.size() - offset}});
  }
  nlohmann::json manifest{{"version", kCheckpointVersion},
                          {"arch", std::string(ArchName(params.arch))},
                          {"dims", DimsJson(params.dims)},
                          {"dtype", "float32"},
                          {"byte_order", "little"},
                          {"buffer_bytes", buffer.size()},
                          {"tensors", entries}};
  if (vocab) {
    Require(vocab->size() == params.dims.vocab_size, ErrorCode::kVocabMismatch,
            "vocab size does not match model");
    manifest["vocab_fingerprint"] = HexU64(vocab->Fingerprint());
    vocab->Save((fs::path(dir) / kVocabFile).string());
  }
  WriteFile(fs::path(dir) / kParamsFile, buffer);
  WriteFile(fs::path(dir) / kManifestFile, manifest.dump(2) + "\n");
}

nlohmann::json ReadManifest(const std::string& dir) {
  const std::string text = ReadFile(fs::path(dir) / kManifestFile);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, dir + "/manifest.json: " + e.what());
  }
}

ModelParams LoadCheckpoint(const std::string& dir) {
  const nlohmann::json manifest = ReadManifest(dir);
  Require(manifest.contains("version") && manifest["version"].is_number_integer(),
          ErrorCode::kDataFormat, "manifest has no integer 'version'");
  const int version = manifest["version"].get<int>();
  Require(version == kCheckpointVersion, ErrorCode::kVersionMismatch,
          "checkpoint version " + std::to_string(version) + " is not supported (expected " +
              std::to_string(kCheckpointVersion) + ")");

  ModelParams params;
  size_t buffer_bytes = 0;
  nlohmann::json entries;
  try {
    params = ZeroParams(ParseArch(manifest.at("arch").get<std::string>()),
                        DimsFromJson(manifest.at("dims")));
    buffer_bytes = manifest.at("buffer_bytes").get<size_t>();
    entries = manifest.at("tensors");
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, std::string("manifest: ") + e.what());
  }

  const std::string buffer = ReadFile(fs::path(dir) / kParamsFile);
  Require(buffer.size() >= buffer_bytes, ErrorCode::kTruncated,
          "params.bin is truncated: " + std::to_string(buffer.size()) + " of " +
              std::to_string(buffer_bytes) + " bytes");
  Require(buffer.size() == buffer_bytes, ErrorCode::kCorrupt,
          "params.bin size does not match manifest buffer_bytes");

  std::map<std::string, Tensor*> slots;
  for (auto& [name, t] : NamedTensors(params)) slots[name] = t;
  Require(entries.is_array() && entries.size() == slots.size(), ErrorCode::kCorrupt,
          "manifest tensor index does not match the architecture");

  std::vector<std::pair<size_t, size_t>> ranges;
  for (const auto& e : entries) {
    std::string name;
    size_t offset = 0, nbytes = 0;
    std::vector<size_t> shape;
    try {
      name = e.at("name").get<std::string>();
      offset = e.at("offset").get<size_t>();
      nbytes = e.at("nbytes").get<size_t>();
      shape = e.at("shape").get<std::vector<size_t>>();
    } catch (const nlohmann::json::exception& ex) {
      Fail(ErrorCode::kCorrupt, std::string("manifest tensor entry: ") + ex.what());
    }
    auto it = slots.find(name);
    Require(it != slots.end(), ErrorCode::kCorrupt,
            "manifest names unknown tensor '" + name + "'");
    Tensor& t = *it->second;
    Require(shape == t.shape(), ErrorCode::kCorrupt,
            "tensor '" + name + "' has shape " + ShapeString(shape) + ", expected " +
                ShapeString(t.shape()));
    Require(nbytes == 4 * t.size(), ErrorCode::kCorrupt,
            "tensor '" + name + "' byte size does not match its shape");
    Require(offset % 4 == 0 && offset <= buffer.size() &&
                nbytes <= buffer.size() - offset,
            ErrorCode::kCorrupt,
            "tensor '" + name + "' lies outside params.bin (offset " +
                std::to_string(offset) + ")");
    for (size_t i = 0; i < t.size(); ++i) t[i] = GetF32(buffer, offset + 4 * i);
    ranges.emplace_back(offset, offset + nbytes);
    slots.erase(it);
    // Overlap detection below needs the name of the offending tensor, so
    // check against previously accepted ranges right away.
    for (size_t k = 0; k + 1 < ranges.size(); ++k) {
      const auto& r = ranges[k];
      Require(ranges.back().second <= r.first || r.second <= ranges.back().first ||
                  nbytes == 0,
              ErrorCode::kCorrupt,
              "tensor '" + name + "' overlaps another tensor in params.bin");
    }
  }
  for (const auto& [name, t] : NamedTensors(params)) {
    Require(t->AllFinite(), ErrorCode::kCorrupt,
            "tensor '" + name + "' contains non-finite values");
  }
  return params;
}

std::optional<Vocab> LoadCheckpointVocab(const std::string& dir) {
  const fs::path path = fs::path(dir) / kVocabFile;
  if (!fs::exists(path)) return std::nullopt;
  Vocab vocab = Vocab::Load(path.string());
  const nlohmann::json manifest = ReadManifest(dir);
  if (manifest.contains("vocab_fingerprint")) {
    Require(manifest["vocab_fingerprint"] == HexU64(vocab.Fingerprint()),
            ErrorCode::kVocabMismatch,
            dir + ": vocab.json does not match the checkpoint fingerprint");
  }
  return vocab;
}

}  // namespace textpgd
