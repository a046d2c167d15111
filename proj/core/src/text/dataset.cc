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

#include "textpgd/text/dataset.h"

#include <fstream>

#include <nlohmann/json.hpp>

#include "textpgd/util/error.h"

namespace textpgd {

namespace {

LabeledExample ParseLine(const std::string& line, size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, where + "invalid JSON (" + e.what() + ")");
  }
  Require(j.is_object(), ErrorCode::kDataFormat, where + "expected an object");
  Require(j.contains("text") && j["text"].is_string(), ErrorCode::kDataFormat,
          where + "missing string field 'text'");
  Require(j.contains("label") && j["label"].is_number_integer(),
          ErrorCode::kDataFormat, where + "missing integer field 'label'");
  LabeledExample ex;
  ex.text = j["text"].get<std::string>();
  const auto label = j["label"].get<int64_t>();
  Require(label >= 0, ErrorCode::kDataFormat, where + "label must be >= 0");
  ex.label = static_cast<int>(label);
  if (j.contains("attackable") && !j["attackable"].is_null()) {
    const auto& mask = j["attackable"];
    Require(mask.is_array(), ErrorCode::kDataFormat,
            where + "'attackable' must be an array of booleans");
    std::vector<bool> bits;
    for (const auto& b : mask) {
      Require(b.is_boolean(), ErrorCode::kDataFormat,
              where + "'attackable' must be an array of booleans");
      bits.push_back(b.get<bool>());
    }
    Require(bits.empty() || !bits[0], ErrorCode::kDataFormat,
            where + "'attackable' must be false at position 0 (CLS)");
    ex.attackable = std::move(bits);
  }
  return ex;
}

}  // namespace

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  Dataset out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ParseLine(line, line_no));
  }
  return out;
}

void SaveDataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  Require(out.good(), ErrorCode::kIo, "cannot write " + path);
  for (const auto& ex : data) {
    nlohmann::json j{{"text", ex.text}, {"label", ex.label}};
    if (ex.attackable) j["attackable"] = *ex.attackable;
    out << j.dump() << "\n";
  }
  Require(out.good(), ErrorCode::kIo, "write failed: " + path);
}

std::vector<std::string> Texts(const Dataset& data) {
  std::vector<std::string> texts;
  texts.reserve(data.size());
  for (const auto& ex : data) texts.push_back(ex.text);
  return texts;
}

std::vector<bool> AttackableMask(const TokenSeq& seq,
                                 const std::optional<std::vector<bool>>& mask) {
  if (mask) {
    Require(mask->size() == seq.size(), ErrorCode::kDataFormat,
            "attackable mask has " + std::to_string(mask->size()) +
                " entries for " + std::to_string(seq.size()) + " tokens");
  }
  std::vector<bool> out(seq.size(), false);
  for (size_t i = 1; i < seq.size(); ++i) {
    out[i] = seq.ids[i] != kUnkId && !IsSpecial(seq.ids[i]) &&
             (!mask || (*mask)[i]);
  }
  return out;
}

}  // namespace textpgd
