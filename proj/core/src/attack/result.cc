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

#include "textpgd/attack/result.h"

#include <fstream>

#include "textpgd/util/error.h"

namespace textpgd {

namespace {

nlohmann::json SeqJson(const TokenSeq& s) {
  return {{"ids", s.ids}, {"words", s.words}};
}

TokenSeq SeqFromJson(const nlohmann::json& j) {
  TokenSeq s;
  s.ids = j.at("ids").get<std::vector<TokenId>>();
  s.words = j.at("words").get<std::vector<std::string>>();
  Require(s.ids.size() == s.words.size(), ErrorCode::kDataFormat,
          "token ids and words differ in length");
  return s;
}

}  // namespace

nlohmann::json ToJson(const AttackResult& r) {
  return nlohmann::json{{"original", SeqJson(r.original)},
                        {"adversarial", SeqJson(r.adversarial)},
                        {"attackable", r.attackable},
                        {"true_label", r.true_label},
                        {"predicted_label", r.predicted_label},
                        {"success", r.success},
                        {"skipped", r.skipped},
                        {"queries", r.queries},
                        {"iterations", r.iterations},
                        {"perturb_pct", r.perturb_pct},
                        {"similarity", r.similarity}};
}

AttackResult AttackResultFromJson(const nlohmann::json& j) {
  AttackResult r;
  try {
    r.original = SeqFromJson(j.at("original"));
    r.adversarial = SeqFromJson(j.at("adversarial"));
    r.attackable = j.at("attackable").get<std::vector<bool>>();
    r.true_label = j.at("true_label").get<int>();
    r.predicted_label = j.at("predicted_label").get<int>();
    r.success = j.at("success").get<bool>();
    r.skipped = j.at("skipped").get<bool>();
    r.queries = j.at("queries").get<int64_t>();
    r.iterations = j.at("iterations").get<int>();
    r.perturb_pct = j.at("perturb_pct").get<double>();
    r.similarity = j.at("similarity").get<double>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, std::string("attack result: ") + e.what());
  }
  return r;
}

void SaveResults(const std::vector<AttackResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  Require(out.good(), ErrorCode::kIo, "cannot write " + path);
  for (const auto& r : results) out << ToJson(r).dump() << "\n";
  Require(out.good(), ErrorCode::kIo, "write failed: " + path);
}

std::vector<AttackResult> LoadResults(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  std::vector<AttackResult> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(AttackResultFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kDataFormat,
           path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      Fail(ErrorCode::kDataFormat,
           path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> ContractViolations(const AttackResult& r, double sim_min) {
  std::vector<std::string> v;
  const bool unchanged = r.adversarial.ids == r.original.ids;
  if (r.success && r.predicted_label == r.true_label) {
    v.push_back("success without a label flip");
  }
  if (r.success && r.similarity < sim_min) {
    v.push_back("success below sim_min");
  }
  if (r.skipped && (r.queries != 1 || !unchanged)) {
    v.push_back("skipped result must have queries == 1 and adversarial == original");
  }
  if ((r.perturb_pct == 0.0) != unchanged) {
    v.push_back("perturb_pct must be 0 exactly when adversarial == original");
  }
  if (r.similarity < -1.0 || r.similarity > 1.0) {
    v.push_back("similarity outside [-1, 1]");
  }
  if (r.adversarial.size() != r.original.size()) {
    v.push_back("adversarial length differs from original");
  }
  for (size_t i = 0; i < r.original.size() && i < r.adversarial.size(); ++i) {
    const bool may_change = i < r.attackable.size() && r.attackable[i];
    if (!may_change && r.adversarial.ids[i] != r.original.ids[i]) {
      v.push_back("non-attackable position " + std::to_string(i) + " changed");
    }
  }
  return v;
}

}  // namespace textpgd
