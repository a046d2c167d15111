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

#include "textpgd/text/vocab.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "textpgd/util/error.h"
#include "textpgd/util/rng.h"

namespace textpgd {

namespace {

const std::vector<std::string>& SpecialTokens() {
  static const std::vector<std::string> kSpecials = {"[PAD]", "[UNK]",
                                                     "[MASK]", "[CLS]"};
  return kSpecials;
}

bool HasWhitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

}  // namespace

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  const auto& specials = SpecialTokens();
  Require(tokens_.size() >= specials.size() &&
              std::equal(specials.begin(), specials.end(), tokens_.begin()),
          ErrorCode::kDataFormat,
          "vocab must start with [PAD] [UNK] [MASK] [CLS]");
  id_of_.reserve(tokens_.size());
  for (size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& t = tokens_[i];
    Require(!t.empty() && !HasWhitespace(t), ErrorCode::kDataFormat,
            "invalid vocab token at id " + std::to_string(i));
    const bool inserted =
        id_of_.emplace(t, static_cast<TokenId>(i)).second;
    Require(inserted, ErrorCode::kDataFormat, "duplicate vocab token '" + t + "'");
  }
}

const std::string& Vocab::token(TokenId id) const {
  Require(id >= 0 && static_cast<size_t>(id) < tokens_.size(),
          ErrorCode::kInvalidArgument,
          "token id out of range: " + std::to_string(id));
  return tokens_[id];
}

TokenId Vocab::IdOf(std::string_view token) const {
  auto it = id_of_.find(std::string(token));
  return it == id_of_.end() ? kUnkId : it->second;
}

bool Vocab::Contains(std::string_view token) const {
  return id_of_.count(std::string(token)) > 0;
}

uint64_t Vocab::Fingerprint() const {
  uint64_t h = Fnv1a("textpgd-vocab");
  for (const auto& t : tokens_) {
    h = Fnv1a(t, h);
    h = Fnv1a(std::string_view("\n", 1), h);
  }
  return h;
}

nlohmann::json Vocab::ToJson() const {
  return nlohmann::json{{"version", 1}, {"tokens", tokens_}};
}

Vocab Vocab::FromJson(const nlohmann::json& j) {
  Require(j.is_object() && j.contains("version") && j.contains("tokens"),
          ErrorCode::kDataFormat, "vocab json needs 'version' and 'tokens'");
  Require(j.at("version") == 1, ErrorCode::kVersionMismatch,
          "unsupported vocab version " + j.at("version").dump());
  try {
    return Vocab(j.at("tokens").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, std::string("vocab tokens: ") + e.what());
  }
}

void Vocab::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  Require(out.good(), ErrorCode::kIo, "cannot write " + path);
  out << ToJson().dump(2) << "\n";
  Require(out.good(), ErrorCode::kIo, "write failed: " + path);
}

Vocab Vocab::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, path + ": " + e.what());
  }
  return FromJson(j);
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

Vocab BuildVocab(const std::vector<std::string>& corpus, int min_freq) {
  Require(!corpus.empty(), ErrorCode::kInvalidArgument, "empty corpus");
  Require(min_freq >= 1, ErrorCode::kInvalidArgument, "min_freq must be >= 1");
  std::map<std::string, int64_t> counts;
  for (const auto& line : corpus) {
    for (auto& w : SplitWords(line)) ++counts[std::move(w)];
  }
  std::vector<std::pair<std::string, int64_t>> kept;
  for (auto& [word, count] : counts) {
    if (count >= min_freq) kept.emplace_back(word, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens = SpecialTokens();
  for (auto& [word, count] : kept) {
    // Lowercased corpus words can never spell an upper-case special token.
    tokens.push_back(word);
  }
  return Vocab(std::move(tokens));
}

TokenSeq Tokenize(const Vocab& vocab, std::string_view text, size_t max_len) {
  Require(max_len >= 1, ErrorCode::kInvalidArgument, "max_len must be >= 1");
  TokenSeq seq;
  seq.ids.push_back(kClsId);
  seq.words.push_back(vocab.token(kClsId));
  for (auto& w : SplitWords(text)) {
    if (seq.ids.size() >= max_len) break;
    TokenId id = vocab.IdOf(w);
    // Special spellings typed by a user are treated as unknown words.
    if (IsSpecial(id)) id = kUnkId;
    seq.ids.push_back(id);
    seq.words.push_back(std::move(w));
  }
  return seq;
}

std::string Detokenize(const Vocab& vocab, const TokenSeq& seq) {
  std::ostringstream out;
  for (size_t i = 1; i < seq.size(); ++i) {
    if (i > 1) out << ' ';
    const TokenId id = seq.ids[i];
    if (id == kUnkId && i < seq.words.size()) {
      out << seq.words[i];
    } else {
      out << vocab.token(id);
    }
  }
  return out.str();
}

TokenSeq WithToken(const Vocab& vocab, const TokenSeq& seq, size_t pos,
                   TokenId id) {
  Require(pos < seq.size(), ErrorCode::kInvalidArgument,
          "position out of range");
  TokenSeq out = seq;
  out.ids[pos] = id;
  out.words[pos] = vocab.token(id);
  return out;
}

}  // namespace textpgd
