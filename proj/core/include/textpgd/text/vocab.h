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

#ifndef TEXTPGD_TEXT_VOCAB_H_
#define TEXTPGD_TEXT_VOCAB_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace textpgd {

using TokenId = int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kMaskId = 2;
inline constexpr TokenId kClsId = 3;
inline constexpr TokenId kNumSpecialTokens = 4;
inline constexpr size_t kDefaultMaxLen = 64;

inline bool IsSpecial(TokenId id) { return id >= 0 && id < kNumSpecialTokens; }

// Token inventory. Ids 0..3 are PAD, UNK, MASK, CLS; content tokens follow.
// Immutable after construction.
class Vocab {
 public:
  // Validates the special-token prefix, uniqueness and token spelling.
  explicit Vocab(std::vector<std::string> tokens);

  size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Returns kUnkId for unknown strings.
  TokenId IdOf(std::string_view token) const;
  bool Contains(std::string_view token) const;

  // Stable 64-bit digest of the token list, used to detect mismatched
  // model/vocab pairings.
  uint64_t Fingerprint() const;

  nlohmann::json ToJson() const;
  static Vocab FromJson(const nlohmann::json& j);
  void Save(const std::string& path) const;
  static Vocab Load(const std::string& path);

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> id_of_;
};

// A tokenized text. ids[0] is always CLS; words keeps the surface form per
// position so UNK positions detokenize to what the user wrote.
struct TokenSeq {
  std::vector<TokenId> ids;
  std::vector<std::string> words;

  size_t size() const { return ids.size(); }
  bool operator==(const TokenSeq& other) const { return ids == other.ids; }
};

// Lowercases ASCII letters and splits on whitespace.
std::vector<std::string> SplitWords(std::string_view text);

Vocab BuildVocab(const std::vector<std::string>& corpus, int min_freq);

TokenSeq Tokenize(const Vocab& vocab, std::string_view text,
                  size_t max_len = kDefaultMaxLen);

std::string Detokenize(const Vocab& vocab, const TokenSeq& seq);

// Copy of seq with position pos replaced by token id.
TokenSeq WithToken(const Vocab& vocab, const TokenSeq& seq, size_t pos,
                   TokenId id);

}  // namespace textpgd

#endif  // TEXTPGD_TEXT_VOCAB_H_
