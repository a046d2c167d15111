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

#include <filesystem>
#include <fstream>
#include <set>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "oracles/oracles.h"
#include "support/world.h"
#include "textpgd/text/corpus.h"
#include "textpgd/text/dataset.h"
#include "textpgd/text/vocab.h"
#include "textpgd/util/error.h"
#include "textpgd/util/rng.h"

namespace textpgd {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::vector<std::string> Specials() { return {"[PAD]", "[UNK]", "[MASK]", "[CLS]"}; }

template <typename F>
std::string ErrorMessage(F&& f, ErrorCode* code = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (code) *code = e.code();
    return e.what();
  }
  return "<no error>";
}

TEST(BuildVocab, FrequencyThenLexicographicOrder) {
  EXPECT_EQ(BuildVocab({"a b", "b"}, 1).tokens(),
            (std::vector<std::string>{"[PAD]", "[UNK]", "[MASK]", "[CLS]", "b", "a"}));
}

TEST(BuildVocab, MinFreqDropsRareWords) {
  EXPECT_EQ(BuildVocab({"x"}, 2).tokens(), Specials());
}

TEST(BuildVocab, EmptyCorpusIsAnError) {
  EXPECT_THAT(ErrorMessage([] { BuildVocab({}, 1); }), HasSubstr("empty corpus"));
  EXPECT_THROW(BuildVocab({"a"}, 0), Error);
}

TEST(BuildVocab, LowercasesWords) {
  const Vocab v = BuildVocab({"Good GOOD good"}, 1);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v.token(4), "good");
}

TEST(BuildVocab, MatchesFrequencyOracleOnSyntheticCorpus) {
  const CorpusSplit s = MakeCorpus(42, 2000);
  std::vector<std::string> texts = Texts(s.train);
  for (const auto& t : Texts(s.test)) texts.push_back(t);
  ASSERT_EQ(texts.size(), 2000u);
  for (int min_freq : {1, 3, 50}) {
    std::vector<std::string> expected = Specials();
    for (auto& w : oracle::FrequencyVocab(texts, min_freq)) expected.push_back(w);
    EXPECT_EQ(BuildVocab(texts, min_freq).tokens(), expected) << "min_freq " << min_freq;
  }
}

TEST(Vocab, BijectionOverAllIds) {
  const Vocab v = BuildVocab(Texts(MakeCorpus(3, 300).train), 1);
  std::set<std::string> seen;
  for (TokenId id = 0; id < static_cast<TokenId>(v.size()); ++id) {
    EXPECT_EQ(v.IdOf(v.token(id)), id);
    EXPECT_TRUE(seen.insert(v.token(id)).second);
    EXPECT_FALSE(v.token(id).empty());
    EXPECT_EQ(v.token(id).find_first_of(" \t\n"), std::string::npos);
  }
  EXPECT_EQ(v.IdOf("definitely-not-a-word"), kUnkId);
  EXPECT_FALSE(v.Contains("definitely-not-a-word"));
}

TEST(Vocab, RejectsInvalidTokenLists) {
  EXPECT_THROW(Vocab({"[UNK]", "[PAD]", "[MASK]", "[CLS]"}), Error);
  EXPECT_THROW(Vocab({"[PAD]", "[UNK]", "[MASK]"}), Error);
  for (const char* bad : {"a b", "", "a\tb"}) {
    auto tokens = Specials();
    tokens.push_back(bad);
    EXPECT_THROW(Vocab{tokens}, Error) << bad;
  }
  auto dup = Specials();
  dup.insert(dup.end(), {"a", "a"});
  EXPECT_THROW(Vocab{dup}, Error);
}

TEST(Vocab, JsonRoundTripAndVersionCheck) {
  const Vocab v = BuildVocab({"b a b"}, 1);
  const auto j = v.ToJson();
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_EQ(j.at("tokens").size(), 6u);
  EXPECT_EQ(Vocab::FromJson(j), v);
  EXPECT_EQ(Vocab::FromJson(j).Fingerprint(), v.Fingerprint());
  auto bad = j;
  bad["version"] = 2;
  EXPECT_THROW(Vocab::FromJson(bad), Error);
  const auto path = testing::TempDir("vocab") / "vocab.json";
  v.Save(path.string());
  EXPECT_EQ(Vocab::Load(path.string()), v);
}

TEST(Vocab, FingerprintDistinguishesVocabs) {
  EXPECT_NE(BuildVocab({"a b"}, 1).Fingerprint(), BuildVocab({"a c"}, 1).Fingerprint());
}

TEST(Tokenize, EmptyTextYieldsClsOnly) {
  EXPECT_THAT(Tokenize(BuildVocab({"good"}, 1), "").ids, ElementsAre(kClsId));
}

TEST(Tokenize, CaseFoldAndUnknownWords) {
  const TokenSeq s = Tokenize(BuildVocab({"good"}, 1), "Good good ZZZ");
  EXPECT_THAT(s.ids, ElementsAre(kClsId, 4, 4, kUnkId));
  EXPECT_EQ(s.words[3], "zzz");
}

TEST(Tokenize, TruncatesToMaxLen) {
  const Vocab v = BuildVocab({"w"}, 1);
  CounterRng rng(2);
  std::string text;
  for (int i = 0; i < 200; ++i) text += (rng.Bernoulli(0.5) ? "w " : "other ");
  EXPECT_EQ(Tokenize(v, text, 64).size(), 64u);
  EXPECT_EQ(Tokenize(v, text, 1).size(), 1u);
  EXPECT_THROW(Tokenize(v, text, 0), Error);
}

TEST(Tokenize, SpecialSpellingsNeverProduceSpecialIds) {
  const TokenSeq s = Tokenize(BuildVocab({"a"}, 1), "[CLS] [PAD] [MASK] [cls] a");
  for (size_t i = 1; i < s.size(); ++i) {
    EXPECT_TRUE(s.ids[i] == kUnkId || !IsSpecial(s.ids[i])) << i;
  }
}

TEST(Detokenize, ClsOnlyIsEmpty) {
  const Vocab v = BuildVocab({"a"}, 1);
  EXPECT_EQ(Detokenize(v, Tokenize(v, "")), "");
}

TEST(Detokenize, UnknownWordsKeepSurfaceForm) {
  const Vocab v = BuildVocab({"a"}, 1);
  EXPECT_EQ(Detokenize(v, Tokenize(v, "a QQ a")), "a qq a");
}

TEST(Detokenize, RoundTripOnRandomInVocabSentences) {
  const Vocab v = BuildVocab(Texts(MakeCorpus(5, 200).train), 1);
  CounterRng rng(11);
  for (int t = 0; t < 100; ++t) {
    std::string text;
    const auto len = rng.UniformInt(31);
    for (uint64_t i = 0; i < len; ++i) {
      if (i) text += ' ';
      text += v.token(static_cast<TokenId>(kNumSpecialTokens + rng.UniformInt(v.size() - kNumSpecialTokens)));
    }
    const TokenSeq s = Tokenize(v, text);
    EXPECT_EQ(Detokenize(v, s), text);
    EXPECT_EQ(Tokenize(v, Detokenize(v, s)).ids, s.ids);
  }
}

TEST(WithToken, ReplacesIdAndWordWithoutTouchingInput) {
  const Vocab v = BuildVocab({"a b"}, 1);
  const TokenSeq s = Tokenize(v, "a a");
  const TokenSeq t = WithToken(v, s, 2, v.IdOf("b"));
  EXPECT_EQ(Detokenize(v, t), "a b");
  EXPECT_EQ(Detokenize(v, s), "a a");
}

std::string WriteTemp(const std::string& body) {
  const auto path = testing::TempDir("ds") / "d.jsonl";
  std::ofstream(path) << body;
  return path.string();
}

TEST(LoadDataset, ReadsLinesInOrder) {
  const Dataset d = LoadDataset(
      WriteTemp("{\"text\":\"a b\",\"label\":1}\n\n{\"text\":\"c\",\"label\":0}\n"));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].text, "a b");
  EXPECT_EQ(d[0].label, 1);
  EXPECT_EQ(d[1].text, "c");
  EXPECT_FALSE(d[1].attackable.has_value());
}

TEST(LoadDataset, MissingLabelNamesLine) {
  ErrorCode code{};
  const std::string msg =
      ErrorMessage([&] { LoadDataset(WriteTemp("{\"text\":\"hi\"}\n")); }, &code);
  EXPECT_EQ(code, ErrorCode::kDataFormat);
  EXPECT_THAT(msg, HasSubstr("line 1"));
}

TEST(LoadDataset, ErrorsNameTheOffendingLine) {
  const std::string ok = "{\"text\":\"a\",\"label\":0}\n";
  EXPECT_THAT(ErrorMessage([&] { LoadDataset(WriteTemp(ok + ok + "not json\n")); }),
              HasSubstr("line 3"));
  EXPECT_THAT(ErrorMessage([&] { LoadDataset(WriteTemp(ok + "{\"text\":\"a\",\"label\":-1}\n")); }),
              HasSubstr("line 2"));
  EXPECT_THAT(ErrorMessage([&] {
                LoadDataset(WriteTemp("{\"text\":\"a\",\"label\":0,\"attackable\":[true,true]}\n"));
              }),
              HasSubstr("line 1"));
  EXPECT_THROW(LoadDataset((testing::TempDir("ds") / "missing.jsonl").string()), Error);
}

TEST(LoadDataset, ReadsAttackableMask) {
  const Dataset d = LoadDataset(
      WriteTemp("{\"text\":\"a b\",\"label\":0,\"attackable\":[false,true,false]}\n"));
  ASSERT_TRUE(d[0].attackable.has_value());
  EXPECT_THAT(*d[0].attackable, ElementsAre(false, true, false));
}

TEST(LoadDataset, LineCountMatchesGeneratedCorpus) {
  const CorpusSplit s = MakeCorpus(42, 2000);
  const auto dir = testing::TempDir("ds");
  SaveDataset(s.train, (dir / "train.jsonl").string());
  const std::string body = testing::ReadFile(dir / "train.jsonl");
  const auto lines = static_cast<size_t>(std::count(body.begin(), body.end(), '\n'));
  const Dataset back = LoadDataset((dir / "train.jsonl").string());
  EXPECT_EQ(back.size(), lines);
  EXPECT_EQ(back.size(), 1600u);
  for (size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].text, s.train[i].text);
    EXPECT_EQ(back[i].label, s.train[i].label);
  }
}

TEST(AttackableMask, ExcludesClsAndUnknownAndHonoursUserMask) {
  const Vocab v = BuildVocab({"a b"}, 1);
  const TokenSeq s = Tokenize(v, "a zz b");
  EXPECT_THAT(AttackableMask(s, std::nullopt), ElementsAre(false, true, false, true));
  EXPECT_THAT(AttackableMask(s, std::vector<bool>{false, false, true, true}),
              ElementsAre(false, false, false, true));
  EXPECT_THROW(AttackableMask(s, std::vector<bool>{false, true}), Error);
}

TEST(MakeCorpus, DeterministicUnderSeed) {
  const auto a = MakeCorpus(42, 300), b = MakeCorpus(42, 300), c = MakeCorpus(43, 300);
  EXPECT_EQ(Texts(a.train), Texts(b.train));
  EXPECT_EQ(Texts(a.test), Texts(b.test));
  EXPECT_NE(Texts(a.train), Texts(c.train));
}

TEST(MakeCorpus, SplitArithmetic) {
  const auto s = MakeCorpus(1, 100);
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_THROW(MakeCorpus(1, 9), Error);
}

TEST(MakeCorpus, LabelsBalancedWithinOne) {
  for (size_t size : {10u, 101u, 2000u, 2001u}) {
    const auto s = MakeCorpus(9, size);
    for (const Dataset* d : {&s.train, &s.test}) {
      long pos = 0, neg = 0;
      for (const auto& ex : *d) (ex.label == 1 ? pos : neg)++;
      EXPECT_LE(std::abs(pos - neg), 1) << size;
    }
  }
}

TEST(MakeCorpus, LexiconsAndTemplatesAreLargeEnough) {
  EXPECT_GE(PositiveWords().size(), 40u);
  EXPECT_GE(NegativeWords().size(), 40u);
  EXPECT_GE(CorpusTemplates().size(), 20u);
  std::set<std::string> pos(PositiveWords().begin(), PositiveWords().end());
  for (const auto& w : NegativeWords()) EXPECT_EQ(pos.count(w), 0u) << w;
}

TEST(MakeCorpus, TextIsLowercaseWithoutPunctuation) {
  for (const auto& ex : MakeCorpus(4, 200).train) {
    for (char c : ex.text) {
      EXPECT_TRUE((c >= 'a' && c <= 'z') || c == ' ' || c == '\'') << ex.text;
    }
  }
}

}  // namespace
}  // namespace textpgd
