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

#include "textpgd/text/corpus.h"

#include "textpgd/util/error.h"
#include "textpgd/util/rng.h"

namespace textpgd {

namespace {

const std::vector<std::string>& Nouns() {
  static const std::vector<std::string> kNouns = {
      "food",    "service", "staff",   "place",    "meal",     "pizza",
      "pasta",   "coffee",  "menu",    "room",     "hotel",    "movie",
      "show",    "plot",    "ending",  "book",     "music",    "atmosphere",
      "dessert", "soup",    "salad",   "burger",   "waiter",   "manager",
      "visit",   "price",   "view",    "location", "decor",    "bar",
      "breakfast", "dinner", "lunch",  "bread",    "wine",     "steak",
      "sushi",   "patio",   "lobby",   "concert"};
  return kNouns;
}

const std::vector<std::string>& Intensifiers() {
  static const std::vector<std::string> kIntensifiers = {
      "very",   "really",   "quite",      "truly",      "so",
      "extremely", "pretty", "rather",    "incredibly", "genuinely"};
  return kIntensifiers;
}

// {N} noun, {M} second noun, {I} intensifier, {A} decisive word,
// {B} second decisive word of the same polarity.
std::string Fill(const std::string& tmpl, bool positive, CounterRng& rng) {
  const auto& lex = positive ? PositiveWords() : NegativeWords();
  const auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
    return v[rng.UniformInt(v.size())];
  };
  std::string out;
  for (size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      switch (tmpl[i + 1]) {
        case 'N':
        case 'M':
          out += pick(Nouns());
          break;
        case 'I':
          out += pick(Intensifiers());
          break;
        case 'A':
        case 'B':
          out += pick(lex);
          break;
        default:
          Fail(ErrorCode::kInvalidArgument, "bad template slot in " + tmpl);
      }
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

Dataset MakeSplit(CounterRng rng, size_t n) {
  const auto& templates = CorpusTemplates();
  Dataset out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    CounterRng item = rng.Split(i);
    const std::string& tmpl = templates[item.UniformInt(templates.size())];
    out.push_back({Fill(tmpl, label == 1, item), label, std::nullopt});
  }
  rng.Split("order").Shuffle(out);
  return out;
}

}  // namespace

const std::vector<std::string>& PositiveWords() {
  static const std::vector<std::string> kPositive = {
      "good",      "great",      "excellent",  "wonderful",  "amazing",
      "fantastic", "superb",     "delightful", "lovely",     "pleasant",
      "brilliant", "outstanding", "perfect",   "terrific",   "marvelous",
      "enjoyable", "impressive", "charming",   "friendly",   "fresh",
      "tasty",     "delicious",  "awesome",    "splendid",   "fabulous",
      "remarkable", "exceptional", "stellar",  "gorgeous",   "satisfying",
      "cozy",      "elegant",    "flawless",   "generous",   "helpful",
      "refreshing", "smooth",    "sublime",    "welcoming",  "spotless",
      "reliable",  "superior",   "attentive",  "memorable",  "inviting"};
  return kPositive;
}

const std::vector<std::string>& NegativeWords() {
  static const std::vector<std::string> kNegative = {
      "bad",        "terrible",  "awful",       "horrible",   "poor",
      "disappointing", "dreadful", "mediocre",  "bland",      "stale",
      "rude",       "dirty",     "greasy",      "soggy",      "boring",
      "lousy",      "nasty",     "unpleasant",  "pathetic",   "miserable",
      "atrocious",  "disgusting", "inferior",   "lame",       "sloppy",
      "noisy",      "overpriced", "tasteless",  "shabby",     "unfriendly",
      "unhelpful",  "careless",  "broken",      "weak",       "sour",
      "dull",       "abysmal",   "subpar",      "filthy",     "chaotic",
      "frustrating", "forgettable", "cramped",  "inedible",   "clumsy"};
  return kNegative;
}

const std::vector<std::string>& CorpusTemplates() {
  static const std::vector<std::string> kTemplates = {
      "the {N} was {I} {A}",
      "i thought the {N} was {A}",
      "honestly the {N} here is {I} {A}",
      "we found the {N} {I} {A} overall",
      "our {N} was {A} and the {M} was {B}",
      "my friend said the {N} was {A}",
      "the {N} at this place is {A}",
      "what a {A} {N}",
      "everything about the {N} felt {A}",
      "in my opinion the {N} is {I} {A}",
      "the {N} seemed {A} to me",
      "we had a {A} {N} last night",
      "i would describe the {N} as {A}",
      "this {N} was {A} from start to finish",
      "they served a {A} {N} with the {M}",
      "after waiting we got a {A} {N}",
      "the {N} and the {M} were both {A}",
      "i must say the {N} was {I} {A}",
      "to be fair the {N} is {A}",
      "it was a {A} {N} for the price",
      "the {N} looked {A} and the {M} felt {B}",
      "overall the {N} was {A} and {I} {B}",
      "a {I} {A} {N} if you ask me",
      "the new {N} is {A} in every way"};
  return kTemplates;
}

CorpusSplit MakeCorpus(uint64_t seed, size_t size, CorpusTask task) {
  Require(size >= 10, ErrorCode::kInvalidArgument, "corpus size must be >= 10");
  Require(task == CorpusTask::kSentiment, ErrorCode::kInvalidArgument,
          "unsupported corpus task");
  const CounterRng root = CounterRng(seed).Split("corpus/sentiment");
  const size_t n_test = size / 5;
  CorpusSplit split;
  split.train = MakeSplit(root.Split("train"), size - n_test);
  split.test = MakeSplit(root.Split("test"), n_test);
  return split;
}

}  // namespace textpgd
