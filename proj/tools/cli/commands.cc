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

#include "cli/commands.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "textpgd/attack/attack.h"
#include "textpgd/attack/config.h"
#include "textpgd/attack/result.h"
#include "textpgd/eval/metrics.h"
#include "textpgd/eval/report.h"
#include "textpgd/models/checkpoint.h"
#include "textpgd/models/training.h"
#include "textpgd/text/corpus.h"
#include "textpgd/text/dataset.h"
#include "textpgd/text/vocab.h"
#include "textpgd/util/error.h"
#include "textpgd/util/parallel.h"

namespace textpgd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Non-canonical sidecar: wall-clock times and the raw argument list.
class MetaSidecar {
 public:
  MetaSidecar(std::string path, std::string command,
              const std::vector<std::string>& args)
      : path_(std::move(path)) {
    doc_ = {{"command", std::move(command)},
            {"args", args},
            {"started_utc", UtcNow()},
            {"threads", DefaultThreadCount()}};
  }
  void Finish() {
    doc_["finished_utc"] = UtcNow();
    std::ofstream out(path_, std::ios::binary);
    out << doc_.dump(2) << "\n";
  }

 private:
  std::string path_;
  json doc_;
};

void EnsureParent(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  Require(!ec, ErrorCode::kIo, "cannot create directory " + parent.string());
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec && fs::is_directory(dir), ErrorCode::kIo,
          "cannot create directory " + dir);
}

// Resolved-config echo for commands whose output is a single file.
void EchoForFile(const json& config, const std::string& out) {
  EnsureParent(out);
  WriteCanonicalJson(config, out + ".run_config.json");
}

std::optional<Vocab> SiblingVocab(const std::string& data_path) {
  const fs::path p = fs::path(data_path).parent_path() / "vocab.json";
  if (!fs::exists(p)) return std::nullopt;
  return Vocab::Load(p.string());
}

struct Checkpoint {
  ModelParams params;
  Vocab vocab;
};

Checkpoint LoadModelWithVocab(const std::string& dir, const char* role) {
  ModelParams params = LoadCheckpoint(dir);
  std::optional<Vocab> vocab = LoadCheckpointVocab(dir);
  Require(vocab.has_value(), ErrorCode::kVocabMismatch,
          std::string(role) + " checkpoint has no vocab.json: " + dir);
  Require(vocab->size() == params.dims.vocab_size, ErrorCode::kVocabMismatch,
          std::string(role) + " vocab size does not match its parameters");
  return {std::move(params), std::move(*vocab)};
}

void RequireSameVocab(const Vocab& a, const Vocab& b, const std::string& what) {
  Require(a == b, ErrorCode::kVocabMismatch, "vocab mismatch: " + what);
}

AttackConfig ResolveAttackConfig(const std::string& path,
                                 const std::string& method,
                                 std::optional<uint64_t> seed) {
  AttackConfig c;
  if (!path.empty()) c = AttackConfigFromJson(ReadJsonFile(path));
  if (!method.empty()) c.method = ParseMethod(method);
  if (seed) c.seed = *seed;
  Validate(c);
  return c;
}

std::vector<double> ParseTaus(const std::string& text) {
  std::vector<double> taus;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw UsageError("--taus: not a number: '" + item + "'");
    }
    taus.push_back(v);
  }
  if (taus.empty()) throw UsageError("--taus: empty list");
  return taus;
}

// ---- make-corpus ----

struct MakeCorpusArgs {
  std::string out;
  uint64_t seed = 42;
  size_t size = 2000;
};

int MakeCorpusCmd(const MakeCorpusArgs& a, const std::vector<std::string>& raw,
                  std::ostream& err) {
  EnsureDir(a.out);
  MetaSidecar meta((fs::path(a.out) / "meta.json").string(), "make-corpus", raw);
  WriteCanonicalJson({{"command", "make-corpus"},
                      {"out", a.out},
                      {"seed", a.seed},
                      {"size", a.size},
                      {"task", "sentiment"},
                      {"vocab_min_freq", 1}},
                     (fs::path(a.out) / "run_config.json").string());
  const CorpusSplit split = MakeCorpus(a.seed, a.size);
  const Vocab vocab = BuildVocab(Texts(split.train), 1);
  SaveDataset(split.train, (fs::path(a.out) / "train.jsonl").string());
  SaveDataset(split.test, (fs::path(a.out) / "test.jsonl").string());
  vocab.Save((fs::path(a.out) / "vocab.json").string());
  meta.Finish();
  err << "make-corpus: train=" << split.train.size() << " test=" << split.test.size()
      << " vocab=" << vocab.size() << "\n";
  return kExitOk;
}

// ---- train ----

struct TrainArgs {
  std::string task = "clf";
  std::string arch;
  std::string data;
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
};

int TrainCmd(const TrainArgs& a, const std::vector<std::string>& raw,
             std::ostream& err) {
  TrainHyper base;
  if (a.task == "mlm") base.epochs = 8;
  TrainHyper h = a.config.empty() ? base : TrainHyperFromJson(ReadJsonFile(a.config), base);
  if (!a.arch.empty()) h.arch = ParseArch(a.arch);
  if (a.seed) h.seed = *a.seed;
  if (a.task == "mlm" && h.arch != Arch::kTransformer) {
    throw UsageError("--task mlm requires --arch transformer");
  }

  // --data is a corpus directory or a JSONL file (vocab.json beside it, if any).
  std::string data_file = a.data;
  if (fs::is_directory(a.data)) data_file = (fs::path(a.data) / "train.jsonl").string();
  EnsureDir(a.out);
  MetaSidecar meta((fs::path(a.out) / "meta.json").string(), "train", raw);
  WriteCanonicalJson({{"command", "train"},
                      {"task", a.task},
                      {"data", data_file},
                      {"out", a.out},
                      {"hyper", ToJson(h)}},
                     (fs::path(a.out) / "run_config.json").string());

  const Dataset data = LoadDataset(data_file);
  Require(!data.empty(), ErrorCode::kDataFormat, "training data is empty: " + data_file);
  std::optional<Vocab> vocab = SiblingVocab(data_file);
  if (!vocab) vocab = BuildVocab(Texts(data), 1);

  const TrainResult result = a.task == "mlm" ? TrainMlm(Texts(data), *vocab, h)
                                             : TrainClassifier(data, *vocab, h);
  SaveCheckpoint(result.params, a.out, &*vocab);
  WriteCanonicalJson({{"task", a.task},
                      {"arch", std::string(ArchName(h.arch))},
                      {"epochs", ToJson(result.log)}},
                     (fs::path(a.out) / "training_log.json").string());
  meta.Finish();
  const EpochLog& last = result.log.back();
  err << "train: task=" << a.task << " arch=" << ArchName(h.arch)
      << " epochs=" << last.epoch << " loss=" << last.loss
      << " train_accuracy=" << last.train_accuracy << "\n";
  return kExitOk;
}

// ---- attack ----

struct AttackArgs {
  std::string method;
  std::string victim;
  std::string mlm;
  std::string data;
  std::string attack_config;
  std::string out;
  std::optional<uint64_t> seed;
};

int AttackCmd(const AttackArgs& a, const std::vector<std::string>& raw,
              std::ostream& err) {
  const AttackConfig config = ResolveAttackConfig(a.attack_config, a.method, a.seed);
  EchoForFile({{"command", "attack"},
               {"victim", a.victim},
               {"mlm", a.mlm},
               {"data", a.data},
               {"out", a.out},
               {"attack_config", ToJson(config)}},
              a.out);
  MetaSidecar meta(a.out + ".meta.json", "attack", raw);

  const Checkpoint victim = LoadModelWithVocab(a.victim, "victim");
  const Checkpoint mlm = LoadModelWithVocab(a.mlm, "mlm");
  RequireSameVocab(victim.vocab, mlm.vocab, "victim and mlm");
  if (auto data_vocab = SiblingVocab(a.data)) {
    RequireSameVocab(victim.vocab, *data_vocab, "victim and data");
  }
  const Dataset data = LoadDataset(a.data);
  const std::vector<AttackResult> results =
      RunAttacks(victim.params, mlm.params, victim.vocab, data, config,
                 DefaultThreadCount());
  SaveResults(results, a.out);
  meta.Finish();

  int64_t success = 0, skipped = 0, queries = 0;
  for (const auto& r : results) {
    success += r.success;
    skipped += r.skipped;
    queries += r.queries;
  }
  err << "attack: method=" << MethodName(config.method) << " n=" << results.size()
      << " success=" << success << " skipped=" << skipped
      << " queries=" << queries << "\n";
  return kExitOk;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string results;
  std::string victim;
  std::string data;
  std::string attack_config;
  std::string method;
  std::string dataset_id;
  std::string out;
  std::optional<uint64_t> seed;
};

int EvaluateCmd(const EvaluateArgs& a, const std::vector<std::string>& raw,
                std::ostream& err) {
  const AttackConfig config = ResolveAttackConfig(a.attack_config, a.method, a.seed);
  const std::string dataset_id =
      a.dataset_id.empty() ? fs::path(a.data).filename().string() : a.dataset_id;
  EchoForFile({{"command", "evaluate"},
               {"results", a.results},
               {"victim", a.victim},
               {"data", a.data},
               {"dataset_id", dataset_id},
               {"out", a.out},
               {"attack_config", ToJson(config)}},
              a.out);
  MetaSidecar meta(a.out + ".meta.json", "evaluate", raw);

  const Checkpoint victim = LoadModelWithVocab(a.victim, "victim");
  const Dataset data = LoadDataset(a.data);
  const std::vector<AttackResult> results = LoadResults(a.results);
  Require(results.size() == data.size(), ErrorCode::kDataFormat,
          "results and data have different lengths");
  const EvalReport report = MakeEvalReport(
      results, CleanAccuracy(victim.params, victim.vocab, data), dataset_id, config);
  WriteCanonicalJson(ToJson(report), a.out);
  meta.Finish();
  err << "evaluate: clean=" << report.clean_accuracy
      << " attacked=" << report.attacked_accuracy
      << " queries_mean=" << report.queries_mean << "\n";
  return kExitOk;
}

// ---- transfer ----

struct TransferArgs {
  std::string results;
  std::string victim;
  std::string model;
  std::string out;
};

int TransferCmd(const TransferArgs& a, const std::vector<std::string>& raw,
                std::ostream& err) {
  EchoForFile({{"command", "transfer"},
               {"results", a.results},
               {"victim", a.victim},
               {"model", a.model},
               {"out", a.out}},
              a.out);
  MetaSidecar meta(a.out + ".meta.json", "transfer", raw);
  const Checkpoint victim = LoadModelWithVocab(a.victim, "victim");
  const Checkpoint target = LoadModelWithVocab(a.model, "target");
  const std::vector<AttackResult> results = LoadResults(a.results);
  const TransferReport report =
      TransferEval(results, target.params, victim.vocab, target.vocab);
  WriteCanonicalJson(ToJson(report), a.out);
  meta.Finish();
  err << "transfer: clean=" << report.clean_accuracy
      << " attacked=" << report.attacked_accuracy << "\n";
  return kExitOk;
}

// ---- compare ----

struct CompareArgs {
  std::string a;
  std::string b;
  std::string out;
};

int CompareCmd(const CompareArgs& a, const std::vector<std::string>& raw,
               std::ostream& err) {
  EchoForFile({{"command", "compare"}, {"a", a.a}, {"b", a.b}, {"out", a.out}}, a.out);
  MetaSidecar meta(a.out + ".meta.json", "compare", raw);
  const json doc = CompareReports(EvalReportFromJson(ReadJsonFile(a.a)),
                                  EvalReportFromJson(ReadJsonFile(a.b)));
  WriteCanonicalJson(doc, a.out);
  meta.Finish();
  err << "compare: wrote " << a.out << "\n";
  return kExitOk;
}

// ---- kstudy ----

struct KStudyArgs {
  std::string victim;
  std::string mlm;
  std::string data;
  std::string attack_config;
  std::string method;
  std::string taus = "0,0.001";
  std::string dataset_id;
  std::string out;
  std::optional<uint64_t> seed;
};

int KStudyCmd(const KStudyArgs& a, const std::vector<std::string>& raw,
              std::ostream& err) {
  const AttackConfig config = ResolveAttackConfig(a.attack_config, a.method, a.seed);
  const std::vector<double> taus = ParseTaus(a.taus);
  const std::string dataset_id =
      a.dataset_id.empty() ? fs::path(a.data).filename().string() : a.dataset_id;
  EchoForFile({{"command", "kstudy"},
               {"victim", a.victim},
               {"mlm", a.mlm},
               {"data", a.data},
               {"taus", taus},
               {"dataset_id", dataset_id},
               {"out", a.out},
               {"attack_config", ToJson(config)}},
              a.out);
  MetaSidecar meta(a.out + ".meta.json", "kstudy", raw);
  const Checkpoint victim = LoadModelWithVocab(a.victim, "victim");
  const Checkpoint mlm = LoadModelWithVocab(a.mlm, "mlm");
  RequireSameVocab(victim.vocab, mlm.vocab, "victim and mlm");
  if (auto data_vocab = SiblingVocab(a.data)) {
    RequireSameVocab(victim.vocab, *data_vocab, "victim and data");
  }
  const Dataset data = LoadDataset(a.data);
  const std::vector<KStudyRow> rows =
      KStudy(victim.params, mlm.params, victim.vocab, data, config, taus, dataset_id,
             DefaultThreadCount());
  WriteCanonicalJson(ToJson(rows), a.out);
  meta.Finish();
  err << "kstudy: rows=" << rows.size() << "\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Adversarial text attacks: projected-gradient and greedy masked-LM "
               "substitution against a small transformer classifier.",
               "textpgd"};
  app.require_subcommand(1);

  MakeCorpusArgs mc;
  auto* mc_cmd = app.add_subcommand("make-corpus", "Generate the synthetic sentiment corpus");
  mc_cmd->add_option("--out", mc.out, "Output directory")->required();
  mc_cmd->add_option("--seed", mc.seed, "Corpus seed")->capture_default_str();
  mc_cmd->add_option("--size", mc.size, "Total examples (train gets 80%)")
      ->capture_default_str()
      ->check(CLI::Range(size_t{10}, size_t{100000000}));

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train a classifier or masked-LM");
  tr_cmd->add_option("--task", tr.task, "clf or mlm")
      ->capture_default_str()
      ->check(CLI::IsMember({"clf", "mlm"}));
  tr_cmd->add_option("--arch", tr.arch, "transformer or avg_mlp (overrides --config)")
      ->check(CLI::IsMember({"transformer", "avg_mlp"}));
  tr_cmd->add_option("--data", tr.data, "Corpus directory or JSONL file")->required();
  tr_cmd->add_option("--config", tr.config, "Training hyperparameters (JSON)");
  tr_cmd->add_option("--out", tr.out, "Checkpoint directory")->required();
  tr_cmd->add_option("--seed", tr.seed, "Overrides the config seed");

  AttackArgs at;
  auto* at_cmd = app.add_subcommand("attack", "Attack every example of a dataset");
  at_cmd->add_option("--method", at.method, "pgd or baseline (overrides --attack-config)")
      ->check(CLI::IsMember({"pgd", "baseline"}));
  at_cmd->add_option("--victim", at.victim, "Victim checkpoint directory")->required();
  at_cmd->add_option("--mlm", at.mlm, "Masked-LM checkpoint directory")->required();
  at_cmd->add_option("--data", at.data, "Dataset JSONL")->required();
  at_cmd->add_option("--attack-config", at.attack_config, "Attack configuration (JSON)");
  at_cmd->add_option("--out", at.out, "Results JSONL")->required();
  at_cmd->add_option("--seed", at.seed, "Overrides the config seed");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Aggregate attack results into a report");
  ev_cmd->add_option("--results", ev.results, "Results JSONL")->required();
  ev_cmd->add_option("--victim", ev.victim, "Victim checkpoint directory")->required();
  ev_cmd->add_option("--data", ev.data, "Dataset JSONL the results came from")->required();
  ev_cmd->add_option("--attack-config", ev.attack_config, "Attack configuration (JSON)");
  ev_cmd->add_option("--method", ev.method, "pgd or baseline (overrides --attack-config)")
      ->check(CLI::IsMember({"pgd", "baseline"}));
  ev_cmd->add_option("--dataset-id", ev.dataset_id, "Defaults to the data file name");
  ev_cmd->add_option("--out", ev.out, "Report JSON")->required();
  ev_cmd->add_option("--seed", ev.seed, "Overrides the config seed");

  TransferArgs tf;
  auto* tf_cmd = app.add_subcommand("transfer", "Replay adversarial examples on another model");
  tf_cmd->add_option("--results", tf.results, "Results JSONL from the victim")->required();
  tf_cmd->add_option("--victim", tf.victim, "Checkpoint the results were produced against")
      ->required();
  tf_cmd->add_option("--model", tf.model, "Target checkpoint directory")->required();
  tf_cmd->add_option("--out", tf.out, "Report JSON")->required();

  CompareArgs cp;
  auto* cp_cmd = app.add_subcommand("compare", "Side-by-side comparison of two reports");
  cp_cmd->add_option("--a", cp.a, "First report JSON")->required();
  cp_cmd->add_option("--b", cp.b, "Second report JSON")->required();
  cp_cmd->add_option("--out", cp.out, "Comparison JSON")->required();

  KStudyArgs ks;
  auto* ks_cmd = app.add_subcommand("kstudy", "Fixed-K versus thresholded-K study");
  ks_cmd->add_option("--victim", ks.victim, "Victim checkpoint directory")->required();
  ks_cmd->add_option("--mlm", ks.mlm, "Masked-LM checkpoint directory")->required();
  ks_cmd->add_option("--data", ks.data, "Dataset JSONL")->required();
  ks_cmd->add_option("--attack-config", ks.attack_config, "Attack configuration (JSON)");
  ks_cmd->add_option("--method", ks.method, "pgd or baseline (overrides --attack-config)")
      ->check(CLI::IsMember({"pgd", "baseline"}));
  ks_cmd->add_option("--taus", ks.taus, "Comma-separated thresholds; must include 0")
      ->capture_default_str();
  ks_cmd->add_option("--dataset-id", ks.dataset_id, "Defaults to the data file name");
  ks_cmd->add_option("--out", ks.out, "Report JSON")->required();
  ks_cmd->add_option("--seed", ks.seed, "Overrides the config seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mc_cmd) return MakeCorpusCmd(mc, args, err);
    if (*tr_cmd) return TrainCmd(tr, args, err);
    if (*at_cmd) return AttackCmd(at, args, err);
    if (*ev_cmd) return EvaluateCmd(ev, args, err);
    if (*tf_cmd) return TransferCmd(tf, args, err);
    if (*cp_cmd) return CompareCmd(cp, args, err);
    if (*ks_cmd) return KStudyCmd(ks, args, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace textpgd::cli
