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

#include "textpgd/eval/report.h"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "textpgd/attack/attack.h"
#include "textpgd/eval/metrics.h"
#include "textpgd/models/model.h"
#include "textpgd/util/error.h"

namespace textpgd {

EvalReport MakeEvalReport(std::span<const AttackResult> results,
                          double clean_accuracy, const std::string& dataset_id,
                          const AttackConfig& config) {
  EvalReport r;
  r.dataset_id = dataset_id;
  r.method = std::string(MethodName(config.method));
  r.clean_accuracy = clean_accuracy;
  r.attacked_accuracy = AttackedAccuracy(results);
  r.n_examples = static_cast<int64_t>(results.size());
  double q = 0.0, pct = 0.0, sim = 0.0;
  for (const auto& res : results) {
    if (res.skipped) {
      ++r.n_skipped;
      continue;
    }
    q += static_cast<double>(res.queries);
    if (res.success) {
      ++r.n_success;
      pct += res.perturb_pct;
      sim += res.similarity;
    }
  }
  const int64_t attacked = r.n_examples - r.n_skipped;
  r.queries_mean = q / static_cast<double>(attacked);
  if (r.n_success > 0) {
    r.perturb_pct_mean = pct / static_cast<double>(r.n_success);
    r.similarity_mean = sim / static_cast<double>(r.n_success);
  }
  r.config = ToJson(config);
  r.seed = config.seed;
  return r;
}

nlohmann::json ToJson(const EvalReport& r) {
  return nlohmann::json{
      {"dataset_id", r.dataset_id},
      {"method", r.method},
      {"clean_accuracy", r.clean_accuracy},
      {"attacked_accuracy", r.attacked_accuracy},
      {"perturb_pct_mean", r.perturb_pct_mean},
      {"queries_mean", r.queries_mean},
      {"similarity_mean", r.similarity_mean},
      {"n_examples", r.n_examples},
      {"n_skipped", r.n_skipped},
      {"n_success", r.n_success},
      {"config", r.config},
      {"seed", r.seed},
      {"notes",
       {{"attacked_accuracy", "failures / non-skipped; clean-misclassified inputs excluded"},
        {"perturb_pct", "changed tokens / attackable positions, mean over successes"},
        {"similarity", "cosine of attacker MLM mean-pooled representations, mean over successes"},
        {"queries", "victim forward passes per attack, mean over non-skipped"}}}};
}

EvalReport EvalReportFromJson(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.clean_accuracy = j.at("clean_accuracy").get<double>();
    r.attacked_accuracy = j.at("attacked_accuracy").get<double>();
    r.perturb_pct_mean = j.at("perturb_pct_mean").get<double>();
    r.queries_mean = j.at("queries_mean").get<double>();
    r.similarity_mean = j.at("similarity_mean").get<double>();
    r.n_examples = j.at("n_examples").get<int64_t>();
    r.n_skipped = j.at("n_skipped").get<int64_t>();
    r.n_success = j.value("n_success", int64_t{0});
    r.config = j.value("config", nlohmann::json::object());
    r.seed = j.at("seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, std::string("eval report: ") + e.what());
  }
  return r;
}

TransferReport TransferEval(std::span<const AttackResult> results_from_a,
                            const ModelParams& model_b, const Vocab& vocab_a,
                            const Vocab& vocab_b) {
  Require(vocab_a == vocab_b, ErrorCode::kVocabMismatch,
          "transfer target uses a different vocabulary");
  Require(model_b.dims.vocab_size == vocab_b.size(), ErrorCode::kVocabMismatch,
          "transfer target does not match its vocabulary");
  Require(!results_from_a.empty(), ErrorCode::kInvalidArgument, "no attack results");
  TransferReport t;
  size_t clean_ok = 0, attacked_ok = 0, n_success = 0;
  double pct = 0.0;
  for (const auto& r : results_from_a) {
    if (Predict(model_b, r.original.ids) == r.true_label) ++clean_ok;
    if (Predict(model_b, r.adversarial.ids) == r.true_label) ++attacked_ok;
    if (r.success) {
      ++n_success;
      pct += r.perturb_pct;
    }
  }
  const double n = static_cast<double>(results_from_a.size());
  t.clean_accuracy = static_cast<double>(clean_ok) / n;
  t.attacked_accuracy = static_cast<double>(attacked_ok) / n;
  t.perturb_pct_mean = n_success ? pct / static_cast<double>(n_success) : 0.0;
  t.n_examples = static_cast<int64_t>(results_from_a.size());
  return t;
}

nlohmann::json ToJson(const TransferReport& r) {
  return nlohmann::json{{"clean_accuracy", r.clean_accuracy},
                        {"attacked_accuracy", r.attacked_accuracy},
                        {"perturb_pct_mean", r.perturb_pct_mean},
                        {"n_examples", r.n_examples}};
}

std::vector<KStudyRow> KStudy(const ModelParams& victim, const ModelParams& mlm,
                              const Vocab& vocab, const Dataset& data,
                              const AttackConfig& base, std::span<const double> taus,
                              const std::string& dataset_id, size_t threads) {
  Require(std::find(taus.begin(), taus.end(), 0.0) != taus.end(),
          ErrorCode::kInvalidArgument, "tau list must include 0 (fixed-K row)");
  const double clean = CleanAccuracy(victim, vocab, data);
  std::vector<KStudyRow> rows;
  for (double tau : taus) {
    AttackConfig cfg = base;
    cfg.tau = tau;
    const auto results = RunAttacks(victim, mlm, vocab, data, cfg, threads);
    rows.push_back({tau, tau == 0.0 ? "fixed_k" : "threshold",
                    MakeEvalReport(results, clean, dataset_id, cfg)});
  }
  return rows;
}

nlohmann::json ToJson(std::span<const KStudyRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    arr.push_back({{"tau", row.tau},
                   {"mode", row.mode},
                   {"K", row.report.config.value("K", 0)},
                   {"attacked_accuracy", row.report.attacked_accuracy},
                   {"queries_mean", row.report.queries_mean},
                   {"report", ToJson(row.report)}});
  }
  return nlohmann::json{{"rows", arr}};
}

nlohmann::json CompareReports(const EvalReport& a, const EvalReport& b) {
  Require(a.dataset_id == b.dataset_id, ErrorCode::kInvalidArgument,
          "reports cover different datasets: '" + a.dataset_id + "' vs '" +
              b.dataset_id + "'");
  Require(a.seed == b.seed, ErrorCode::kInvalidArgument,
          "reports use different seeds");
  struct Metric {
    const char* name;
    double va, vb;
    bool higher_is_better;
  };
  const Metric metrics[] = {
      {"clean_accuracy", a.clean_accuracy, b.clean_accuracy, true},
      {"attacked_accuracy", a.attacked_accuracy, b.attacked_accuracy, false},
      {"perturb_pct_mean", a.perturb_pct_mean, b.perturb_pct_mean, false},
      {"queries_mean", a.queries_mean, b.queries_mean, false},
      {"similarity_mean", a.similarity_mean, b.similarity_mean, true},
  };
  nlohmann::json deltas = nlohmann::json::object();
  nlohmann::json wins = nlohmann::json::object();
  int a_wins = 0, b_wins = 0;
  for (const Metric& m : metrics) {
    deltas[m.name] = m.va - m.vb;
    std::string w = "tie";
    if (m.va != m.vb && std::string(m.name) != "clean_accuracy") {
      const bool a_better = m.higher_is_better ? m.va > m.vb : m.va < m.vb;
      w = a_better ? "a" : "b";
      (a_better ? a_wins : b_wins) += 1;
    }
    wins[m.name] = w;
  }
  wins["a_count"] = a_wins;
  wins["b_count"] = b_wins;
  return nlohmann::json{{"dataset_id", a.dataset_id},
                        {"seed", a.seed},
                        {"a", ToJson(a)},
                        {"b", ToJson(b)},
                        {"deltas", deltas},
                        {"directional_wins", wins}};
}

std::string CanonicalJson(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void WriteCanonicalJson(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  Require(out.good(), ErrorCode::kIo, "cannot write " + path);
  out << CanonicalJson(j);
  Require(out.good(), ErrorCode::kIo, "write failed: " + path);
}

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  try {
    return nlohmann::json::parse(std::string(std::istreambuf_iterator<char>(in),
                                             std::istreambuf_iterator<char>()));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, path + ": " + e.what());
  }
}

}  // namespace textpgd
