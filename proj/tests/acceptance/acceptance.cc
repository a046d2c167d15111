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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.
//
//   acceptance                 run all criteria
//   acceptance --criterion 5   run one (repeatable)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.h"
#include "oracles/oracles.h"
#include "support/world.h"
#include "textpgd/attack/attack.h"
#include "textpgd/eval/metrics.h"
#include "textpgd/eval/report.h"
#include "textpgd/eval/victim.h"
#include "textpgd/models/model.h"
#include "textpgd/models/training.h"
#include "textpgd/num/finite_diff.h"
#include "textpgd/num/network.h"
#include "textpgd/text/corpus.h"
#include "textpgd/util/rng.h"

namespace textpgd::acceptance {
namespace {

namespace fs = std::filesystem;

// ---- pinned thresholds ----

constexpr double kGradRelTol = 1e-4;
constexpr double kGradMaxSeconds = 30.0;
constexpr double kBallTol = 1e-12;
constexpr double kStepMaxSeconds = 10.0;
constexpr int kOracleInstances = 20;
constexpr double kVictimMinAccuracy = 0.90;
constexpr double kVictimMaxSeconds = 300.0;
constexpr double kAttackedAccSlack = 0.02;
constexpr double kQueryRatio = 1.10;
constexpr double kSimilaritySlack = 0.01;
constexpr double kPerturbSlack = 0.5;
constexpr double kEffectivenessMaxSeconds = 600.0;
constexpr double kThresholdTau = 0.001;
constexpr double kThresholdAccSlack = 0.05;
constexpr double kTransferSlack = 0.02;
constexpr size_t kSaltCount = 10;
constexpr size_t kEvalExamples = 100;
constexpr uint64_t kSeeds[] = {42, 43, 44};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- shared per-seed pipeline ----

struct SeedRun {
  CorpusSplit split;
  Vocab vocab;
  ModelParams victim, mlm, avg;
  Dataset eval;  // first kEvalExamples test examples
};

const SeedRun& Run(uint64_t seed) {
  static std::map<uint64_t, std::unique_ptr<SeedRun>> cache;
  auto& slot = cache[seed];
  if (!slot) {
    CorpusSplit split = MakeCorpus(seed, 2000);
    Vocab vocab = BuildVocab(Texts(split.train), 1);
    slot.reset(new SeedRun{std::move(split), std::move(vocab), {}, {}, {}, {}});
    SeedRun& r = *slot;
    TrainHyper h;
    h.seed = seed;
    r.victim = TrainClassifier(r.split.train, r.vocab, h).params;
    TrainHyper hm = h;
    hm.epochs = 8;
    r.mlm = TrainMlm(Texts(r.split.train), r.vocab, hm).params;
    TrainHyper ha = h;
    ha.arch = Arch::kAvgMlp;
    r.avg = TrainClassifier(r.split.train, r.vocab, ha).params;
    r.eval.assign(r.split.test.begin(), r.split.test.begin() + kEvalExamples);
  }
  return *slot;
}

AttackConfig Config(AttackMethod m, uint64_t seed, double tau = 0.0) {
  AttackConfig c;
  c.method = m;
  c.seed = seed;
  c.tau = tau;
  return c;
}

struct Outcome {
  std::vector<AttackResult> results;
  EvalReport report;
  TransferReport transfer;
};

const Outcome& Attack(uint64_t seed, AttackMethod m, double tau = 0.0) {
  static std::map<std::tuple<uint64_t, int, double>, Outcome> cache;
  const auto key = std::make_tuple(seed, static_cast<int>(m), tau);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const SeedRun& r = Run(seed);
    const AttackConfig c = Config(m, seed, tau);
    Outcome o;
    o.results = RunAttacks(r.victim, r.mlm, r.vocab, r.eval, c, 1);
    o.report = MakeEvalReport(o.results, CleanAccuracy(r.victim, r.vocab, r.eval),
                              "synthetic-" + std::to_string(seed), c);
    o.transfer = TransferEval(o.results, r.avg, r.vocab, r.vocab);
    it = cache.emplace(key, std::move(o)).first;
  }
  return it->second;
}

struct Means {
  double attacked = 0, queries = 0, similarity = 0, perturb = 0;
  double transfer_clean = 0, transfer_attacked = 0;
};

Means MeanOverSeeds(AttackMethod m, double tau = 0.0) {
  Means s;
  const double n = static_cast<double>(std::size(kSeeds));
  for (uint64_t seed : kSeeds) {
    const Outcome& o = Attack(seed, m, tau);
    s.attacked += o.report.attacked_accuracy / n;
    s.queries += o.report.queries_mean / n;
    s.similarity += o.report.similarity_mean / n;
    s.perturb += o.report.perturb_pct_mean / n;
    s.transfer_clean += o.transfer.clean_accuracy / n;
    s.transfer_attacked += o.transfer.attacked_accuracy / n;
  }
  return s;
}

// ---- 1: gradient correctness ----

Verdict GradientCheck() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int cases = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    for (size_t d : {4, 8}) {
      for (size_t layers : {0, 1, 2}) {
        ModelDims dims;
        dims.vocab_size = 20;
        dims.dim = d;
        dims.max_len = 12;
        dims.layers = layers;
        dims.hidden = 2 * d;
        CounterRng rng = CounterRng(seed).Split(d * 10 + layers);
        const ModelParams p = InitParams(Arch::kTransformer, dims, rng.Split("init"));
        const size_t n = 3 + rng.UniformInt(4);
        Tensor emb = Tensor::Matrix(n, d);
        for (double& x : emb.data()) x = rng.Normal();
        std::vector<double> ref(d);
        for (double& x : ref) x = rng.Normal();
        const int label = static_cast<int>(rng.UniformInt(2));
        for (double lambda : {0.0, 1.0}) {
          const auto f = [&](const Tensor& x) {
            return LossAndGrad(p, x, label, Objective::kClsPlusSim,
                               std::span<const double>(ref), lambda)
                .loss;
          };
          const GradResult g = LossAndGrad(p, emb, label, Objective::kClsPlusSim,
                                           std::span<const double>(ref), lambda);
          worst = std::max(worst,
                           MaxRelativeError(g.grad_embeddings, FiniteDiffGradient(f, emb, 1e-5)));
          ++cases;
        }
      }
    }
  }
  const double secs = Seconds(t0);
  return {worst <= kGradRelTol && secs < kGradMaxSeconds,
          Fmt("%d cases, max rel err %.2e (tol %.0e), %.1fs", cases, worst, kGradRelTol, secs)};
}

// ---- 2: sign-step invariants ----

Verdict StepInvariants() {
  const auto t0 = std::chrono::steady_clock::now();
  CounterRng rng(2024);
  double worst_excess = 0.0;
  bool fixed_point = true, saturates = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + rng.UniformInt(6), d = 1 + rng.UniformInt(8);
    Tensor x0 = Tensor::Matrix(n, d);
    for (double& v : x0.data()) v = rng.Normal();
    std::vector<double> budgets(n);
    for (double& b : budgets) b = rng.Uniform() * 2.0;
    PerturbationState st = MakePerturbationState(x0, budgets, TokenSeq{});
    const double alpha = 0.01 + 0.5 * rng.Uniform();
    const int steps = 1 + static_cast<int>(rng.UniformInt(20));
    for (int t = 0; t < steps; ++t) {
      Tensor g = Tensor::Matrix(n, d);
      for (double& v : g.data()) v = rng.Normal();
      PgdStep(st, g, alpha);
      const Tensor delta = st.Delta();
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j) {
          worst_excess = std::max(worst_excess, std::abs(delta.at(i, j)) - budgets[i]);
        }
      }
    }
    const Tensor before = st.current;
    PgdStep(st, Tensor::Matrix(n, d), alpha);
    fixed_point = fixed_point && st.current == before;

    // constant sign from a fresh start
    PerturbationState sat = MakePerturbationState(x0, budgets, TokenSeq{});
    Tensor ones = Tensor::Matrix(n, d, 1.0);
    const double eps = budgets[0];
    const int need = static_cast<int>(std::ceil(eps / alpha));
    for (int t = 0; t < need; ++t) PgdStep(sat, ones, alpha);
    const Tensor delta = sat.Delta();
    for (size_t j = 0; j < d; ++j) {
      saturates = saturates && std::abs(delta.at(0, j) - eps) <= kBallTol;
    }
  }
  const double secs = Seconds(t0);
  const bool pass = worst_excess <= kBallTol && fixed_point && saturates &&
                    secs < kStepMaxSeconds;
  return {pass, Fmt("1000 sequences, max ball excess %.1e, zero-grad fixed point %s, "
                    "saturation %s, %.2fs",
                    worst_excess, fixed_point ? "yes" : "no", saturates ? "yes" : "no", secs)};
}

// ---- 3: oracle equivalences ----

Verdict OracleEquivalences() {
  const testing::World& w = testing::SmallWorld();
  CounterRng rng(303);
  int sal_ok = 0, cand_ok = 0, proj_ok = 0;
  for (int k = 0; k < kOracleInstances; ++k) {
    const LabeledExample& ex = w.split.test[k];
    const TokenSeq seq = Tokenize(w.vocab, ex.text);
    std::vector<bool> mask(seq.size(), false);
    for (size_t i = 1; i < seq.size(); ++i) mask[i] = rng.Bernoulli(0.8);

    QueryCountingVictim v(w.victim);
    sal_ok += TokenSaliency(v, seq, ex.label, mask) ==
              oracle::MaskingSaliency(w.victim, seq.ids, ex.label, mask);

    const size_t pos = 1 + rng.UniformInt(seq.size() - 1);
    const int kk = 1 + static_cast<int>(rng.UniformInt(10));
    const double tau = k % 2 ? 0.0 : 0.005 * static_cast<double>(rng.UniformInt(10));
    cand_ok += GenerateCandidates(w.mlm, seq, pos, kk, tau) ==
               oracle::SortFilterCandidates(MlmPredict(w.mlm, seq, pos), seq.ids[pos], kk, tau);

    std::vector<std::vector<Candidate>> cands(seq.size());
    std::vector<double> sal(seq.size(), 0.0);
    for (size_t i = 1; i < seq.size(); ++i) {
      if (mask[i]) cands[i] = GenerateCandidates(w.mlm, seq, i, 8, 0.0);
      sal[i] = static_cast<double>(rng.UniformInt(3));
    }
    // Half the instances use a coarse integer embedding so distance ties occur.
    Tensor emb = w.victim.embedding;
    if (k % 2) {
      for (double& x : emb.data()) x = static_cast<double>(rng.UniformInt(3)) - 1.0;
    }
    Tensor x0 = Tensor::Matrix(seq.size(), emb.cols());
    for (size_t i = 0; i < seq.size(); ++i) {
      for (size_t j = 0; j < emb.cols(); ++j) x0.at(i, j) = emb.at(seq.ids[i], j);
    }
    PerturbationState st =
        MakePerturbationState(x0, std::vector<double>(seq.size(), 2.0), seq);
    for (size_t i = 1; i < seq.size(); ++i) {
      for (size_t j = 0; j < emb.cols(); ++j) {
        st.current.at(i, j) +=
            k % 2 ? static_cast<double>(rng.UniformInt(3)) - 1.0 : 2.0 * rng.Normal();
      }
    }
    const TokenSeq got =
        ProjectToTokens(st, seq, cands, emb, sal, mask, 25.0, w.vocab);
    proj_ok += got.ids == oracle::NearestNeighborReadout(oracle::Rows(st.current), seq.ids,
                                                         cands, oracle::Rows(emb), sal,
                                                         mask, 25.0);
  }
  const bool pass = sal_ok == kOracleInstances && cand_ok == kOracleInstances &&
                    proj_ok == kOracleInstances;
  return {pass, Fmt("saliency %d/%d, candidates %d/%d, projection %d/%d exact", sal_ok,
                    kOracleInstances, cand_ok, kOracleInstances, proj_ok, kOracleInstances)};
}

// ---- 4: victim quality ----

Verdict VictimQuality() {
  const auto t0 = std::chrono::steady_clock::now();
  const CorpusSplit split = MakeCorpus(42, 2000);
  const Vocab vocab = BuildVocab(Texts(split.train), 1);
  TrainHyper h;
  h.seed = 42;
  const ModelParams victim = TrainClassifier(split.train, vocab, h).params;
  const double acc = CleanAccuracy(victim, vocab, split.test);
  const double secs = Seconds(t0);
  return {acc >= kVictimMinAccuracy && secs < kVictimMaxSeconds,
          Fmt("test accuracy %.4f (min %.2f), %.1fs", acc, kVictimMinAccuracy, secs)};
}

// ---- 5: attack effectiveness ----

Verdict Effectiveness() {
  const auto t0 = std::chrono::steady_clock::now();
  const Means p = MeanOverSeeds(AttackMethod::kPgd);
  const Means b = MeanOverSeeds(AttackMethod::kBaseline);
  const double secs = Seconds(t0);
  const bool acc = p.attacked <= b.attacked + kAttackedAccSlack;
  const bool q = p.queries <= kQueryRatio * b.queries;
  const bool sim = p.similarity >= b.similarity - kSimilaritySlack;
  const bool pct = p.perturb <= b.perturb + kPerturbSlack;
  const auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
  return {acc && q && sim && pct && secs < kEffectivenessMaxSeconds,
          Fmt("attacked pgd %.3f vs base %.3f [%s]; queries %.2f vs %.2f [%s]; "
              "similarity %.3f vs %.3f [%s]; perturb%% %.2f vs %.2f [%s]; %.1fs",
              p.attacked, b.attacked, mark(acc), p.queries, b.queries, mark(q), p.similarity,
              b.similarity, mark(sim), p.perturb, b.perturb, mark(pct), secs)};
}

// ---- 6: thresholded candidates ----

Verdict ThresholdStudy() {
  bool pass = true;
  std::string detail;
  for (AttackMethod m : {AttackMethod::kPgd, AttackMethod::kBaseline}) {
    const Means fixed = MeanOverSeeds(m, 0.0);
    const Means thr = MeanOverSeeds(m, kThresholdTau);
    const bool ok = thr.queries <= fixed.queries &&
                    thr.attacked - fixed.attacked <= kThresholdAccSlack;
    pass = pass && ok;
    detail += Fmt("%s tau=%g queries %.2f vs %.2f, attacked %.3f vs %.3f [%s]; ",
                  std::string(MethodName(m)).c_str(), kThresholdTau, thr.queries,
                  fixed.queries, thr.attacked, fixed.attacked, ok ? "ok" : "FAIL");
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// ---- 7: transferability ----

Verdict Transferability() {
  const Means p = MeanOverSeeds(AttackMethod::kPgd);
  const Means b = MeanOverSeeds(AttackMethod::kBaseline);
  const bool below_clean = p.transfer_attacked <= p.transfer_clean &&
                           b.transfer_attacked <= b.transfer_clean;
  const bool pgd_vs_base = p.transfer_attacked <= b.transfer_attacked + kTransferSlack;
  return {below_clean && pgd_vs_base,
          Fmt("avg_mlp clean %.3f; attacked from pgd %.3f, from baseline %.3f",
              p.transfer_clean, p.transfer_attacked, b.transfer_attacked)};
}

// ---- 8: accounting ----

Verdict Accounting() {
  const SeedRun& r = Run(42);
  Dataset data = r.eval;
  size_t salted = 0;
  for (auto& ex : data) {
    if (salted == kSaltCount) break;
    if (Predict(r.victim, Tokenize(r.vocab, ex.text).ids) == ex.label) {
      ex.label = 1 - ex.label;
      ++salted;
    }
  }
  size_t attacks = 0, bad_count = 0, bad_verify = 0, bad_skip = 0, skipped = 0;
  for (AttackMethod m : {AttackMethod::kPgd, AttackMethod::kBaseline}) {
    const AttackConfig c = Config(m, 42);
    for (const auto& ex : data) {
      QueryCountingVictim v(r.victim);
      const AttackResult res = m == AttackMethod::kPgd
                                   ? AttackPgd(v, r.mlm, r.vocab, ex, c)
                                   : AttackBaseline(v, r.mlm, r.vocab, ex, c);
      ++attacks;
      bad_count += res.queries != v.queries();
      if (res.success) {
        bad_verify += Predict(r.victim, res.adversarial.ids) == res.true_label ||
                      SemanticSimilarity(r.mlm, res.original, res.adversarial) < c.sim_min;
      }
      const bool wrong_clean = Predict(r.victim, res.original.ids) != ex.label;
      if (wrong_clean) {
        ++skipped;
        bad_skip += !res.skipped || res.queries != 1 || !(res.adversarial == res.original);
      } else {
        bad_skip += res.skipped;
      }
    }
  }
  const bool pass = salted == kSaltCount && bad_count == 0 && bad_verify == 0 &&
                    bad_skip == 0 && skipped >= 2 * kSaltCount;
  return {pass, Fmt("%zu attacks (%zu salted, %zu skipped): counter mismatches %zu, "
                    "unverified successes %zu, skip violations %zu",
                    attacks, salted, skipped, bad_count, bad_verify, bad_skip)};
}

// ---- 9: CLI determinism ----

std::string FileDigest(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Fmt("%016llx", static_cast<unsigned long long>(Fnv1a(bytes)));
}

Verdict CliDeterminism() {
  std::map<std::string, std::string> digests[2];
  bool all_ok = true;
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path root = testing::TempDir("accept_det_" + std::to_string(rep));
    const auto s = [&](const char* rel) { return (root / rel).string(); };
    const std::vector<std::vector<std::string>> cmds = {
        {"make-corpus", "--out", s("corpus"), "--seed", "42", "--size", "2000"},
        {"train", "--data", s("corpus"), "--out", s("victim"), "--seed", "42"},
        {"train", "--task", "mlm", "--data", s("corpus"), "--out", s("mlm"), "--seed", "42"},
        {"attack", "--victim", s("victim"), "--mlm", s("mlm"), "--data",
         s("corpus/test.jsonl"), "--out", s("results.jsonl"), "--seed", "42"},
        {"evaluate", "--results", s("results.jsonl"), "--victim", s("victim"), "--data",
         s("corpus/test.jsonl"), "--out", s("report.json"), "--seed", "42"},
    };
    for (const auto& args : cmds) {
      std::ostringstream out, err;
      all_ok = all_ok && cli::Run(args, out, err) == cli::kExitOk;
    }
    // Canonical outputs; run_config.json files echo the output path and are
    // compared separately below.
    for (const char* rel :
         {"corpus/train.jsonl", "corpus/test.jsonl", "corpus/vocab.json",
          "victim/manifest.json", "victim/params.bin", "victim/vocab.json",
          "victim/training_log.json", "mlm/manifest.json", "mlm/params.bin",
          "mlm/training_log.json", "results.jsonl", "report.json"}) {
      digests[rep][rel] = fs::exists(root / rel) ? FileDigest(root / rel) : "missing";
    }
  }
  size_t same = 0;
  for (const auto& [rel, d] : digests[0]) same += d != "missing" && digests[1][rel] == d;
  return {all_ok && same == digests[0].size(),
          Fmt("%zu/%zu canonical files byte-identical across reruns (report %s)", same,
              digests[0].size(), digests[0]["report.json"].c_str())};
}

// ---- 10: result contract ----

Verdict ResultContract() {
  size_t checked = 0, violations = 0;
  const auto check = [&](const AttackResult& r, double sim_min, const SeedRun& run) {
    ++checked;
    bool bad = !ContractViolations(r, sim_min).empty();
    if (r.success) {
      bad = bad || Predict(run.victim, r.adversarial.ids) == r.true_label ||
            r.similarity < sim_min;
    }
    bad = bad || ((r.perturb_pct == 0.0) != (r.adversarial == r.original));
    violations += bad;
  };
  for (uint64_t seed : kSeeds) {
    for (AttackMethod m : {AttackMethod::kPgd, AttackMethod::kBaseline}) {
      for (double tau : {0.0, kThresholdTau}) {
        for (const auto& r : Attack(seed, m, tau).results) check(r, 0.8, Run(seed));
      }
      AttackConfig zero = Config(m, seed);
      zero.max_iters = 0;
      const SeedRun& run = Run(seed);
      for (const auto& r : RunAttacks(run.victim, run.mlm, run.vocab, run.eval, zero, 1)) {
        check(r, zero.sim_min, run);
      }
    }
  }
  return {checked > 0 && violations == 0,
          Fmt("%zu results checked, %zu violations", checked, violations)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> fn;
};

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> all = {
      {1, "gradient correctness", GradientCheck},
      {2, "sign-step invariants", StepInvariants},
      {3, "oracle equivalences", OracleEquivalences},
      {4, "victim quality gate", VictimQuality},
      {5, "attack effectiveness", Effectiveness},
      {6, "thresholded-K study", ThresholdStudy},
      {7, "transferability", Transferability},
      {8, "accounting exactness", Accounting},
      {9, "determinism", CliDeterminism},
      {10, "result contract", ResultContract},
  };
  return all;
}

}  // namespace
}  // namespace textpgd::acceptance

int main(int argc, char** argv) {
  using namespace textpgd::acceptance;
  CLI::App app{"TextPGD acceptance checks"};
  std::vector<int> only;
  app.add_option("--criterion", only, "Criterion number(s) to run (default: all)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const Criterion& c : Criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
