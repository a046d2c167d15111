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

#include "textpgd/attack/config.h"

#include <cmath>
#include <set>
#include <string>

#include "textpgd/util/error.h"

namespace textpgd {

std::string_view MethodName(AttackMethod m) {
  return m == AttackMethod::kPgd ? "pgd" : "baseline";
}

AttackMethod ParseMethod(std::string_view name) {
  if (name == "pgd") return AttackMethod::kPgd;
  if (name == "baseline") return AttackMethod::kBaseline;
  Fail(ErrorCode::kInvalidArgument,
       "unknown attack method '" + std::string(name) + "'");
}

void Validate(const AttackConfig& c) {
  const auto check = [](bool ok, const char* msg) {
    Require(ok, ErrorCode::kInvalidArgument, std::string("attack config: ") + msg);
  };
  check(std::isfinite(c.eps_base) && c.eps_base > 0, "eps_base must be > 0");
  check(std::isfinite(c.alpha) && c.alpha > 0, "alpha must be > 0");
  check(c.alpha <= c.eps_base, "alpha must not exceed eps_base");
  check(std::isfinite(c.lambda_sem) && c.lambda_sem >= 0, "lambda_sem must be >= 0");
  check(c.k >= 1, "K must be >= 1");
  check(c.tau >= 0 && c.tau <= 1, "tau must be in [0, 1]");
  check(c.sim_min >= -1 && c.sim_min <= 1, "sim_min must be in [-1, 1]");
  check(c.max_iters >= 0, "max_iters must be >= 0");
  check(c.max_perturb_pct > 0 && c.max_perturb_pct <= 100,
        "max_perturb_pct must be in (0, 100]");
  check(c.early_stop_patience >= 1, "early_stop_patience must be >= 1");
  check(std::isfinite(c.early_stop_tol) && c.early_stop_tol > 0,
        "early_stop_tol must be > 0");
}

nlohmann::json ToJson(const AttackConfig& c) {
  return nlohmann::json{{"method", std::string(MethodName(c.method))},
                        {"alpha", c.alpha},
                        {"eps_base", c.eps_base},
                        {"lambda_sem", c.lambda_sem},
                        {"K", c.k},
                        {"tau", c.tau},
                        {"sim_min", c.sim_min},
                        {"max_iters", c.max_iters},
                        {"max_perturb_pct", c.max_perturb_pct},
                        {"adaptive_budget", c.adaptive_budget},
                        {"early_stop_patience", c.early_stop_patience},
                        {"early_stop_tol", c.early_stop_tol},
                        {"seed", c.seed}};
}

AttackConfig AttackConfigFromJson(const nlohmann::json& j, AttackConfig base) {
  Require(j.is_object(), ErrorCode::kDataFormat, "attack config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "method",          "alpha",   "eps_base",        "lambda_sem",
      "K",               "tau",     "sim_min",         "max_iters",
      "max_perturb_pct", "adaptive_budget", "early_stop_patience",
      "early_stop_tol",  "seed"};
  for (const auto& [key, value] : j.items()) {
    Require(kKnown.count(key) > 0, ErrorCode::kDataFormat,
            "unknown attack config key '" + key + "'");
  }
  try {
    if (j.contains("method")) base.method = ParseMethod(j["method"].get<std::string>());
    if (j.contains("alpha")) base.alpha = j["alpha"].get<double>();
    if (j.contains("eps_base")) base.eps_base = j["eps_base"].get<double>();
    if (j.contains("lambda_sem")) base.lambda_sem = j["lambda_sem"].get<double>();
    if (j.contains("K")) base.k = j["K"].get<int>();
    if (j.contains("tau")) base.tau = j["tau"].get<double>();
    if (j.contains("sim_min")) base.sim_min = j["sim_min"].get<double>();
    if (j.contains("max_iters")) base.max_iters = j["max_iters"].get<int>();
    if (j.contains("max_perturb_pct")) {
      base.max_perturb_pct = j["max_perturb_pct"].get<double>();
    }
    if (j.contains("adaptive_budget")) {
      base.adaptive_budget = j["adaptive_budget"].get<bool>();
    }
    if (j.contains("early_stop_patience")) {
      base.early_stop_patience = j["early_stop_patience"].get<int>();
    }
    if (j.contains("early_stop_tol")) {
      base.early_stop_tol = j["early_stop_tol"].get<double>();
    }
    if (j.contains("seed")) base.seed = j["seed"].get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kDataFormat, std::string("attack config: ") + e.what());
  }
  return base;
}

}  // namespace textpgd
