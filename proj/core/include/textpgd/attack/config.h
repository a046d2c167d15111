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

#ifndef TEXTPGD_ATTACK_CONFIG_H_
#define TEXTPGD_ATTACK_CONFIG_H_

#include <cstdint>
#include <string_view>

#include <nlohmann/json.hpp>

namespace textpgd {

enum class AttackMethod { kPgd, kBaseline };

std::string_view MethodName(AttackMethod m);
AttackMethod ParseMethod(std::string_view name);

// All attack hyperparameters. Distances are in victim embedding units.
struct AttackConfig {
  AttackMethod method = AttackMethod::kPgd;
  double alpha = 1.6;          // sign-step size, 0.2 * eps_base
  double eps_base = 8.0;       // l-inf budget; embeddings have unit rms
  double lambda_sem = 1.0;     // weight of the (1 - cos) penalty
  int k = 8;                   // candidates per position
  double tau = 0.0;            // MLM probability floor; 0 = fixed-K mode
  double sim_min = 0.8;        // success needs cosine >= sim_min
  int max_iters = 50;
  double max_perturb_pct = 25.0;
  bool adaptive_budget = true;
  int early_stop_patience = 5;
  double early_stop_tol = 1e-4;
  uint64_t seed = 0;
};

// Throws kInvalidArgument describing the first out-of-range field.
void Validate(const AttackConfig& c);

// Keys: method, alpha, eps_base, lambda_sem, K, tau, sim_min, max_iters,
// max_perturb_pct, adaptive_budget, early_stop_patience, early_stop_tol,
// seed.
nlohmann::json ToJson(const AttackConfig& c);
// Missing keys keep the values in `base`; unknown keys are rejected.
AttackConfig AttackConfigFromJson(const nlohmann::json& j,
                                  AttackConfig base = AttackConfig{});

}  // namespace textpgd

#endif  // TEXTPGD_ATTACK_CONFIG_H_
