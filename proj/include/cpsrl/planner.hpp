#pragma once

#include <vector>

#include "cpsrl/fmdp.hpp"

namespace cpsrl {

// values[h][s] is the optimal (or on-policy) return-to-go from state s at
// step h; values[H] is identically zero.
using ValueTable = std::vector<std::vector<double>>;

struct PlanResult {
  Policy policy;
  ValueTable values;
  double initial_value = 0.0;  // expectation of values[0] under the initial distribution
};

// Exact finite-horizon dynamic programming:
// V_h(s) = max_a [ R(s,a) + sum_{s'} P(s,a,s') V_{h+1}(s') ],
// ties broken toward the lowest action index.
PlanResult backward_induction(const TabularMdp& m);

// Exact linear evaluation of a deterministic non-stationary policy; returns
// the value under the initial distribution.
double evaluate_policy(const TabularMdp& m, const Policy& policy);

// Test oracle: maximum of evaluate_policy over every deterministic
// non-stationary policy. Throws if the policy space exceeds `policy_cap`.
double brute_force_optimal(const TabularMdp& m, double policy_cap = 1e6);

}  // namespace cpsrl
