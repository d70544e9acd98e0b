#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpsrl/graph.hpp"
#include "cpsrl/rng.hpp"

namespace cpsrl {

inline constexpr long long kDefaultStateCap = 1'000'000;

// Deterministic non-stationary policy over the flattened spaces: policy[h][s]
// is the flat action taken at step h in flat state s.
using Policy = std::vector<std::vector<int>>;

// Factored MDP. Left variables are the d_s state features followed by the d_a
// action features; each output factor j has a row-stochastic table indexed by
// the mixed-radix encoding of x[parents[j]] and a mean-reward table in [0, 1]
// indexed the same way. Flat state and action indices use assignment_index
// over the state-feature and action-feature supports respectively.
struct Fmdp {
  CausalGraph graph;          // d_x = d_s + d_a, d_y = d_s
  std::vector<int> supports;  // size d_x, per-variable cardinalities
  int action_vars = 0;        // d_a
  int max_parents = 0;        // declared sparseness bound
  int horizon = 0;
  bool bernoulli_rewards = false;  // emit Bernoulli(mean) instead of the mean
  std::vector<std::vector<double>> transition;  // [j][row * n_j + next]
  std::vector<std::vector<double>> reward;      // [j][row]
  std::vector<double> initial;                  // over flat states

  int state_vars() const { return graph.d_y; }
  std::span<const int> state_supports() const;
  std::span<const int> action_supports() const;
  long long state_count() const;
  long long action_count() const;
  long long factor_rows(int j) const;
  int outcome_support(int j) const { return supports[static_cast<std::size_t>(j)]; }

  long long encode_state(std::span<const int> features) const;
  std::vector<int> decode_state(long long s) const;
  long long encode_action(std::span<const int> features) const;
  std::vector<int> decode_action(long long a) const;
};

// Flat episodic MDP produced by flatten(); transition is row-major
// [(s * A + a) * S + s'] and reward is [s * A + a].
struct TabularMdp {
  long long num_states = 0;
  long long num_actions = 0;
  int horizon = 0;
  std::vector<double> transition;
  std::vector<double> reward;
  std::vector<double> initial;

  std::span<const double> row(long long s, long long a) const {
    return {transition.data() + (s * num_actions + a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
};

// One environment step: the joint input assignment (state then action
// features), the sampled next-state features, and the per-factor rewards.
// Rewards are observable per factor.
struct Transition {
  int step = 0;
  std::vector<int> x;
  std::vector<int> next;
  std::vector<double> reward;
};

// Returns every invariant violation with factor/row coordinates; empty means
// the instance is well formed. Diagnostic only, never throws.
std::vector<std::string> validate(const Fmdp& f);

// Joint model: P[s,a][s'] = prod_j p_j(y'[j] | x[z_j]),
// R[s,a] = sum_j r_j(x[z_j]). Throws if the flat state space exceeds the cap.
TabularMdp flatten(const Fmdp& f, long long state_cap = kDefaultStateCap);

// Samples each next-state factor independently from its table row and emits
// the per-factor rewards.
std::pair<std::vector<int>, std::vector<double>> step(const Fmdp& f,
                                                      std::span<const int> x,
                                                      Rng& rng);

// Plays `policy` for a full horizon starting from the initial distribution.
std::vector<Transition> rollout(const Fmdp& f, const Policy& policy, Rng& rng);

}  // namespace cpsrl
