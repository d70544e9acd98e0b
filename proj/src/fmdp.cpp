#include "cpsrl/fmdp.hpp"

#include <cmath>
#include <stdexcept>

namespace cpsrl {

namespace {

constexpr double kRowSumTolerance = 1e-12;

}  // namespace

std::span<const int> Fmdp::state_supports() const {
  return {supports.data(), static_cast<std::size_t>(state_vars())};
}

std::span<const int> Fmdp::action_supports() const {
  return {supports.data() + state_vars(), static_cast<std::size_t>(action_vars)};
}

long long Fmdp::state_count() const { return support_product(state_supports()); }

long long Fmdp::action_count() const { return support_product(action_supports()); }

long long Fmdp::factor_rows(int j) const {
  long long rows = 1;
  for (int i : graph.parents[static_cast<std::size_t>(j)]) {
    rows *= supports[static_cast<std::size_t>(i)];
  }
  return rows;
}

long long Fmdp::encode_state(std::span<const int> features) const {
  return assignment_index(features, state_supports());
}

std::vector<int> Fmdp::decode_state(long long s) const {
  return assignment_decode(s, state_supports());
}

long long Fmdp::encode_action(std::span<const int> features) const {
  return assignment_index(features, action_supports());
}

std::vector<int> Fmdp::decode_action(long long a) const {
  return assignment_decode(a, action_supports());
}

std::vector<std::string> validate(const Fmdp& f) {
  std::vector<std::string> violations;
  try {
    f.graph.check();
  } catch (const std::exception& e) {
    violations.emplace_back(e.what());
    return violations;  // structure is broken, table checks would misindex
  }
  if (static_cast<int>(f.supports.size()) != f.graph.d_x) {
    violations.push_back("supports: expected one entry per left variable");
    return violations;
  }
  for (std::size_t i = 0; i < f.supports.size(); ++i) {
    if (f.supports[i] < 1) {
      violations.push_back("supports[" + std::to_string(i) + "]: must be >= 1");
    }
  }
  if (f.action_vars < 0 || f.graph.d_y + f.action_vars != f.graph.d_x) {
    violations.push_back("action_vars: state and action features must partition the left variables");
  }
  if (f.horizon < 1) violations.push_back("horizon: must be >= 1");
  if (f.graph.sparseness() > f.max_parents) {
    violations.push_back("graph: sparseness " + std::to_string(f.graph.sparseness()) +
                         " exceeds declared bound " + std::to_string(f.max_parents));
  }
  if (!violations.empty()) return violations;

  if (static_cast<int>(f.transition.size()) != f.graph.d_y ||
      static_cast<int>(f.reward.size()) != f.graph.d_y) {
    violations.push_back("tables: expected one transition and one reward table per factor");
    return violations;
  }
  for (int j = 0; j < f.graph.d_y; ++j) {
    const long long rows = f.factor_rows(j);
    const int n = f.outcome_support(j);
    const auto& table = f.transition[static_cast<std::size_t>(j)];
    const auto& rewards = f.reward[static_cast<std::size_t>(j)];
    if (static_cast<long long>(table.size()) != rows * n) {
      violations.push_back("factor " + std::to_string(j) + ": transition table has " +
                           std::to_string(table.size()) + " entries, expected " +
                           std::to_string(rows * n));
      continue;
    }
    if (static_cast<long long>(rewards.size()) != rows) {
      violations.push_back("factor " + std::to_string(j) + ": reward table has " +
                           std::to_string(rewards.size()) + " entries, expected " +
                           std::to_string(rows));
      continue;
    }
    for (long long row = 0; row < rows; ++row) {
      double sum = 0.0;
      for (int v = 0; v < n; ++v) {
        const double p = table[static_cast<std::size_t>(row * n + v)];
        if (p < 0.0) {
          violations.push_back("factor " + std::to_string(j) + " row " +
                               std::to_string(row) + ": negative probability");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        violations.push_back("factor " + std::to_string(j) + " row " +
                             std::to_string(row) + ": row not normalized (sum " +
                             std::to_string(sum) + ")");
      }
      const double r = rewards[static_cast<std::size_t>(row)];
      if (r < 0.0 || r > 1.0) {
        violations.push_back("factor " + std::to_string(j) + " row " +
                             std::to_string(row) + ": reward out of range [0, 1]");
      }
    }
  }
  const long long S = f.state_count();
  if (static_cast<long long>(f.initial.size()) != S) {
    violations.push_back("initial: expected one entry per flat state");
  } else {
    double sum = 0.0;
    for (std::size_t s = 0; s < f.initial.size(); ++s) {
      if (f.initial[s] < 0.0) {
        violations.push_back("initial[" + std::to_string(s) + "]: negative probability");
      }
      sum += f.initial[s];
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      violations.push_back("initial: distribution not normalized (sum " +
                           std::to_string(sum) + ")");
    }
  }
  return violations;
}

TabularMdp flatten(const Fmdp& f, long long state_cap) {
  const long long S = f.state_count();
  if (S > state_cap) {
    throw std::length_error("flatten: flat state space of size " + std::to_string(S) +
                            " exceeds cap " + std::to_string(state_cap));
  }
  const long long A = f.action_count();
  const int d_y = f.graph.d_y;

  TabularMdp m;
  m.num_states = S;
  m.num_actions = A;
  m.horizon = f.horizon;
  m.initial = f.initial;
  m.transition.assign(static_cast<std::size_t>(S * A * S), 1.0);
  m.reward.assign(static_cast<std::size_t>(S * A), 0.0);

  // Feature value of each flat next state, laid out per factor for the inner
  // product loop.
  std::vector<std::vector<int>> next_feature(static_cast<std::size_t>(d_y),
                                             std::vector<int>(static_cast<std::size_t>(S)));
  for (long long s2 = 0; s2 < S; ++s2) {
    const std::vector<int> feats = f.decode_state(s2);
    for (int j = 0; j < d_y; ++j) {
      next_feature[static_cast<std::size_t>(j)][static_cast<std::size_t>(s2)] = feats[static_cast<std::size_t>(j)];
    }
  }

  std::vector<int> x(static_cast<std::size_t>(f.graph.d_x));
  for (long long s = 0; s < S; ++s) {
    const std::vector<int> state_feats = f.decode_state(s);
    std::copy(state_feats.begin(), state_feats.end(), x.begin());
    for (long long a = 0; a < A; ++a) {
      const std::vector<int> action_feats = f.decode_action(a);
      std::copy(action_feats.begin(), action_feats.end(),
                x.begin() + f.state_vars());
      double* out = m.transition.data() + (s * A + a) * S;
      double total_reward = 0.0;
      for (int j = 0; j < d_y; ++j) {
        const long long row = scoped_row_index(x, f.graph.parents[static_cast<std::size_t>(j)], f.supports);
        const int n = f.outcome_support(j);
        const double* row_probs =
            f.transition[static_cast<std::size_t>(j)].data() + row * n;
        total_reward += f.reward[static_cast<std::size_t>(j)][static_cast<std::size_t>(row)];
        const int* feats = next_feature[static_cast<std::size_t>(j)].data();
        for (long long s2 = 0; s2 < S; ++s2) {
          out[s2] *= row_probs[feats[s2]];
        }
      }
      m.reward[static_cast<std::size_t>(s * A + a)] = total_reward;
    }
  }
  return m;
}

std::pair<std::vector<int>, std::vector<double>> step(const Fmdp& f,
                                                      std::span<const int> x,
                                                      Rng& rng) {
  if (static_cast<int>(x.size()) != f.graph.d_x) {
    throw std::invalid_argument("step: assignment has wrong arity");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= f.supports[i]) {
      throw std::invalid_argument("step: variable " + std::to_string(i) +
                                  " outside its support");
    }
  }
  const int d_y = f.graph.d_y;
  std::vector<int> next(static_cast<std::size_t>(d_y));
  std::vector<double> reward(static_cast<std::size_t>(d_y));
  std::vector<long long> row(static_cast<std::size_t>(d_y));
  for (int j = 0; j < d_y; ++j) {
    row[static_cast<std::size_t>(j)] =
        scoped_row_index(x, f.graph.parents[static_cast<std::size_t>(j)], f.supports);
    const int n = f.outcome_support(j);
    const std::span<const double> probs{
        f.transition[static_cast<std::size_t>(j)].data() + row[static_cast<std::size_t>(j)] * n,
        static_cast<std::size_t>(n)};
    next[static_cast<std::size_t>(j)] = static_cast<int>(rng.categorical(probs));
  }
  for (int j = 0; j < d_y; ++j) {
    const double mean =
        f.reward[static_cast<std::size_t>(j)][static_cast<std::size_t>(row[static_cast<std::size_t>(j)])];
    reward[static_cast<std::size_t>(j)] =
        f.bernoulli_rewards ? (rng.uniform01() < mean ? 1.0 : 0.0) : mean;
  }
  return {std::move(next), std::move(reward)};
}

std::vector<Transition> rollout(const Fmdp& f, const Policy& policy, Rng& rng) {
  if (static_cast<int>(policy.size()) < f.horizon) {
    throw std::invalid_argument("rollout: policy not defined for the full horizon");
  }
  const long long S = f.state_count();
  const long long A = f.action_count();
  std::vector<Transition> trajectory;
  trajectory.reserve(static_cast<std::size_t>(f.horizon));

  long long s = static_cast<long long>(rng.categorical(f.initial));
  for (int h = 0; h < f.horizon; ++h) {
    const auto& step_policy = policy[static_cast<std::size_t>(h)];
    if (static_cast<long long>(step_policy.size()) != S) {
      throw std::invalid_argument("rollout: policy step " + std::to_string(h) +
                                  " not defined for every state");
    }
    const long long a = step_policy[static_cast<std::size_t>(s)];
    if (a < 0 || a >= A) {
      throw std::invalid_argument("rollout: policy action out of range");
    }
    Transition t;
    t.step = h;
    t.x = f.decode_state(s);
    const std::vector<int> action_feats = f.decode_action(a);
    t.x.insert(t.x.end(), action_feats.begin(), action_feats.end());
    auto [next, reward] = step(f, t.x, rng);
    t.next = std::move(next);
    t.reward = std::move(reward);
    s = f.encode_state(t.next);
    trajectory.push_back(std::move(t));
  }
  return trajectory;
}

}  // namespace cpsrl
