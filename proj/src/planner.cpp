#include "cpsrl/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpsrl {

namespace {

double initial_expectation(const TabularMdp& m, const std::vector<double>& v0) {
  double value = 0.0;
  for (long long s = 0; s < m.num_states; ++s) {
    value += m.initial[static_cast<std::size_t>(s)] * v0[static_cast<std::size_t>(s)];
  }
  return value;
}

void check_policy(const TabularMdp& m, const Policy& policy) {
  if (static_cast<int>(policy.size()) < m.horizon) {
    throw std::invalid_argument("evaluate_policy: policy shorter than horizon");
  }
  for (int h = 0; h < m.horizon; ++h) {
    const auto& step = policy[static_cast<std::size_t>(h)];
    if (static_cast<long long>(step.size()) != m.num_states) {
      throw std::invalid_argument("evaluate_policy: policy step " + std::to_string(h) +
                                  " not defined for every state");
    }
    for (int a : step) {
      if (a < 0 || a >= m.num_actions) {
        throw std::invalid_argument("evaluate_policy: action out of range");
      }
    }
  }
}

}  // namespace

PlanResult backward_induction(const TabularMdp& m) {
  const long long S = m.num_states;
  const long long A = m.num_actions;
  PlanResult result;
  result.values.assign(static_cast<std::size_t>(m.horizon) + 1,
                       std::vector<double>(static_cast<std::size_t>(S), 0.0));
  result.policy.assign(static_cast<std::size_t>(m.horizon),
                       std::vector<int>(static_cast<std::size_t>(S), 0));
  for (int h = m.horizon - 1; h >= 0; --h) {
    const std::vector<double>& next = result.values[static_cast<std::size_t>(h) + 1];
    std::vector<double>& here = result.values[static_cast<std::size_t>(h)];
    std::vector<int>& act = result.policy[static_cast<std::size_t>(h)];
    for (long long s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (long long a = 0; a < A; ++a) {
        const double* row = m.transition.data() + (s * A + a) * S;
        double q = m.reward[static_cast<std::size_t>(s * A + a)];
        for (long long s2 = 0; s2 < S; ++s2) {
          q += row[s2] * next[static_cast<std::size_t>(s2)];
        }
        if (q > best) {  // strict: ties keep the lowest action index
          best = q;
          best_a = static_cast<int>(a);
        }
      }
      here[static_cast<std::size_t>(s)] = best;
      act[static_cast<std::size_t>(s)] = best_a;
    }
  }
  result.initial_value = initial_expectation(m, result.values[0]);
  return result;
}

double evaluate_policy(const TabularMdp& m, const Policy& policy) {
  check_policy(m, policy);
  const long long S = m.num_states;
  const long long A = m.num_actions;
  std::vector<double> next(static_cast<std::size_t>(S), 0.0);
  std::vector<double> here(static_cast<std::size_t>(S), 0.0);
  for (int h = m.horizon - 1; h >= 0; --h) {
    const auto& step = policy[static_cast<std::size_t>(h)];
    for (long long s = 0; s < S; ++s) {
      const long long a = step[static_cast<std::size_t>(s)];
      const double* row = m.transition.data() + (s * A + a) * S;
      double v = m.reward[static_cast<std::size_t>(s * A + a)];
      for (long long s2 = 0; s2 < S; ++s2) {
        v += row[s2] * next[static_cast<std::size_t>(s2)];
      }
      here[static_cast<std::size_t>(s)] = v;
    }
    std::swap(here, next);
  }
  return initial_expectation(m, next);
}

double brute_force_optimal(const TabularMdp& m, double policy_cap) {
  const long long S = m.num_states;
  const long long A = m.num_actions;
  const long long cells = S * m.horizon;
  if (std::pow(static_cast<double>(A), static_cast<double>(cells)) > policy_cap) {
    throw std::length_error("brute_force_optimal: policy space exceeds cap");
  }
  Policy policy(static_cast<std::size_t>(m.horizon),
                std::vector<int>(static_cast<std::size_t>(S), 0));
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    best = std::max(best, evaluate_policy(m, policy));
    // Advance the policy like a mixed-radix odometer.
    long long cell = 0;
    for (; cell < cells; ++cell) {
      int& a = policy[static_cast<std::size_t>(cell / S)][static_cast<std::size_t>(cell % S)];
      if (++a < A) break;
      a = 0;
    }
    if (cell == cells) break;
  }
  return best;
}

}  // namespace cpsrl
