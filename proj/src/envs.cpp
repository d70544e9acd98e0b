#include "cpsrl/envs.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cpsrl {

namespace {

// Uniform subset of `size` elements from `pool`, returned sorted.
Scope random_subset(const std::vector<int>& pool, int size, Rng& rng) {
  std::vector<int> items = pool;
  for (int i = 0; i < size; ++i) {
    const std::size_t pick =
        static_cast<std::size_t>(i) +
        static_cast<std::size_t>(rng.uniform_below(items.size() - static_cast<std::size_t>(i)));
    std::swap(items[static_cast<std::size_t>(i)], items[pick]);
  }
  Scope out(items.begin(), items.begin() + size);
  std::sort(out.begin(), out.end());
  return out;
}

CausalGraph reveal(const CausalGraph& truth, int revealed, bool clamp, Rng& rng) {
  truth.check();
  if (revealed < 0) throw std::invalid_argument("reveal_prior: revealed must be >= 0");
  CausalGraph prior;
  prior.d_x = truth.d_x;
  prior.d_y = truth.d_y;
  prior.parents.reserve(truth.parents.size());
  for (int j = 0; j < truth.d_y; ++j) {
    const Scope& z = truth.parents[static_cast<std::size_t>(j)];
    int count = revealed;
    if (static_cast<int>(z.size()) < revealed) {
      if (!clamp) {
        throw std::invalid_argument("reveal_prior: factor " + std::to_string(j) +
                                    " has only " + std::to_string(z.size()) +
                                    " parents, cannot reveal " + std::to_string(revealed));
      }
      count = static_cast<int>(z.size());
    }
    prior.parents.push_back(random_subset(z, count, rng));
  }
  return prior;
}

}  // namespace

Fmdp make_random_fmdp(int d_x, int d_y, int max_parents, int support,
                      int horizon, Rng& rng) {
  if (d_y < 1 || d_y >= d_x) {
    throw std::invalid_argument("make_random_fmdp: require 1 <= d_y < d_x");
  }
  if (max_parents < 2 || max_parents > d_x) {
    throw std::invalid_argument("make_random_fmdp: require 2 <= max_parents <= d_x");
  }
  if (support < 1) throw std::invalid_argument("make_random_fmdp: support must be >= 1");
  if (horizon < 1) throw std::invalid_argument("make_random_fmdp: horizon must be >= 1");

  Fmdp f;
  f.graph.d_x = d_x;
  f.graph.d_y = d_y;
  f.supports.assign(static_cast<std::size_t>(d_x), support);
  f.action_vars = d_x - d_y;
  f.max_parents = max_parents;
  f.horizon = horizon;

  std::vector<int> all_vars(static_cast<std::size_t>(d_x));
  std::iota(all_vars.begin(), all_vars.end(), 0);
  for (int j = 0; j < d_y; ++j) {
    // Every state variable keeps at least two causal parents.
    const int size =
        2 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_parents - 1)));
    f.graph.parents.push_back(random_subset(all_vars, size, rng));
  }

  const std::vector<double> ones(static_cast<std::size_t>(support), 1.0);
  f.transition.resize(static_cast<std::size_t>(d_y));
  f.reward.resize(static_cast<std::size_t>(d_y));
  for (int j = 0; j < d_y; ++j) {
    const long long rows = f.factor_rows(j);
    std::vector<double>& table = f.transition[static_cast<std::size_t>(j)];
    table.resize(static_cast<std::size_t>(rows * support));
    for (long long row = 0; row < rows; ++row) {
      rng.dirichlet_into(ones, {table.data() + row * support,
                                static_cast<std::size_t>(support)});
    }
    std::vector<double>& rewards = f.reward[static_cast<std::size_t>(j)];
    rewards.resize(static_cast<std::size_t>(rows));
    for (long long row = 0; row < rows; ++row) {
      rewards[static_cast<std::size_t>(row)] = rng.uniform01();
    }
  }

  const long long S = f.state_count();
  f.initial.assign(static_cast<std::size_t>(S), 1.0 / static_cast<double>(S));
  return f;
}

CausalGraph reveal_prior(const CausalGraph& truth, int revealed, Rng& rng) {
  return reveal(truth, revealed, false, rng);
}

CausalGraph reveal_prior_clamped(const CausalGraph& truth, int revealed,
                                 Rng& rng) {
  return reveal(truth, revealed, true, rng);
}

Fmdp make_taxi(int rows, int cols, int horizon) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("make_taxi: grid must be at least 2x2");
  }
  if (horizon < 1) throw std::invalid_argument("make_taxi: horizon must be >= 1");

  enum : int { kNorth = 0, kSouth, kEast, kWest, kPickup, kDropoff, kNumActions };
  // Variable layout: 0 = taxi row, 1 = taxi column, 2 = passenger in taxi,
  // 3 = destination (constant), 4 = action.
  Fmdp f;
  f.graph.d_x = 5;
  f.graph.d_y = 4;
  f.graph.parents = {{0, 4}, {1, 4}, {0, 1, 2, 4}, {3}};
  f.supports = {rows, cols, 2, 1, kNumActions};
  f.action_vars = 1;
  f.max_parents = 5;
  f.horizon = horizon;

  const int source_row = 0, source_col = 0;
  const int dest_row = rows - 1, dest_col = cols - 2;

  f.transition.resize(4);
  f.reward.resize(4);
  auto point_mass_tables = [&](int factor, int outcomes, auto&& next_of) {
    const long long nrows = f.factor_rows(factor);
    std::vector<double>& table = f.transition[static_cast<std::size_t>(factor)];
    table.assign(static_cast<std::size_t>(nrows * outcomes), 0.0);
    f.reward[static_cast<std::size_t>(factor)].assign(static_cast<std::size_t>(nrows), 0.0);
    const Scope& scope = f.graph.parents[static_cast<std::size_t>(factor)];
    std::vector<int> scope_supports;
    for (int i : scope) scope_supports.push_back(f.supports[static_cast<std::size_t>(i)]);
    for (long long row = 0; row < nrows; ++row) {
      const std::vector<int> assignment = assignment_decode(row, scope_supports);
      table[static_cast<std::size_t>(row * outcomes + next_of(assignment, row))] = 1.0;
    }
  };

  point_mass_tables(0, rows, [&](const std::vector<int>& v, long long) {
    const int r = v[0], a = v[1];
    if (a == kNorth) return std::max(r - 1, 0);
    if (a == kSouth) return std::min(r + 1, rows - 1);
    return r;
  });
  point_mass_tables(1, cols, [&](const std::vector<int>& v, long long) {
    const int c = v[0], a = v[1];
    if (a == kWest) return std::max(c - 1, 0);
    if (a == kEast) return std::min(c + 1, cols - 1);
    return c;
  });
  // Rewards live on the passenger factor, whose parents cover position,
  // carrying flag and action. The native taxi rewards (-1 step, +20 delivery,
  // -10 illegal pickup/dropoff) map affinely onto [0, 1] via (r + 10) / 30,
  // which preserves the ordering of policies.
  constexpr double kStepReward = 0.3;
  constexpr double kDeliveryReward = 1.0;
  constexpr double kIllegalReward = 0.0;
  point_mass_tables(2, 2, [&](const std::vector<int>& v, long long row) {
    const int r = v[0], c = v[1], carrying = v[2], a = v[3];
    double& cell_reward = f.reward[2][static_cast<std::size_t>(row)];
    if (a == kPickup) {
      const bool legal = carrying == 0 && r == source_row && c == source_col;
      cell_reward = legal ? kStepReward : kIllegalReward;
      return legal ? 1 : carrying;
    }
    if (a == kDropoff) {
      const bool success = carrying == 1 && r == dest_row && c == dest_col;
      cell_reward = success ? kDeliveryReward : kIllegalReward;
      return success ? 0 : carrying;
    }
    cell_reward = kStepReward;
    return carrying;
  });
  point_mass_tables(3, 1, [](const std::vector<int>&, long long) { return 0; });

  // Episodes start with the taxi parked at the source depot and the passenger
  // waiting there.
  const long long S = f.state_count();
  f.initial.assign(static_cast<std::size_t>(S), 0.0);
  const std::vector<int> start = {source_row, source_col, 0, 0};
  f.initial[static_cast<std::size_t>(f.encode_state(start))] = 1.0;
  return f;
}

}  // namespace cpsrl
