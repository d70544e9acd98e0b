#pragma once

#include "cpsrl/fmdp.hpp"
#include "cpsrl/graph.hpp"
#include "cpsrl/rng.hpp"

namespace cpsrl {

// Random benchmark instance: for each output factor a parent set of size
// uniform in [2, max_parents] drawn without replacement, transition rows from
// Dirichlet(1, ..., 1), mean rewards uniform in [0, 1], uniform initial
// distribution. All variables share the same support.
Fmdp make_random_fmdp(int d_x, int d_y, int max_parents, int support,
                      int horizon, Rng& rng);

// Partial prior: for each factor, a uniformly chosen subset of exactly
// `revealed` true parents. Throws if some factor has fewer parents than
// `revealed`.
CausalGraph reveal_prior(const CausalGraph& truth, int revealed, Rng& rng);

// Like reveal_prior but reveals min(revealed, |parents|) edges per factor, so
// it stays defined on graphs with small parent sets (the taxi destination
// factor has a single parent).
CausalGraph reveal_prior_clamped(const CausalGraph& truth, int revealed,
                                 Rng& rng);

// Grid-world taxi as a factored MDP. State features: taxi row, taxi column,
// passenger-in-taxi flag, and a constant destination feature (support 1); one
// action feature with 6 values (north, south, east, west, pickup, dropoff).
// Moves clamp at walls. Pickup succeeds only at the passenger source cell
// (top-left) when not carrying; dropoff at the destination cell
// (bottom-right) while carrying pays reward 1 on the passenger factor and
// resets carrying. Dynamics are deterministic.
Fmdp make_taxi(int rows, int cols, int horizon);

}  // namespace cpsrl
