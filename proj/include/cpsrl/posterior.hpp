#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cpsrl/fmdp.hpp"
#include "cpsrl/graph.hpp"
#include "cpsrl/rng.hpp"

namespace cpsrl {

// Hyper-weight propagation rule.
//   kExactBayes:    multiply by the transition posterior predictive
//                   alpha_i / ||alpha||_1 and the reward pseudo-predictive
//                   B(a+r, b+1-r) / B(a, b), so the normalized weights are the
//                   exact conjugate posterior over candidates given all
//                   observed evidence. Both increments telescope to closed-form
//                   marginal likelihoods, so weights are order invariant.
//   kPaperLiteral:  multiply by the shifted ratio (alpha_i + 1) / (||alpha||_1 + 1)
//                   on transition evidence only.
// Config files and the CLI spell these "exact-bayes" and "paper-literal".
enum class UpdateMode { kExactBayes, kPaperLiteral };

struct DirichletRow {
  std::vector<double> alpha;  // all entries > 0

  double total() const {
    double t = 0.0;
    for (double a : alpha) t += a;
    return t;
  }
};

// Mean-reward posterior for one (factor, parent-assignment) cell. Updated
// with fractional pseudo-counts a += r, b += 1 - r for r in [0, 1].
struct BetaRow {
  double a = 1.0;
  double b = 1.0;

  double mean() const { return a / (a + b); }
  double mass() const { return a + b; }
};

// Probability the next observation of this row lands on `outcome`, under the
// selected update rule. Evaluated before the row is updated.
double predictive_prob(const DirichletRow& row, int outcome, UpdateMode mode);

// Marginal likelihood increment of observing reward r in [0, 1] under this
// Beta row: B(a + r, b + 1 - r) / B(a, b). Reduces to the Bernoulli
// predictive a/(a+b) (resp. b/(a+b)) at r = 1 (resp. 0), and the sequential
// product telescopes to B(a + sum r, b + sum (1-r)) / B(a, b), so batch order
// does not matter.
double reward_predictive(const BetaRow& row, double r);

// Model posterior conditioned on one candidate scope: a Dirichlet row per
// parent assignment for the transition factor and a Beta row per parent
// assignment for the mean reward.
struct FactorPosterior {
  Scope scope;
  std::vector<DirichletRow> transitions;
  std::vector<BetaRow> rewards;

  long long row_count() const { return static_cast<long long>(transitions.size()); }
};

// Categorical hyper-posterior over the candidate scopes of one output factor,
// with one FactorPosterior per candidate. Weights are kept in log space and
// rescaled after every observation so that they sum to the candidate count
// (a pure rescaling; sampling probabilities are unchanged).
struct FactorHyper {
  std::vector<Scope> candidates;
  std::vector<double> log_weight;
  std::vector<FactorPosterior> posteriors;
  int outcome_support = 0;

  std::vector<double> weights() const;  // normalized sampling probabilities
  double entropy() const;               // of weights(), in nats
  std::size_t sample(Rng& rng) const;
};

// The full two-level posterior: one FactorHyper per output factor, sharing
// the left-variable supports. Candidates index the same data stream by their
// own scopes, so every candidate's sufficient statistics stay exact.
struct Hierarchy {
  std::vector<FactorHyper> factors;
  std::vector<int> supports;  // all d_x left supports
  int max_parents = 0;
  UpdateMode mode = UpdateMode::kExactBayes;

  int d_x() const { return static_cast<int>(supports.size()); }
  int d_y() const { return static_cast<int>(factors.size()); }

  // Product of candidate-list sizes across factors (saturating).
  unsigned long long hypothesis_count() const;
};

// Builds the hyper-prior from a partial graph prior: factor j's candidates
// are every scope containing prior.parents[j] with at most max_parents
// entries; weights start uniform, Dirichlet rows at (1, ..., 1) and Beta rows
// at (1, 1). `supports` covers all left variables; outcome supports are the
// first d_y entries. Throws if some prior parent set exceeds max_parents.
Hierarchy init_hierarchy(const CausalGraph& prior, int max_parents,
                         std::span<const int> supports, UpdateMode mode);

// Degenerate hierarchy whose candidate list per factor is the singleton
// {graph.parents[j]}; used by the oracle-prior agent.
Hierarchy init_oracle_hierarchy(const CausalGraph& graph,
                                std::span<const int> supports, UpdateMode mode);

// One candidate index per factor, drawn independently with probability
// proportional to its weight. Acyclicity is structural: candidates only point
// from left to right variables.
std::vector<std::size_t> sample_factorization(const Hierarchy& h, Rng& rng);

CausalGraph factorization_graph(const Hierarchy& h,
                                const std::vector<std::size_t>& choice);

// Draws a full model from the posterior conditioned on the chosen candidates:
// each transition row from its Dirichlet, each mean reward from its Beta.
// Shares supports, initial distribution and horizon with `env`.
Fmdp sample_model(const Hierarchy& h, const std::vector<std::size_t>& choice,
                  const Fmdp& env, Rng& rng);

// Conjugate update for one observed transition. For every factor j and every
// candidate scope: the hyper-weight is multiplied by the candidate's
// predictive probability of the observed outcome (and, in exact-bayes mode,
// by its reward pseudo-predictive), both evaluated before the candidate's own
// update; the Dirichlet row at x[scope] gets alpha[y_j] += 1, and the Beta
// row gets a += r_j, b += 1 - r_j.
void observe(Hierarchy& h, const Transition& t);

}  // namespace cpsrl
