#include "cpsrl/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpsrl {

double predictive_prob(const DirichletRow& row, int outcome, UpdateMode mode) {
  if (outcome < 0 || static_cast<std::size_t>(outcome) >= row.alpha.size()) {
    throw std::invalid_argument("predictive_prob: outcome out of range");
  }
  const double total = row.total();
  const double a = row.alpha[static_cast<std::size_t>(outcome)];
  if (mode == UpdateMode::kPaperLiteral) {
    return (a + 1.0) / (total + 1.0);
  }
  return a / total;
}

double reward_predictive(const BetaRow& row, double r) {
  if (r < 0.0 || r > 1.0) {
    throw std::invalid_argument("reward_predictive: reward outside [0, 1]");
  }
  return std::exp(std::lgamma(row.a + r) + std::lgamma(row.b + 1.0 - r) +
                  std::lgamma(row.a + row.b) - std::lgamma(row.a) -
                  std::lgamma(row.b) - std::lgamma(row.a + row.b + 1.0));
}

std::vector<double> FactorHyper::weights() const {
  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weight) max_lw = std::max(max_lw, lw);
  std::vector<double> w(log_weight.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_weight.size(); ++i) {
    w[i] = std::exp(log_weight[i] - max_lw);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

double FactorHyper::entropy() const {
  double h = 0.0;
  for (double p : weights()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::size_t FactorHyper::sample(Rng& rng) const {
  const std::vector<double> w = weights();
  return rng.categorical(w);
}

unsigned long long Hierarchy::hypothesis_count() const {
  unsigned long long count = 1;
  for (const FactorHyper& f : factors) {
    const unsigned long long n = f.candidates.size();
    if (n != 0 && count > std::numeric_limits<unsigned long long>::max() / n) {
      return std::numeric_limits<unsigned long long>::max();
    }
    count *= n;
  }
  return count;
}

namespace {

FactorPosterior make_factor_posterior(const Scope& scope,
                                      std::span<const int> supports,
                                      int outcome_support) {
  FactorPosterior fp;
  fp.scope = scope;
  long long rows = 1;
  for (int i : scope) rows *= supports[static_cast<std::size_t>(i)];
  fp.transitions.assign(static_cast<std::size_t>(rows),
                        DirichletRow{std::vector<double>(
                            static_cast<std::size_t>(outcome_support), 1.0)});
  fp.rewards.assign(static_cast<std::size_t>(rows), BetaRow{});
  return fp;
}

Hierarchy build_hierarchy(const CausalGraph& prior, int max_parents,
                          std::span<const int> supports, UpdateMode mode,
                          bool singleton_candidates) {
  prior.check();
  if (static_cast<int>(supports.size()) != prior.d_x) {
    throw std::invalid_argument("init_hierarchy: expected one support per left variable");
  }
  Hierarchy h;
  h.supports.assign(supports.begin(), supports.end());
  h.max_parents = max_parents;
  h.mode = mode;
  h.factors.resize(static_cast<std::size_t>(prior.d_y));
  for (int j = 0; j < prior.d_y; ++j) {
    FactorHyper& fh = h.factors[static_cast<std::size_t>(j)];
    fh.outcome_support = supports[static_cast<std::size_t>(j)];
    fh.candidates =
        singleton_candidates
            ? std::vector<Scope>{prior.parents[static_cast<std::size_t>(j)]}
            : enumerate_consistent_scopes(
                  prior.d_x, prior.parents[static_cast<std::size_t>(j)], max_parents);
    fh.log_weight.assign(fh.candidates.size(), 0.0);
    fh.posteriors.reserve(fh.candidates.size());
    for (const Scope& scope : fh.candidates) {
      fh.posteriors.push_back(
          make_factor_posterior(scope, supports, fh.outcome_support));
    }
  }
  return h;
}

}  // namespace

Hierarchy init_hierarchy(const CausalGraph& prior, int max_parents,
                         std::span<const int> supports, UpdateMode mode) {
  return build_hierarchy(prior, max_parents, supports, mode, false);
}

Hierarchy init_oracle_hierarchy(const CausalGraph& graph,
                                std::span<const int> supports, UpdateMode mode) {
  return build_hierarchy(graph, graph.sparseness(), supports, mode, true);
}

std::vector<std::size_t> sample_factorization(const Hierarchy& h, Rng& rng) {
  std::vector<std::size_t> choice(h.factors.size());
  for (std::size_t j = 0; j < h.factors.size(); ++j) {
    choice[j] = h.factors[j].sample(rng);
  }
  return choice;
}

CausalGraph factorization_graph(const Hierarchy& h,
                                const std::vector<std::size_t>& choice) {
  CausalGraph g;
  g.d_x = h.d_x();
  g.d_y = h.d_y();
  g.parents.reserve(choice.size());
  for (std::size_t j = 0; j < choice.size(); ++j) {
    g.parents.push_back(h.factors[j].candidates[choice[j]]);
  }
  return g;
}

Fmdp sample_model(const Hierarchy& h, const std::vector<std::size_t>& choice,
                  const Fmdp& env, Rng& rng) {
  if (choice.size() != h.factors.size()) {
    throw std::invalid_argument("sample_model: one candidate choice per factor required");
  }
  Fmdp m;
  m.graph = factorization_graph(h, choice);
  m.supports = h.supports;
  m.action_vars = env.action_vars;
  m.max_parents = std::max(h.max_parents, m.graph.sparseness());
  m.horizon = env.horizon;
  m.initial = env.initial;  // the initial distribution is known to the agent
  m.transition.resize(h.factors.size());
  m.reward.resize(h.factors.size());
  for (std::size_t j = 0; j < h.factors.size(); ++j) {
    const FactorPosterior& fp = h.factors[j].posteriors[choice[j]];
    const int n = h.factors[j].outcome_support;
    std::vector<double>& table = m.transition[j];
    table.resize(fp.transitions.size() * static_cast<std::size_t>(n));
    for (std::size_t row = 0; row < fp.transitions.size(); ++row) {
      rng.dirichlet_into(fp.transitions[row].alpha,
                         {table.data() + row * static_cast<std::size_t>(n),
                          static_cast<std::size_t>(n)});
    }
    std::vector<double>& rewards = m.reward[j];
    rewards.resize(fp.rewards.size());
    for (std::size_t row = 0; row < fp.rewards.size(); ++row) {
      rewards[row] = rng.beta(fp.rewards[row].a, fp.rewards[row].b);
    }
  }
  return m;
}

void observe(Hierarchy& h, const Transition& t) {
  if (static_cast<int>(t.x.size()) != h.d_x() ||
      static_cast<int>(t.next.size()) != h.d_y() ||
      static_cast<int>(t.reward.size()) != h.d_y()) {
    throw std::invalid_argument("observe: transition arity mismatch");
  }
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    if (t.x[i] < 0 || t.x[i] >= h.supports[i]) {
      throw std::invalid_argument("observe: assignment outside the variable supports");
    }
  }
  for (std::size_t j = 0; j < h.factors.size(); ++j) {
    FactorHyper& fh = h.factors[j];
    const int outcome = t.next[j];
    if (outcome < 0 || outcome >= fh.outcome_support) {
      throw std::invalid_argument("observe: outcome outside factor support");
    }
    const double r = t.reward[j];
    if (r < 0.0 || r > 1.0) {
      throw std::invalid_argument("observe: per-factor reward outside [0, 1]");
    }
    for (std::size_t c = 0; c < fh.candidates.size(); ++c) {
      FactorPosterior& fp = fh.posteriors[c];
      const long long row = scoped_row_index(t.x, fp.scope, h.supports);
      DirichletRow& dr = fp.transitions[static_cast<std::size_t>(row)];
      BetaRow& br = fp.rewards[static_cast<std::size_t>(row)];
      double log_evidence = std::log(predictive_prob(dr, outcome, h.mode));
      if (h.mode == UpdateMode::kExactBayes) {
        log_evidence += std::log(reward_predictive(br, r));
      }
      fh.log_weight[c] += log_evidence;
      dr.alpha[static_cast<std::size_t>(outcome)] += 1.0;
      br.a += r;
      br.b += 1.0 - r;
    }
    // Rescale so weights sum to the candidate count, as at initialization.
    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : fh.log_weight) max_lw = std::max(max_lw, lw);
    double total = 0.0;
    for (double lw : fh.log_weight) total += std::exp(lw - max_lw);
    const double shift =
        max_lw + std::log(total) - std::log(static_cast<double>(fh.log_weight.size()));
    for (double& lw : fh.log_weight) lw -= shift;
  }
}

}  // namespace cpsrl
