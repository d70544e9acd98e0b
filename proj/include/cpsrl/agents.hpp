#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cpsrl/fmdp.hpp"
#include "cpsrl/planner.hpp"
#include "cpsrl/posterior.hpp"

namespace cpsrl {

enum class AgentKind { kCpsrl, kFpsrl, kPsrl };

std::string_view agent_name(AgentKind kind);
AgentKind agent_kind_from_name(std::string_view name);

struct AgentConfig {
  AgentKind kind = AgentKind::kCpsrl;
  // Sparseness hyper-parameter; 0 means "use the environment's declared
  // bound". Ignored by the flat baseline.
  int max_parents = 0;
  // Partial graph prior (kCpsrl only); kFpsrl always uses the true graph.
  CausalGraph prior;
  UpdateMode mode = UpdateMode::kExactBayes;
  // Planned number of episodes; only used to pin the K inside the
  // confidence-width diagnostics.
  int total_episodes = 1;
  long long planner_state_cap = kDefaultStateCap;
};

// Closed-form high-probability widths for one (factor, parent-assignment)
// cell: the reward width and the transition width
//   c   = sqrt(log(2 K d_y N^Z) / (2 (reward_mass + 1)))
//   phi = sqrt(N log(2 K d_y N^Z) / (2 (transition_mass + 1)))
// where the masses are the L1 norms of the Beta/Dirichlet parameters.
struct ConfidenceWidths {
  double reward = 0.0;
  double transition = 0.0;
};
ConfidenceWidths confidence_widths(double reward_mass, double transition_mass,
                                   long long episodes, int d_y, int support,
                                   int max_parents);

// Closed-form leading-term regret estimate, split into its four summands
// (no hidden constants), for plotting against empirical regret:
//   burn_in              = H^2 d_y N^Z
//   model_learning       = H^(5/2) d_y N^(1 + Z/2) sqrt(K)
//   factorization_search = sqrt(2^(d_x - revealed) K H)
//   factorization_tail   = d_y 2^(d_x - revealed) H^2
struct RegretBound {
  double burn_in = 0.0;
  double model_learning = 0.0;
  double factorization_search = 0.0;
  double factorization_tail = 0.0;
  double total = 0.0;
};
RegretBound regret_bound(int horizon, int support, int max_parents, int d_x,
                         int d_y, int revealed, long long episodes);

struct EpisodeDiagnostics {
  std::vector<double> hyper_entropy;  // per factor; empty for the flat baseline
  double reward_width_mean = 0.0;      // mean c over visited cells
  double transition_width_mean = 0.0;  // mean phi over visited cells
  unsigned long long hypothesis_count = 1;
};

struct EpisodeLog {
  int episode = 0;
  std::vector<Scope> factorization;  // sampled scopes; empty for the flat baseline
  double policy_value = 0.0;         // exact value of the played policy in the true model
  double regret = 0.0;
  double model_error = 0.0;  // mean L1 row distance, sampled vs true flat model
  EpisodeDiagnostics diagnostics;
  std::vector<Transition> trajectory;
};

// Everything derived from the true environment that is shared by the agents
// of one run: the flattened true model and its optimal policy/value.
struct RunContext {
  Fmdp env;
  TabularMdp flat_env;
  PlanResult optimal;
};
RunContext make_run_context(Fmdp env, long long state_cap = kDefaultStateCap);

// Mean over state-action pairs of the L1 distance between transition rows.
double model_error_l1(const TabularMdp& a, const TabularMdp& b);

class Agent {
 public:
  virtual ~Agent() = default;

  // One full loop: sample a model from the posterior, plan, act on the true
  // environment, update the posterior.
  virtual EpisodeLog run_episode(Rng& rng) = 0;

  virtual std::string_view name() const = 0;

  // Hierarchical posterior state (null for the flat baseline); points to
  // internal state, valid until the next run_episode call.
  virtual const Hierarchy* hierarchy() const { return nullptr; }

  // Flat transition pseudo-counts, one vector per state-action pair (flat
  // baseline only; null for factored agents).
  virtual const std::vector<std::vector<double>>* flat_transition_alpha() const {
    return nullptr;
  }
};

// Hierarchical agent over the hypothesis space induced by config.prior.
std::unique_ptr<Agent> make_cpsrl(const RunContext& ctx, const AgentConfig& config);

// Oracle-prior agent: candidate lists are the singletons of the true scopes.
std::unique_ptr<Agent> make_fpsrl(const RunContext& ctx, const AgentConfig& config);

// Flat baseline: Dirichlet(1, ..., 1) over successor states per state-action
// pair and a single aggregate Beta reward per pair.
std::unique_ptr<Agent> make_psrl(const RunContext& ctx, const AgentConfig& config);

std::unique_ptr<Agent> make_agent(const RunContext& ctx, const AgentConfig& config);

}  // namespace cpsrl
