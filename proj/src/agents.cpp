#include "cpsrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpsrl {

std::string_view agent_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::kCpsrl: return "cpsrl";
    case AgentKind::kFpsrl: return "fpsrl";
    case AgentKind::kPsrl: return "psrl";
  }
  throw std::logic_error("agent_name: unknown kind");
}

AgentKind agent_kind_from_name(std::string_view name) {
  if (name == "cpsrl") return AgentKind::kCpsrl;
  if (name == "fpsrl") return AgentKind::kFpsrl;
  if (name == "psrl") return AgentKind::kPsrl;
  throw std::invalid_argument("unknown agent \"" + std::string(name) + "\"");
}

ConfidenceWidths confidence_widths(double reward_mass, double transition_mass,
                                   long long episodes, int d_y, int support,
                                   int max_parents) {
  if (reward_mass < 0.0 || transition_mass < 0.0 || episodes < 1) {
    throw std::invalid_argument("confidence_widths: masses must be >= 0 and episodes >= 1");
  }
  const double log_term =
      std::log(2.0 * static_cast<double>(episodes) * d_y *
               std::pow(static_cast<double>(support), max_parents));
  ConfidenceWidths w;
  w.reward = std::sqrt(log_term / (2.0 * (reward_mass + 1.0)));
  w.transition = std::sqrt(static_cast<double>(support) * log_term /
                           (2.0 * (transition_mass + 1.0)));
  return w;
}

RegretBound regret_bound(int horizon, int support, int max_parents, int d_x,
                         int d_y, int revealed, long long episodes) {
  if (horizon < 1 || support < 1 || max_parents < 0 || revealed < 0 ||
      revealed > d_x || episodes < 1) {
    throw std::invalid_argument("regret_bound: invalid parameters");
  }
  const double H = horizon;
  const double N = support;
  const double K = static_cast<double>(episodes);
  const double hypotheses = std::pow(2.0, d_x - revealed);
  RegretBound b;
  b.burn_in = H * H * d_y * std::pow(N, max_parents);
  b.model_learning =
      std::pow(H, 2.5) * d_y * std::pow(N, 1.0 + max_parents / 2.0) * std::sqrt(K);
  b.factorization_search = std::sqrt(hypotheses * K * H);
  b.factorization_tail = d_y * hypotheses * H * H;
  b.total = b.burn_in + b.model_learning + b.factorization_search + b.factorization_tail;
  return b;
}

RunContext make_run_context(Fmdp env, long long state_cap) {
  RunContext ctx;
  ctx.env = std::move(env);
  ctx.flat_env = flatten(ctx.env, state_cap);
  ctx.optimal = backward_induction(ctx.flat_env);
  return ctx;
}

double model_error_l1(const TabularMdp& a, const TabularMdp& b) {
  if (a.num_states != b.num_states || a.num_actions != b.num_actions) {
    throw std::invalid_argument("model_error_l1: dimension mismatch");
  }
  const long long rows = a.num_states * a.num_actions;
  double total = 0.0;
  for (long long i = 0; i < rows * a.num_states; ++i) {
    total += std::abs(a.transition[static_cast<std::size_t>(i)] -
                      b.transition[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(rows);
}

namespace {

int largest_support(const Fmdp& env) {
  int n = 1;
  for (int s : env.supports) n = std::max(n, s);
  return n;
}

// Hierarchical posterior-sampling agent; covers both the partial-prior and
// the oracle-prior variants.
class HierarchicalAgent final : public Agent {
 public:
  HierarchicalAgent(const RunContext& ctx, const AgentConfig& config, bool oracle)
      : ctx_(&ctx), config_(config), oracle_(oracle) {
    const Fmdp& env = ctx.env;
    if (config_.max_parents == 0) config_.max_parents = env.max_parents;
    if (oracle_) {
      env.graph.check();
      hierarchy_ = init_oracle_hierarchy(env.graph, env.supports, config_.mode);
    } else {
      if (config_.prior.d_x != env.graph.d_x || config_.prior.d_y != env.graph.d_y) {
        throw std::invalid_argument("cpsrl: prior graph dimensions do not match the environment");
      }
      hierarchy_ = init_hierarchy(config_.prior, config_.max_parents,
                                  env.supports, config_.mode);
    }
  }

  std::string_view name() const override { return oracle_ ? "fpsrl" : "cpsrl"; }

  const Hierarchy* hierarchy() const override { return &hierarchy_; }

  EpisodeLog run_episode(Rng& rng) override {
    const Fmdp& env = ctx_->env;
    EpisodeLog log;
    log.episode = episode_++;

    const std::vector<std::size_t> choice = sample_factorization(hierarchy_, rng);
    const Fmdp model = sample_model(hierarchy_, choice, env, rng);
    const TabularMdp flat_model = flatten(model, config_.planner_state_cap);
    const PlanResult plan = backward_induction(flat_model);

    log.trajectory = rollout(env, plan.policy, rng);
    record_widths(choice, log);
    for (const Transition& t : log.trajectory) observe(hierarchy_, t);

    log.factorization = factorization_graph(hierarchy_, choice).parents;
    log.policy_value = evaluate_policy(ctx_->flat_env, plan.policy);
    log.regret = ctx_->optimal.initial_value - log.policy_value;
    log.model_error = model_error_l1(ctx_->flat_env, flat_model);
    log.diagnostics.hypothesis_count = hierarchy_.hypothesis_count();
    log.diagnostics.hyper_entropy.reserve(hierarchy_.factors.size());
    for (const FactorHyper& f : hierarchy_.factors) {
      log.diagnostics.hyper_entropy.push_back(f.entropy());
    }
    return log;
  }

 private:
  // Mean confidence widths at the cells visited this episode, evaluated on
  // the chosen candidates' posteriors before the episode's updates.
  void record_widths(const std::vector<std::size_t>& choice, EpisodeLog& log) const {
    const int support = largest_support(ctx_->env);
    double reward_sum = 0.0;
    double transition_sum = 0.0;
    long long cells = 0;
    for (const Transition& t : log.trajectory) {
      for (std::size_t j = 0; j < hierarchy_.factors.size(); ++j) {
        const FactorPosterior& fp = hierarchy_.factors[j].posteriors[choice[j]];
        const long long row = scoped_row_index(t.x, fp.scope, hierarchy_.supports);
        const ConfidenceWidths w = confidence_widths(
            fp.rewards[static_cast<std::size_t>(row)].mass(),
            fp.transitions[static_cast<std::size_t>(row)].total(),
            config_.total_episodes, ctx_->env.graph.d_y, support,
            hierarchy_.max_parents);
        reward_sum += w.reward;
        transition_sum += w.transition;
        ++cells;
      }
    }
    if (cells > 0) {
      log.diagnostics.reward_width_mean = reward_sum / static_cast<double>(cells);
      log.diagnostics.transition_width_mean = transition_sum / static_cast<double>(cells);
    }
  }

  const RunContext* ctx_;
  AgentConfig config_;
  bool oracle_;
  Hierarchy hierarchy_;
  int episode_ = 0;
};

// Flat posterior-sampling baseline with an uninformative prior: it does not
// model factorizations at all.
class FlatAgent final : public Agent {
 public:
  FlatAgent(const RunContext& ctx, const AgentConfig& config)
      : ctx_(&ctx), config_(config) {
    const long long S = ctx.flat_env.num_states;
    const long long A = ctx.flat_env.num_actions;
    constexpr long long kFlatTableCap = 64'000'000;  // S*A*S doubles
    if (S * A * S > kFlatTableCap) {
      throw std::length_error("psrl: flat posterior table exceeds cap");
    }
    transition_alpha_.assign(static_cast<std::size_t>(S * A),
                             std::vector<double>(static_cast<std::size_t>(S), 1.0));
    reward_posterior_.assign(static_cast<std::size_t>(S * A), BetaRow{});
  }

  std::string_view name() const override { return "psrl"; }

  EpisodeLog run_episode(Rng& rng) override {
    const Fmdp& env = ctx_->env;
    const long long S = ctx_->flat_env.num_states;
    const long long A = ctx_->flat_env.num_actions;
    const double reward_scale = static_cast<double>(env.graph.d_y);
    EpisodeLog log;
    log.episode = episode_++;

    TabularMdp model;
    model.num_states = S;
    model.num_actions = A;
    model.horizon = env.horizon;
    model.initial = env.initial;
    model.transition.resize(static_cast<std::size_t>(S * A * S));
    model.reward.resize(static_cast<std::size_t>(S * A));
    for (long long i = 0; i < S * A; ++i) {
      rng.dirichlet_into(transition_alpha_[static_cast<std::size_t>(i)],
                         {model.transition.data() + i * S, static_cast<std::size_t>(S)});
    }
    for (long long i = 0; i < S * A; ++i) {
      const BetaRow& br = reward_posterior_[static_cast<std::size_t>(i)];
      model.reward[static_cast<std::size_t>(i)] = reward_scale * rng.beta(br.a, br.b);
    }

    const PlanResult plan = backward_induction(model);
    log.trajectory = rollout(env, plan.policy, rng);
    for (const Transition& t : log.trajectory) {
      const long long s = env.encode_state({t.x.data(), static_cast<std::size_t>(env.state_vars())});
      const long long a = env.encode_action(
          {t.x.data() + env.state_vars(), static_cast<std::size_t>(env.action_vars)});
      const long long s2 = env.encode_state(t.next);
      transition_alpha_[static_cast<std::size_t>(s * A + a)][static_cast<std::size_t>(s2)] += 1.0;
      double total_reward = 0.0;
      for (double r : t.reward) total_reward += r;
      const double scaled =
          std::clamp(total_reward, 0.0, reward_scale) / reward_scale;
      BetaRow& br = reward_posterior_[static_cast<std::size_t>(s * A + a)];
      br.a += scaled;
      br.b += 1.0 - scaled;
    }

    log.policy_value = evaluate_policy(ctx_->flat_env, plan.policy);
    log.regret = ctx_->optimal.initial_value - log.policy_value;
    log.model_error = model_error_l1(ctx_->flat_env, model);
    return log;
  }

  const std::vector<std::vector<double>>* flat_transition_alpha() const override {
    return &transition_alpha_;
  }

 private:
  const RunContext* ctx_;
  AgentConfig config_;
  std::vector<std::vector<double>> transition_alpha_;
  std::vector<BetaRow> reward_posterior_;
  int episode_ = 0;
};

}  // namespace

std::unique_ptr<Agent> make_cpsrl(const RunContext& ctx, const AgentConfig& config) {
  return std::make_unique<HierarchicalAgent>(ctx, config, false);
}

std::unique_ptr<Agent> make_fpsrl(const RunContext& ctx, const AgentConfig& config) {
  return std::make_unique<HierarchicalAgent>(ctx, config, true);
}

std::unique_ptr<Agent> make_psrl(const RunContext& ctx, const AgentConfig& config) {
  return std::make_unique<FlatAgent>(ctx, config);
}

std::unique_ptr<Agent> make_agent(const RunContext& ctx, const AgentConfig& config) {
  switch (config.kind) {
    case AgentKind::kCpsrl: return make_cpsrl(ctx, config);
    case AgentKind::kFpsrl: return make_fpsrl(ctx, config);
    case AgentKind::kPsrl: return make_psrl(ctx, config);
  }
  throw std::logic_error("make_agent: unknown kind");
}

}  // namespace cpsrl
