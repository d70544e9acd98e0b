// Python bindings for the main operations. Structured values cross the
// boundary as JSON strings so the python side stays schema-compatible with
// the CLI's files.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cpsrl/envs.hpp"
#include "cpsrl/harness.hpp"

namespace py = pybind11;
using namespace cpsrl;

namespace {

std::string dump_json(const nlohmann::json& j) { return j.dump(); }

nlohmann::json parse_json(const std::string& text) {
  return nlohmann::json::parse(text);
}

}  // namespace

PYBIND11_MODULE(_cpsrl, m) {
  m.doc() = "Factored-MDP posterior-sampling laboratory";

  // graph operations
  m.def("scope_select", [](const std::vector<int>& x, const Scope& scope) {
    return scope_select(x, scope);
  });
  m.def("assignment_index",
        [](const std::vector<int>& values, const std::vector<int>& supports) {
          return assignment_index(values, supports);
        });
  m.def("assignment_decode",
        [](long long index, const std::vector<int>& supports) {
          return assignment_decode(index, supports);
        });
  m.def("enumerate_consistent_scopes", &enumerate_consistent_scopes,
        py::arg("d_x"), py::arg("fixed"), py::arg("max_parents"));
  m.def("count_consistent_scopes", &count_consistent_scopes, py::arg("d_x"),
        py::arg("known_parents"), py::arg("max_parents"));
  m.def("consistent_scopes_bound", &consistent_scopes_bound, py::arg("d_x"),
        py::arg("known_parents"));
  m.def("is_subgraph", [](const std::string& a, const std::string& b) {
    return is_subgraph(graph_from_json(parse_json(a)), graph_from_json(parse_json(b)));
  });

  // environments and models (as JSON strings)
  m.def("make_random_fmdp",
        [](int d_x, int d_y, int max_parents, int support, int horizon,
           std::uint64_t seed) {
          Rng rng(seed);
          return dump_json(fmdp_to_json(
              make_random_fmdp(d_x, d_y, max_parents, support, horizon, rng)));
        },
        py::arg("d_x"), py::arg("d_y"), py::arg("max_parents"), py::arg("support"),
        py::arg("horizon"), py::arg("seed"));
  m.def("make_taxi", [](int rows, int cols, int horizon) {
    return dump_json(fmdp_to_json(make_taxi(rows, cols, horizon)));
  });
  m.def("reveal_prior",
        [](const std::string& graph, int revealed, std::uint64_t seed) {
          Rng rng(seed);
          return dump_json(graph_to_json(
              reveal_prior(graph_from_json(parse_json(graph)), revealed, rng)));
        });
  m.def("validate_fmdp", [](const std::string& fmdp) {
    return validate(fmdp_from_json(parse_json(fmdp)));
  });

  // planning
  m.def("flatten_and_plan", [](const std::string& fmdp) {
    const Fmdp f = fmdp_from_json(parse_json(fmdp));
    const TabularMdp flat = flatten(f);
    const PlanResult plan = backward_induction(flat);
    return py::make_tuple(plan.initial_value, plan.policy);
  });
  m.def("optimal_value", [](const std::string& fmdp) {
    const Fmdp f = fmdp_from_json(parse_json(fmdp));
    return backward_induction(flatten(f)).initial_value;
  });

  // diagnostics
  m.def("confidence_widths",
        [](double reward_mass, double transition_mass, long long episodes, int d_y,
           int support, int max_parents) {
          const ConfidenceWidths w = confidence_widths(
              reward_mass, transition_mass, episodes, d_y, support, max_parents);
          return py::make_tuple(w.reward, w.transition);
        });
  m.def("regret_bound",
        [](int horizon, int support, int max_parents, int d_x, int d_y,
           int revealed, long long episodes) {
          const RegretBound b = regret_bound(horizon, support, max_parents, d_x,
                                             d_y, revealed, episodes);
          py::dict out;
          out["burn_in"] = b.burn_in;
          out["model_learning"] = b.model_learning;
          out["factorization_search"] = b.factorization_search;
          out["factorization_tail"] = b.factorization_tail;
          out["total"] = b.total;
          return out;
        });

  // experiment harness
  m.def("run_experiment", [](const std::string& config_json) {
    const ExperimentConfig config = config_from_json(parse_json(config_json));
    const ExperimentResult result = run_experiment(config);
    std::ostringstream csv;
    write_csv(result.all_rows(), csv);
    return py::make_tuple(csv.str(), dump_json(summarize(config, result)));
  });
  m.def("run_experiment_to_files",
        [](const std::string& config_json, const std::string& out_dir) {
          run_experiment_to_files(config_from_json(parse_json(config_json)), out_dir);
        });
}
