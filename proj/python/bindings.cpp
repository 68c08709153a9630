#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crowdrank/correlation.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/inference.hpp"
#include "crowdrank/interaction_graph.hpp"
#include "crowdrank/pipeline.hpp"
#include "crowdrank/synthgen.hpp"

namespace py = pybind11;
using namespace crowdrank;

namespace {

using IndexArray = Eigen::Ref<const Eigen::VectorX<std::int64_t>>;

// Dense index arrays -> ObservationSet. Counts default to max index + 1.
ObservationSet make_observations(const IndexArray& workers, const IndexArray& tasks,
                                 const IndexArray& labels, int classes, int worker_count,
                                 int task_count) {
  require(workers.size() == tasks.size() && tasks.size() == labels.size(), ErrorKind::kParameter,
          "workers, tasks and labels must have the same length");
  std::vector<Observation> obs;
  obs.reserve(static_cast<std::size_t>(workers.size()));
  int max_w = -1, max_t = -1;
  for (Eigen::Index k = 0; k < workers.size(); ++k) {
    require(workers(k) >= 0 && tasks(k) >= 0, ErrorKind::kData, "indices must be nonnegative");
    require(labels(k) >= 0 && labels(k) < classes, ErrorKind::kData,
            "label " + std::to_string(labels(k)) + " outside 0.." + std::to_string(classes - 1));
    obs.push_back({static_cast<int>(workers(k)), static_cast<int>(tasks(k)), static_cast<int>(labels(k))});
    max_w = std::max(max_w, obs.back().worker);
    max_t = std::max(max_t, obs.back().task);
  }
  return ObservationSet::create(worker_count > 0 ? worker_count : max_w + 1,
                                task_count > 0 ? task_count : max_t + 1, classes, std::move(obs));
}

SkillVector skill_vector(const Eigen::VectorXd& values, int classes) {
  SkillVector s;
  s.values = values;
  s.class_count = classes;
  return s;
}

py::dict check(const IndexArray& workers, const IndexArray& tasks, const IndexArray& labels, int classes,
               int worker_count) {
  const auto obs = make_observations(workers, tasks, labels, classes, worker_count, 0);
  const auto graph = build_graph(obs);
  const auto comps = analyze_components(graph);
  const auto spectral = spectral_report(graph, comps);
  py::list components;
  for (std::size_t c = 0; c < comps.components.size(); ++c) {
    py::dict d;
    d["workers"] = comps.components[c];
    d["bipartite"] = static_cast<bool>(comps.bipartite[c]);
    d["estimable"] = comps.estimable(c);
    d["lambda_min"] = spectral.lambda_min_signless[c];
    d["lambda_min_unit"] = spectral.lambda_min_unit[c];
    components.append(d);
  }
  py::dict out;
  out["identifiable"] = comps.identifiable;
  out["components"] = components;
  out["n_min"] = spectral.n_min;
  out["norm_inf"] = spectral.norm_inf;
  out["norm_two"] = spectral.norm_two;
  out["counts"] = graph.dense_counts();
  return out;
}

py::dict estimate(const IndexArray& workers, const IndexArray& tasks, const IndexArray& labels, int classes,
                  int worker_count, const std::string& method, std::optional<double> eta,
                  std::optional<double> alpha, double kappa, double cap_k, double tau, int max_iters,
                  std::optional<double> spammer_delta, std::int64_t min_count, bool force,
                  bool strict_signs, double delta) {
  const auto obs = make_observations(workers, tasks, labels, classes, worker_count, 0);
  EstimateOptions opts;
  opts.solver.method = parse_method(method);
  opts.solver.eta = eta;
  opts.solver.alpha = alpha;
  opts.solver.kappa = kappa;
  opts.solver.cap_k = cap_k;
  opts.solver.tau = tau;
  opts.solver.max_iters = max_iters;
  opts.spammer_delta = spammer_delta;
  opts.min_count = min_count;
  opts.force = force;
  opts.strict_signs = strict_signs;
  opts.hoeffding_delta = delta;
  const auto res = estimate_skills(obs, opts);
  py::dict out;
  out["skills"] = res.skills.values;
  out["magnitudes"] = res.magnitudes.values;
  out["signs"] = res.signs.signs;
  out["iterations"] = res.trace.iterations;
  out["converged"] = res.trace.converged;
  out["termination"] = std::string(to_string(res.trace.reason));
  out["final_loss"] = res.trace.final_loss;
  out["step_size"] = res.trace.step_size;
  out["identifiable"] = res.components.identifiable;
  out["hoeffding_radius"] = res.hoeffding_radius;
  out["perturbation_bound"] = res.perturbation_bound ? py::cast(*res.perturbation_bound) : py::none();
  out["flipped"] = res.signs.flipped_globally;
  return out;
}

std::vector<int> predict(const IndexArray& workers, const IndexArray& tasks, const IndexArray& labels,
                         const Eigen::VectorXd& skills, int classes, int task_count) {
  const auto obs = make_observations(workers, tasks, labels, classes, static_cast<int>(skills.size()), task_count);
  return plug_in_predict(obs, skill_vector(skills, classes));
}

std::vector<int> majority(const IndexArray& workers, const IndexArray& tasks, const IndexArray& labels,
                          int classes, int task_count) {
  return majority_vote(make_observations(workers, tasks, labels, classes, 0, task_count));
}

py::dict synth(const std::string& family, int workers, int tasks, const std::string& skills, double a,
               double b, std::optional<std::vector<double>> values, int classes, const std::string& assignment,
               bool shuffle, double edge_probability, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.graph_family = parse_graph_family(family);
  cfg.worker_count = workers;
  cfg.task_count = tasks;
  cfg.class_count = classes;
  cfg.assignment = parse_assignment_mode(assignment);
  cfg.shuffle_skills = shuffle;
  cfg.edge_probability = edge_probability;
  cfg.seed = seed;
  if (skills == "grid") cfg.skills = SkillDistribution::uniform_grid(a, b);
  else if (skills == "beta") cfg.skills = SkillDistribution::beta(a, b);
  else if (skills == "constant") cfg.skills = SkillDistribution::constant(a);
  else if (skills == "explicit") {
    require(values.has_value(), ErrorKind::kParameter, "explicit skills need values");
    cfg.skills = SkillDistribution::explicit_values(*values);
  } else {
    fail(ErrorKind::kParameter, "unknown skill distribution '" + skills + "' (grid, beta, constant, explicit)");
  }
  const auto inst = generate(cfg);
  const auto triples = inst.observations.triples();
  Eigen::VectorX<std::int64_t> w(static_cast<Eigen::Index>(triples.size())), t(w.size()), l(w.size());
  for (std::size_t k = 0; k < triples.size(); ++k) {
    const auto idx = static_cast<Eigen::Index>(k);
    w(idx) = triples[k].worker;
    t(idx) = triples[k].task;
    l(idx) = triples[k].label;
  }
  py::dict out;
  out["workers"] = w;
  out["tasks"] = t;
  out["labels"] = l;
  out["truth"] = inst.labels;
  out["skills"] = inst.skills.values;
  out["classes"] = classes;
  return out;
}

}  // namespace

PYBIND11_MODULE(_crowdrank, m) {
  m.doc() = "Skill estimation and label inference for crowdsourced labels";

  // Handles are kept for the interpreter's lifetime.
  auto make_exc = [&m](const char* name, PyObject* parent) {
    return py::exception<Error>(m, name, parent).release().ptr();
  };
  static PyObject* base = make_exc("CrowdrankError", PyExc_RuntimeError);
  static PyObject* parameter = make_exc("ParameterError", PyExc_ValueError);
  static PyObject* data = make_exc("DataError", base);
  static PyObject* not_identifiable = make_exc("NotIdentifiableError", base);
  static PyObject* numerical = make_exc("NumericalError", base);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyObject* type = base;
      switch (e.kind()) {
        case ErrorKind::kParameter: type = parameter; break;
        case ErrorKind::kData: type = data; break;
        case ErrorKind::kNotIdentifiable: type = not_identifiable; break;
        case ErrorKind::kNumerical: type = numerical; break;
      }
      py::set_error(py::handle(type), e.what());
    }
  });

  m.def("check", &check, py::arg("workers"), py::arg("tasks"), py::arg("labels"), py::arg("classes") = 2,
        py::arg("worker_count") = 0,
        "Components, bipartiteness, identifiability and spectral summary of the interaction graph.");
  m.def("estimate", &estimate, py::arg("workers"), py::arg("tasks"), py::arg("labels"),
        py::arg("classes") = 2, py::arg("worker_count") = 0, py::arg("method") = "pgd",
        py::arg("eta") = py::none(), py::arg("alpha") = py::none(), py::arg("kappa") = 0.05,
        py::arg("K") = 1.0, py::arg("tau") = 1.0, py::arg("max_iters") = 100000,
        py::arg("spammer_delta") = py::none(), py::arg("min_count") = 1, py::arg("force") = false,
        py::arg("strict_signs") = false, py::arg("delta") = 0.05,
        "Estimate signed worker skills from (worker, task, label) index arrays.");
  m.def("predict", &predict, py::arg("workers"), py::arg("tasks"), py::arg("labels"), py::arg("skills"),
        py::arg("classes") = 2, py::arg("task_count") = 0,
        "Plug-in MAP class predictions; -1 for tasks nobody labeled.");
  m.def("majority_vote", &majority, py::arg("workers"), py::arg("tasks"), py::arg("labels"),
        py::arg("classes") = 2, py::arg("task_count") = 0, "Plurality vote per task, lowest class on ties.");
  m.def(
      "committee_potential",
      [](const Eigen::VectorXd& skills) {
        const auto c = committee_potential(skill_vector(skills, 2));
        return py::make_tuple(c.phi, c.error_upper, c.error_lower);
      },
      py::arg("skills"), "(phi, upper, lower) error bounds for the optimal rule.");
  m.def("synth", &synth, py::arg("family") = "clique", py::arg("workers") = 11, py::arg("tasks") = 330,
        py::arg("skills") = "grid", py::arg("a") = -0.3, py::arg("b") = 0.8, py::arg("values") = py::none(),
        py::arg("classes") = 2, py::arg("assignment") = "auto", py::arg("shuffle") = true,
        py::arg("edge_probability") = 0.3, py::arg("seed") = 0,
        "Synthetic instance: index arrays, ground-truth classes and skills.");
}
