// crowdrank command line: identifiability check, skill estimation, label
// inference, synthetic data, evaluation and multi-seed sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crowdrank/error.hpp"
#include "crowdrank/experiment.hpp"
#include "crowdrank/inference.hpp"
#include "crowdrank/io.hpp"
#include "crowdrank/pipeline.hpp"
#include "crowdrank/synthgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace crowdrank;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNotIdentifiable = 4;
constexpr int kExitNumerical = 5;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter: return kExitUsage;
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kNotIdentifiable: return kExitNotIdentifiable;
    case ErrorKind::kNumerical: return kExitNumerical;
  }
  return 1;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  require(out.good(), ErrorKind::kData, "cannot write '" + path + "'");
  out << text;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kData, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, path + ": invalid JSON: " + e.what());
  }
}

int default_threads() {
  if (const char* env = std::getenv("CROWDRANK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// --skills grid:-0.3,0.8 | beta:5,1 | constant:0.5 | explicit:0.1,0.2,...
SkillDistribution parse_skill_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        fail(ErrorKind::kParameter, "bad number '" + item + "' in skill spec '" + text + "'");
      }
    }
  }
  auto need = [&](std::size_t n) {
    require(args.size() == n, ErrorKind::kParameter,
            "skill spec '" + text + "' needs " + std::to_string(n) + " value(s)");
  };
  if (kind == "grid") {
    need(2);
    return SkillDistribution::uniform_grid(args[0], args[1]);
  }
  if (kind == "beta") {
    need(2);
    return SkillDistribution::beta(args[0], args[1]);
  }
  if (kind == "constant") {
    need(1);
    return SkillDistribution::constant(args[0]);
  }
  if (kind == "explicit") {
    require(!args.empty(), ErrorKind::kParameter, "explicit skills need values");
    return SkillDistribution::explicit_values(args);
  }
  fail(ErrorKind::kParameter, "unknown skill distribution '" + kind + "'");
}

json skill_spec_json(const SkillDistribution& d) {
  switch (d.kind) {
    case SkillDistribution::Kind::kUniformGrid: return {{"kind", "grid"}, {"lo", d.a}, {"hi", d.b}};
    case SkillDistribution::Kind::kBeta: return {{"kind", "beta"}, {"a", d.a}, {"b", d.b}};
    case SkillDistribution::Kind::kConstant: return {{"kind", "constant"}, {"value", d.a}};
    case SkillDistribution::Kind::kExplicit: return {{"kind", "explicit"}, {"values", d.values}};
  }
  return {};
}

SkillDistribution skill_spec_from_json(const json& j) {
  const std::string kind = j.value("kind", "grid");
  if (kind == "grid") return SkillDistribution::uniform_grid(j.value("lo", -0.3), j.value("hi", 0.8));
  if (kind == "beta") return SkillDistribution::beta(j.value("a", 1.0), j.value("b", 1.0));
  if (kind == "constant") return SkillDistribution::constant(j.value("value", 0.5));
  if (kind == "explicit") return SkillDistribution::explicit_values(j.at("values").get<std::vector<double>>());
  fail(ErrorKind::kParameter, "unknown skill distribution '" + kind + "'");
}

// Shared input flags.
struct InputFlags {
  std::string input;
  std::string encoding = "pm1";
  int classes = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("input", input, "observation CSV (worker_id,task_id,label)")->required();
    cmd->add_option("--encoding", encoding, "label encoding: pm1, 01 or class")
        ->check(CLI::IsMember({"pm1", "01", "class"}));
    cmd->add_option("--classes", classes, "number of classes (class encoding; 0 = infer)")
        ->check(CLI::NonNegativeNumber);
  }
  LabeledData load() const {
    return read_observations_file(input, parse_label_encoding(encoding), classes);
  }
};

struct SolverFlags {
  std::string method = "pgd";
  std::optional<double> eta, alpha, tol_grad;
  double kappa = 0.05, cap_k = 1.0, tau = 1.0, tol_step = 1e-10;
  int max_iters = 100000;
  std::uint64_t seed = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--method", method, "pgd or expgrad")->check(CLI::IsMember({"pgd", "expgrad"}));
    cmd->add_option("--eta", eta, "PGD step size (default kappa^2 / (K^4 ||N||_inf))")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", alpha, "expgrad step size (default 1/(2 sqrt(W) ||N||_2 K^2))")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--kappa", kappa, "lower skill magnitude for expgrad / step defaults")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--K", cap_k, "upper skill magnitude")->check(CLI::PositiveNumber);
    cmd->add_option("--tau", tau, "boundary projection strength")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iters", max_iters, "iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-grad", tol_grad, "projected-gradient tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-step", tol_step, "step-size tolerance")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", seed, "random seed");
  }
  SolverConfig config() const {
    SolverConfig c;
    c.method = parse_method(method);
    c.eta = eta;
    c.alpha = alpha;
    c.kappa = kappa;
    c.cap_k = cap_k;
    c.tau = tau;
    c.max_iters = max_iters;
    c.tol_grad = tol_grad;
    c.tol_step = tol_step;
    c.seed = seed;
    return c;
  }
};

// ---- check ---------------------------------------------------------------

int cmd_check(const InputFlags& in, double delta, const std::string& out_path) {
  const auto data = in.load();
  const auto graph = build_graph(data.observations);
  const auto comps = analyze_components(graph);

  json report;
  report["worker_count"] = graph.worker_count();
  report["task_count"] = data.observations.task_count();
  report["class_count"] = data.observations.class_count();
  report["observations"] = data.observations.size();
  report["edge_count"] = graph.edge_count();
  report["identifiable"] = comps.identifiable;

  std::optional<SpectralReport> spectral;
  if (graph.edge_count() > 0) spectral = spectral_report(graph, comps);
  json components = json::array();
  for (std::size_t c = 0; c < comps.components.size(); ++c) {
    json jc;
    json ids = json::array();
    for (int w : comps.components[c]) ids.push_back(data.workers.name(w));
    jc["workers"] = ids;
    jc["size"] = comps.components[c].size();
    jc["bipartite"] = static_cast<bool>(comps.bipartite[c]);
    jc["estimable"] = comps.estimable(c);
    if (comps.components[c].size() < 2) jc["note"] = "isolated worker; skill not estimable";
    jc["lambda_min"] = spectral ? json(spectral->lambda_min_signless[c]) : json(0.0);
    jc["lambda_min_unit"] = spectral ? json(spectral->lambda_min_unit[c]) : json(0.0);
    components.push_back(jc);
  }
  report["components"] = components;

  int dmin = std::numeric_limits<int>::max(), dmax = 0;
  double dsum = 0.0;
  for (int w = 0; w < graph.worker_count(); ++w) {
    dmin = std::min(dmin, graph.degree(w));
    dmax = std::max(dmax, graph.degree(w));
    dsum += graph.degree(w);
  }
  report["degree"] = {{"min", dmin}, {"max", dmax}, {"mean", dsum / graph.worker_count()}};
  if (graph.edge_count() > 0) {
    report["n_min"] = graph.n_min();
    report["norm_inf"] = spectral->norm_inf;
    report["norm_two"] = spectral->norm_two;
    report["hoeffding"] = {{"delta", delta},
                           {"radius", hoeffding_radius(graph.n_min(),
                                                       static_cast<double>(graph.degree_sum()), delta)}};
  } else {
    report["n_min"] = 0;
    report["hoeffding"] = {{"delta", delta}, {"radius", nullptr}};
  }
  emit(out_path, report.dump(2) + "\n");
  return 0;
}

// ---- estimate -------------------------------------------------------------

json skills_document(const LabeledData& data, const EstimateResult& est, const SolverConfig& cfg,
                     const EstimateOptions& opts) {
  json workers = json::array();
  for (int i = 0; i < data.workers.size(); ++i) {
    workers.push_back({{"id", data.workers.name(i)},
                       {"s", est.skills.values(i)},
                       {"n_tasks", est.tasks_per_worker[static_cast<std::size_t>(i)]},
                       {"magnitude", est.magnitudes.values(i)},
                       {"sign", est.signs.signs[static_cast<std::size_t>(i)]},
                       {"N_i", est.graph.weighted_degree(i)}});
  }
  json meta;
  meta["method"] = to_string(cfg.method);
  meta[cfg.method == Method::kPgd ? "eta" : "alpha"] = est.trace.step_size;
  meta["iterations"] = est.trace.iterations;
  meta["converged"] = est.trace.converged;
  meta["termination"] = to_string(est.trace.reason);
  meta["final_loss"] = est.trace.final_loss;
  meta["perturbation_bound"] = est.perturbation_bound ? json(*est.perturbation_bound) : json(nullptr);
  meta["hoeffding_radius"] = est.hoeffding_radius;
  meta["hoeffding_delta"] = opts.hoeffding_delta;
  meta["identifiable"] = est.components.identifiable;
  meta["forced"] = opts.force;
  meta["class_count"] = data.observations.class_count();
  meta["encoding"] = to_string(data.encoding);
  meta["worker_count"] = data.workers.size();
  meta["task_count"] = data.observations.task_count();
  meta["edge_count"] = est.graph.edge_count();
  meta["n_min"] = est.graph.n_min();
  meta["kappa"] = cfg.kappa;
  meta["K"] = cfg.cap_k;
  meta["tau"] = cfg.tau;
  meta["seed"] = cfg.seed;
  meta["sign"] = {{"flipped", est.signs.flipped_globally},
                  {"zero_sum_ambiguous", est.signs.zero_sum_ambiguous},
                  {"checked_edges", est.signs.checked_edges},
                  {"disagreeing_edges", est.signs.disagreeing_edges},
                  {"insignificant_edges", est.signs.insignificant_edges},
                  {"blocks", est.signs.sign_blocks}};
  return {{"workers", workers}, {"meta", meta}};
}

int cmd_estimate(const InputFlags& in, const SolverFlags& sf, const EstimateOptions& base,
                 const std::string& out_path) {
  const auto data = in.load();
  EstimateOptions opts = base;
  opts.solver = sf.config();
  const auto est = estimate_skills(data.observations, opts);
  if (!est.trace.converged)
    std::cerr << "warning: solver stopped at the iteration cap (" << est.trace.iterations << ")\n";
  emit(out_path, skills_document(data, est, opts.solver, opts).dump(2) + "\n");
  return 0;
}

// ---- infer ----------------------------------------------------------------

std::map<std::string, double> read_skill_map(const json& doc, const std::string& path) {
  std::map<std::string, double> out;
  try {
    for (const auto& w : doc.at("workers")) out[w.at("id").get<std::string>()] = w.at("s").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, path + ": malformed skills file: " + e.what());
  }
  return out;
}

int cmd_infer(const InputFlags& in, const std::string& skills_path, bool baseline,
              const std::string& out_path) {
  const auto data = in.load();
  const auto doc = read_json_file(skills_path);
  const int m = data.observations.class_count();
  if (doc.contains("meta") && doc["meta"].contains("class_count")) {
    const int skill_m = doc["meta"]["class_count"].get<int>();
    require(skill_m == m, ErrorKind::kParameter,
            "class mismatch: skills file has " + std::to_string(skill_m) + " classes, data has " +
                std::to_string(m));
  }
  const auto skill_map = read_skill_map(doc, skills_path);
  SkillVector skills;
  skills.class_count = m;
  skills.values = Eigen::VectorXd::Zero(data.workers.size());
  int missing = 0;
  for (int i = 0; i < data.workers.size(); ++i) {
    const auto it = skill_map.find(data.workers.name(i));
    if (it == skill_map.end()) {
      ++missing;  // weight 0
      continue;
    }
    skills.values(i) = it->second;
  }
  const auto pred = plug_in_predict(data.observations, skills);
  std::vector<int> mv;
  if (baseline) mv = majority_vote(data.observations);

  json tasks = json::array();
  int abstained = 0;
  for (int t = 0; t < data.observations.task_count(); ++t) {
    json row;
    row["id"] = data.tasks.name(t);
    const int cls = pred[static_cast<std::size_t>(t)];
    row["abstain"] = cls == kAbstainClass;
    if (cls == kAbstainClass) {
      ++abstained;
      row["label"] = nullptr;
      row["class"] = nullptr;
    } else {
      row["label"] = encode_label(cls, data.encoding);
      row["class"] = cls;
    }
    if (baseline) {
      const int b = mv[static_cast<std::size_t>(t)];
      row["mv_class"] = b == kAbstainClass ? json(nullptr) : json(b);
    }
    tasks.push_back(row);
  }
  json doc_out = {{"tasks", tasks},
                  {"meta",
                   {{"class_count", m},
                    {"encoding", to_string(data.encoding)},
                    {"abstained", abstained},
                    {"workers_without_skill", missing},
                    {"baseline", baseline}}}};
  emit(out_path, doc_out.dump(2) + "\n");
  return 0;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const SynthConfig& cfg, const std::string& encoding_name, const std::string& outdir) {
  const auto inst = generate(cfg);
  const auto encoding = parse_label_encoding(encoding_name);
  require(cfg.class_count == 2 || encoding == LabelEncoding::kClassIndex, ErrorKind::kParameter,
          "multiclass data needs --encoding class");
  IdMap workers, tasks;
  for (int i = 0; i < cfg.worker_count; ++i) workers.intern("w" + std::to_string(i));
  for (int t = 0; t < cfg.task_count; ++t) tasks.intern("t" + std::to_string(t));

  fs::create_directories(outdir);
  std::ostringstream obs, truth;
  write_observations(obs, inst.observations, workers, tasks, encoding);
  write_truth(truth, inst.labels, tasks, encoding);
  emit((fs::path(outdir) / "observations.csv").string(), obs.str());
  emit((fs::path(outdir) / "truth.csv").string(), truth.str());

  const auto n_tasks = inst.observations.tasks_per_worker();
  json ws = json::array();
  for (int i = 0; i < cfg.worker_count; ++i)
    ws.push_back({{"id", workers.name(i)}, {"s", inst.skills.values(i)},
                  {"n_tasks", n_tasks[static_cast<std::size_t>(i)]}});
  json meta = {{"family", to_string(cfg.graph_family)},
               {"worker_count", cfg.worker_count},
               {"task_count", cfg.task_count},
               {"class_count", cfg.class_count},
               {"skills", skill_spec_json(cfg.skills)},
               {"mean_s", inst.skills.values.mean()},
               {"seed", cfg.seed},
               {"assignment", to_string(inst.assignment)},
               {"encoding", to_string(encoding)}};
  if (cfg.graph_family == GraphFamily::kErdosRenyi) meta["edge_probability"] = cfg.edge_probability;
  meta["assumption"] = inst.assignment == AssignmentMode::kEdgeRoundRobin
                           ? "task t is labeled by the two workers of design edge t mod |E|"
                           : "every worker labels every task";
  emit((fs::path(outdir) / "skills.json").string(),
       json({{"workers", ws}, {"meta", meta}}).dump(2) + "\n");
  return 0;
}

// ---- eval -----------------------------------------------------------------

PredictionError score_predictions(const std::string& pred_path, const std::string& truth_path,
                                  LabelEncoding encoding) {
  const auto doc = read_json_file(pred_path);
  const auto truth_rows = read_truth_file(truth_path, encoding);
  std::map<std::string, int> truth;
  for (const auto& [id, cls] : truth_rows) truth[id] = cls;

  std::vector<int> pred_classes, truth_classes;
  std::vector<std::string> offenders;
  std::set<std::string> seen;
  try {
    for (const auto& row : doc.at("tasks")) {
      const auto id = row.at("id").get<std::string>();
      seen.insert(id);
      const auto it = truth.find(id);
      if (it == truth.end()) {
        offenders.push_back(id);
        continue;
      }
      pred_classes.push_back(row.at("class").is_null() ? kAbstainClass : row.at("class").get<int>());
      truth_classes.push_back(it->second);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, pred_path + ": malformed predictions file: " + e.what());
  }
  for (const auto& [id, cls] : truth)
    if (!seen.count(id)) offenders.push_back(id);
  if (!offenders.empty()) {
    std::string list;
    for (std::size_t k = 0; k < std::min<std::size_t>(10, offenders.size()); ++k)
      list += (k ? ", " : "") + offenders[k];
    fail(ErrorKind::kData, "task ids differ between " + pred_path + " and " + truth_path + " (" +
                               std::to_string(offenders.size()) + " offenders: " + list +
                               (offenders.size() > 10 ? ", ..." : "") + ")");
  }
  return prediction_error(pred_classes, truth_classes);
}

int cmd_eval(const std::vector<std::string>& preds, const std::vector<std::string>& truths,
             const std::string& encoding_name, const std::string& est_path,
             const std::string& true_path, double x, const std::string& series,
             const std::string& out_path, const std::string& csv_path) {
  require(truths.size() == 1 || truths.size() == preds.size(), ErrorKind::kParameter,
          "give one --truth file or one per --pred file");
  const auto encoding = parse_label_encoding(encoding_name);
  json runs = json::array();
  std::vector<double> rates;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const auto& truth_path = truths.size() == 1 ? truths[0] : truths[k];
    const auto pe = score_predictions(preds[k], truth_path, encoding);
    rates.push_back(pe.rate);
    runs.push_back({{"predictions", preds[k]},
                    {"pe", pe.rate},
                    {"errors", pe.errors},
                    {"scored", pe.scored},
                    {"abstained", pe.abstained}});
  }
  const auto [mean, sd] = mean_std(rates);
  json metrics = {{"pe_mean", mean}, {"pe_std", sd}, {"runs", runs}};

  if (!true_path.empty()) {
    const auto truth_skills = read_skill_map(read_json_file(true_path), true_path);
    SkillVector s;
    s.values.resize(static_cast<Eigen::Index>(truth_skills.size()));
    Eigen::Index k = 0;
    bool open = true;
    for (const auto& [id, v] : truth_skills) {
      s.values(k++) = v;
      open = open && std::abs(v) < 1.0;
    }
    if (open) {
      const auto cp = committee_potential(s);
      metrics["committee_potential"] = {
          {"phi", cp.phi}, {"error_upper", cp.error_upper}, {"error_lower", cp.error_lower}};
    } else {
      metrics["committee_potential"] = {{"phi", nullptr}, {"note", "true skill at +-1; weights infinite"}};
    }
    if (!est_path.empty()) {
      const auto est = read_skill_map(read_json_file(est_path), est_path);
      double inf = 0.0, l2 = 0.0;
      int missing = 0;
      for (const auto& [id, v] : truth_skills) {
        const auto it = est.find(id);
        const double e = it == est.end() ? 0.0 : it->second;
        if (it == est.end()) ++missing;
        inf = std::max(inf, std::abs(e - v));
        l2 += (e - v) * (e - v);
      }
      metrics["skill_error"] = {{"inf", inf}, {"l2", std::sqrt(l2)}, {"missing_workers", missing}};
    }
  } else {
    require(est_path.empty(), ErrorKind::kParameter, "--skills-est needs --skills-true");
  }
  emit(out_path, metrics.dump(2) + "\n");

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,mean,std,series\n" << x << ',' << number_or_null(mean).dump() << ',' << sd << ',' << series << '\n';
    emit(csv_path, csv.str());
  }
  return 0;
}

// ---- sweep ----------------------------------------------------------------

SweepSpec sweep_from_json(const json& j) {
  SweepSpec spec;
  try {
    spec.base.graph_family = parse_graph_family(j.value("family", "clique"));
    spec.base.edge_probability = j.value("p", 0.3);
    spec.base.worker_count = j.value("workers", 11);
    spec.base.class_count = j.value("classes", 2);
    spec.base.shuffle_skills = j.value("shuffle", true);
    spec.base.assignment = parse_assignment_mode(j.value("assignment", "auto"));
    if (j.contains("skills")) spec.base.skills = skill_spec_from_json(j["skills"]);
    spec.task_counts = j.value("task_counts", std::vector<int>{330});
    spec.max_degrees = j.value("max_degrees", std::vector<int>{});
    const std::uint64_t first = j.value("seed", std::uint64_t{0});
    if (j.contains("seeds") && j["seeds"].is_array()) {
      spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    } else {
      const int n = j.value("seeds", 15);
      require(n > 0, ErrorKind::kParameter, "seeds must be positive");
      for (int k = 0; k < n; ++k) spec.seeds.push_back(first + static_cast<std::uint64_t>(k));
    }
    spec.xi_range = j.value("xi", 0.0);
    spec.label = j.value("label", std::string(to_string(spec.base.graph_family)));
    const json s = j.value("solver", json::object());
    spec.options.solver.method = parse_method(s.value("method", "pgd"));
    if (s.contains("eta")) spec.options.solver.eta = s["eta"].get<double>();
    if (s.contains("alpha")) spec.options.solver.alpha = s["alpha"].get<double>();
    spec.options.solver.kappa = s.value("kappa", 0.05);
    spec.options.solver.cap_k = s.value("K", 1.0);
    spec.options.solver.tau = s.value("tau", 1.0);
    spec.options.solver.max_iters = s.value("max_iters", 100000);
    if (s.contains("tol_grad")) spec.options.solver.tol_grad = s["tol_grad"].get<double>();
    spec.options.solver.tol_step = s.value("tol_step", 1e-10);
    spec.options.force = j.value("force", false);
    spec.options.strict_signs = j.value("strict_signs", false);
    if (j.contains("spammer_delta")) spec.options.spammer_delta = j["spammer_delta"].get<double>();
    spec.options.min_count = j.value("min_count", std::int64_t{1});
  } catch (const json::exception& e) {
    fail(ErrorKind::kParameter, std::string("bad experiment spec: ") + e.what());
  }
  return spec;
}

int cmd_sweep(const std::string& spec_path, int threads, const std::string& out_path,
              const std::string& trials_path) {
  const auto doc = read_json_file(spec_path);
  std::vector<json> experiments;
  if (doc.contains("experiments")) {
    for (const auto& e : doc["experiments"]) experiments.push_back(e);
  } else {
    experiments.push_back(doc);
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "x,mean,std,series\n";
  json trial_doc = json::array();
  for (const auto& e : experiments) {
    const auto spec = sweep_from_json(e);
    std::vector<TrialResult> trials;
    const auto rows = run_sweep(spec, threads, &trials);
    for (const auto& r : rows) {
      csv << r.x << ',' << number_or_null(r.mean).dump() << ',' << r.std << ',' << r.series << '\n';
      if (r.failures > 0)
        std::cerr << "warning: " << r.series << " at x=" << r.x << ": " << r.failures
                  << " seed(s) failed estimation and were excluded\n";
    }
    for (const auto& t : trials) {
      trial_doc.push_back({{"label", spec.label},
                           {"seed", t.seed},
                           {"task_count", t.task_count},
                           {"pe_pipeline", number_or_null(t.pe_pipeline)},
                           {"pe_majority", t.pe_majority},
                           {"pe_oracle", t.pe_oracle},
                           {"skill_error_inf", number_or_null(t.skill_error_inf)},
                           {"mean_skill", t.mean_skill},
                           {"error", t.error}});
    }
  }
  emit(out_path, csv.str());
  if (!trials_path.empty()) emit(trials_path, trial_doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowdrank: worker skill estimation and label aggregation from pairwise agreement"};
  app.require_subcommand(1);

  InputFlags check_in;
  double check_delta = 0.05;
  std::string check_out;
  auto* check = app.add_subcommand("check", "report components, bipartiteness and identifiability");
  check_in.add(check);
  check->add_option("--delta", check_delta, "confidence for the Hoeffding radius")
      ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0));
  check->add_option("-o,--out", check_out, "output JSON (default stdout)");

  InputFlags est_in;
  SolverFlags est_solver;
  EstimateOptions est_opts;
  std::optional<double> spammer_delta;
  std::string est_out;
  auto* estimate = app.add_subcommand("estimate", "estimate worker skills");
  est_in.add(estimate);
  est_solver.add(estimate);
  estimate->add_option("--spammer-delta", spammer_delta, "drop edges with |c| < delta + sqrt(log W / n)")
      ->check(CLI::NonNegativeNumber);
  estimate->add_option("--min-count", est_opts.min_count, "drop edges with fewer shared tasks")
      ->check(CLI::PositiveNumber);
  estimate->add_flag("--force", est_opts.force, "estimate even when a component is bipartite");
  estimate->add_flag("--strict-signs", est_opts.strict_signs,
                     "fail when a needed edge has zero correlation instead of orienting each side separately");
  estimate->add_option("--delta", est_opts.hoeffding_delta, "confidence for the Hoeffding radius")
      ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0));
  estimate->add_option("-o,--out", est_out, "skills JSON (default stdout)");

  InputFlags inf_in;
  std::string inf_skills, inf_out;
  bool inf_baseline = false;
  auto* infer = app.add_subcommand("infer", "predict task labels from estimated skills");
  inf_in.add(infer);
  infer->add_option("--skills", inf_skills, "skills JSON from estimate")->required();
  infer->add_flag("--baseline", inf_baseline, "add a majority-vote column");
  infer->add_option("-o,--out", inf_out, "predictions JSON (default stdout)");

  SynthConfig syn;
  std::string syn_family = "clique", syn_skills = "grid:-0.3,0.8", syn_assign = "auto",
              syn_encoding = "pm1", syn_outdir = ".";
  bool syn_no_shuffle = false;
  auto* synth = app.add_subcommand("synth", "generate a synthetic instance");
  synth->add_option("--family", syn_family, "clique, star3, ring, grid_plus_edge or erdos_renyi")
      ->check(CLI::IsMember({"clique", "star3", "ring", "grid_plus_edge", "erdos_renyi"}));
  synth->add_option("--p", syn.edge_probability, "Erdos-Renyi edge probability");
  synth->add_option("--workers", syn.worker_count, "number of workers")->check(CLI::PositiveNumber);
  synth->add_option("--tasks", syn.task_count, "number of tasks")->check(CLI::PositiveNumber);
  synth->add_option("--skills", syn_skills, "grid:lo,hi | beta:a,b | constant:c | explicit:s1,s2,...");
  synth->add_flag("--no-shuffle", syn_no_shuffle, "keep grid skills in worker order");
  synth->add_option("--classes", syn.class_count, "number of classes")->check(CLI::PositiveNumber);
  synth->add_option("--assignment", syn_assign, "auto, round_robin or all_workers")
      ->check(CLI::IsMember({"auto", "round_robin", "all_workers"}));
  synth->add_option("--encoding", syn_encoding, "label encoding: pm1, 01 or class")
      ->check(CLI::IsMember({"pm1", "01", "class"}));
  synth->add_option("--seed", syn.seed, "random seed");
  synth->add_option("--outdir", syn_outdir, "output directory");

  std::vector<std::string> ev_preds, ev_truths;
  std::string ev_encoding = "pm1", ev_est, ev_true, ev_series = "pipeline", ev_out, ev_csv;
  double ev_x = 0.0;
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--pred", ev_preds, "predictions JSON (repeat for several seeds)")->required();
  eval->add_option("--truth", ev_truths, "truth CSV (task_id,label), one or one per --pred")->required();
  eval->add_option("--encoding", ev_encoding, "truth label encoding")
      ->check(CLI::IsMember({"pm1", "01", "class"}));
  eval->add_option("--skills-est", ev_est, "estimated skills JSON");
  eval->add_option("--skills-true", ev_true, "true skills JSON");
  eval->add_option("--x", ev_x, "x value for the plot CSV row");
  eval->add_option("--series", ev_series, "series name for the plot CSV row");
  eval->add_option("-o,--out", ev_out, "metrics JSON (default stdout)");
  eval->add_option("--csv", ev_csv, "plot CSV (x,mean,std,series)");

  std::string sw_spec, sw_out, sw_trials;
  int sw_threads = default_threads();
  auto* sweep = app.add_subcommand("sweep", "multi-seed experiment driver");
  sweep->add_option("spec", sw_spec, "experiment spec JSON")->required();
  sweep->add_option("--threads", sw_threads, "parallel instances (default $CROWDRANK_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("-o,--out", sw_out, "tidy CSV (default stdout)");
  sweep->add_option("--trials", sw_trials, "per-seed results JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*check) return cmd_check(check_in, check_delta, check_out);
    if (*estimate) {
      est_opts.spammer_delta = spammer_delta;
      return cmd_estimate(est_in, est_solver, est_opts, est_out);
    }
    if (*infer) return cmd_infer(inf_in, inf_skills, inf_baseline, inf_out);
    if (*synth) {
      syn.graph_family = parse_graph_family(syn_family);
      syn.skills = parse_skill_spec(syn_skills);
      syn.shuffle_skills = !syn_no_shuffle;
      syn.assignment = parse_assignment_mode(syn_assign);
      return cmd_synth(syn, syn_encoding, syn_outdir);
    }
    if (*eval)
      return cmd_eval(ev_preds, ev_truths, ev_encoding, ev_est, ev_true, ev_x, ev_series, ev_out, ev_csv);
    if (*sweep) return cmd_sweep(sw_spec, sw_threads, sw_out, sw_trials);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
