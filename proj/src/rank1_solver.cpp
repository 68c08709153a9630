#include "crowdrank/rank1_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crowdrank/error.hpp"

namespace crowdrank {

const char* to_string(Method method) noexcept {
  return method == Method::kPgd ? "pgd" : "expgrad";
}

Method parse_method(const std::string& name) {
  if (name == "pgd") return Method::kPgd;
  if (name == "expgrad") return Method::kExpgrad;
  fail(ErrorKind::kParameter, "unknown solver method '" + name + "' (expected pgd or expgrad)");
}

const char* to_string(Termination reason) noexcept {
  switch (reason) {
    case Termination::kGradient: return "gradient";
    case Termination::kStep: return "step";
    case Termination::kMaxIters: return "max_iters";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  require(!eta || *eta > 0.0, ErrorKind::kParameter, "eta must be positive");
  require(!alpha || *alpha > 0.0, ErrorKind::kParameter, "alpha must be positive");
  require(kappa > 0.0, ErrorKind::kParameter, "kappa must be positive");
  require(kappa <= cap_k, ErrorKind::kParameter, "kappa must not exceed K");
  require(tau >= 0.0, ErrorKind::kParameter, "tau must be nonnegative");
  require(max_iters >= 1, ErrorKind::kParameter, "max_iters must be at least 1");
  require(!tol_grad || *tol_grad > 0.0, ErrorKind::kParameter, "tol_grad must be positive");
  require(tol_step > 0.0, ErrorKind::kParameter, "tol_step must be positive");
}

namespace {

void check_dimension(const Eigen::VectorXd& x, const CorrelationEstimate& corr) {
  require(x.size() == corr.worker_count(), ErrorKind::kParameter,
          "dimension mismatch: vector has " + std::to_string(x.size()) + " entries, expected " +
              std::to_string(corr.worker_count()));
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

double loss(const Eigen::VectorXd& x, const CorrelationEstimate& corr) {
  check_dimension(x, corr);
  double total = 0.0;
  for (const auto& e : corr.entries()) {
    const double r = e.c - x(e.i) * x(e.j);
    total += static_cast<double>(e.n) * r * r;
  }
  return 0.5 * total;
}

Eigen::VectorXd gradient(const Eigen::VectorXd& x, const CorrelationEstimate& corr) {
  check_dimension(x, corr);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (const auto& e : corr.entries()) {
    const double r = static_cast<double>(e.n) * (e.c - x(e.i) * x(e.j));
    g(e.i) -= r * x(e.j);
    g(e.j) -= r * x(e.i);
  }
  return g;
}

Eigen::VectorXd expgrad_direction(const Eigen::VectorXd& x, const CorrelationEstimate& corr) {
  check_dimension(x, corr);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(x.size());
  for (const auto& e : corr.entries()) {
    const double r = static_cast<double>(e.n) * (x(e.i) * x(e.j) - e.c);
    d(e.i) += r;
    d(e.j) += r;
  }
  return d;
}

double default_eta(const InteractionGraph& graph, double cap_k, double kappa) {
  require(graph.edge_count() > 0, ErrorKind::kData, "no interactions");
  require(kappa > 0.0 && kappa <= cap_k, ErrorKind::kParameter, "need 0 < kappa <= K");
  const double k2 = cap_k * cap_k;
  return (kappa * kappa) / (k2 * k2 * graph.norm_inf());
}

double default_alpha(const InteractionGraph& graph, double cap_k) {
  require(graph.edge_count() > 0, ErrorKind::kData, "no interactions");
  require(cap_k > 0.0, ErrorKind::kParameter, "K must be positive");
  const double norm_two = spectral_norm_estimate(graph);
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(graph.worker_count())) * norm_two * cap_k *
                cap_k);
}

namespace {

// Shared iteration driver. `step` maps x^t to x^{t+1} and returns the
// projected-gradient inf-norm at x^t; `objective` evaluates the recorded loss.
template <typename Step, typename Objective>
SolverTrace iterate(Eigen::VectorXd x, const SolverConfig& config, double tol_grad,
                    double step_size, Step step, Objective objective) {
  SolverTrace trace;
  trace.step_size = step_size;
  const bool with_reference = config.lyapunov_reference.has_value();
  if (config.record_iterates) trace.iterates.push_back(x);

  Eigen::VectorXd next(x.size());
  for (int t = 0; t < config.max_iters; ++t) {
    IterationRecord rec;
    rec.loss = objective(x);
    rec.lyapunov = with_reference ? lyapunov_v(x, *config.lyapunov_reference) : nan();
    rec.grad_norm = step(x, next);
    if (!next.allFinite()) {
      fail(ErrorKind::kNumerical, "solver diverged at iteration " + std::to_string(t + 1));
    }
    rec.max_change = x.size() > 0 ? (next - x).cwiseAbs().maxCoeff() : 0.0;
    trace.records.push_back(rec);
    x.swap(next);
    if (config.record_iterates) trace.iterates.push_back(x);
    ++trace.iterations;

    if (rec.grad_norm <= tol_grad) {
      trace.converged = true;
      trace.reason = Termination::kGradient;
      break;
    }
    if (rec.max_change <= config.tol_step) {
      trace.converged = true;
      trace.reason = Termination::kStep;
      break;
    }
  }

  trace.final_loss = objective(x);
  trace.final_lyapunov = with_reference ? lyapunov_v(x, *config.lyapunov_reference) : nan();
  trace.final_iterate = std::move(x);
  return trace;
}

double resolve_tol_grad(const SolverConfig& config, const InteractionGraph& graph) {
  return config.tol_grad.value_or(1e-8 * (1.0 + graph.norm_inf()));
}

void check_inputs(const CorrelationEstimate& corr, const InteractionGraph& graph,
                  const Eigen::VectorXd& x0) {
  require(corr.worker_count() == graph.worker_count(), ErrorKind::kParameter,
          "correlation and graph sizes differ");
  check_dimension(x0, corr);
  require(graph.edge_count() > 0, ErrorKind::kData, "no interactions");
}

bool all_nonnegative(const CorrelationEstimate& corr) {
  return std::all_of(corr.entries().begin(), corr.entries().end(),
                     [](const CorrelationEntry& e) { return e.c >= 0.0; });
}

}  // namespace

SolveResult pgd_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                      const SolverConfig& config, const Eigen::VectorXd& x0) {
  config.validate();
  check_inputs(corr, graph, x0);
  require((x0.array() > 0.0).all(), ErrorKind::kParameter,
          "PGD start must be strictly positive");

  const int w = graph.worker_count();
  const double floor = -1.0 / static_cast<double>(corr.class_count() - 1);
  Eigen::VectorXd lo(w), hi(w);
  for (int i = 0; i < w; ++i) {
    const auto n_i = graph.weighted_degree(i);
    const double margin = n_i > 0 ? config.tau / std::sqrt(static_cast<double>(n_i)) : 0.0;
    lo(i) = floor + margin;
    hi(i) = 1.0 - margin;
    if (lo(i) > hi(i)) lo(i) = hi(i) = 0.0;  // too few tasks to trust any skill
  }

  const double eta = config.eta.value_or(default_eta(graph, config.cap_k, config.kappa));
  const auto entries = corr.entries();
  Eigen::VectorXd g(w);

  auto step = [&](const Eigen::VectorXd& x, Eigen::VectorXd& next) {
    g.setZero();
    for (const auto& e : entries) {
      const double r = static_cast<double>(e.n) * (e.c - x(e.i) * x(e.j));
      g(e.i) -= r * x(e.j);
      g(e.j) -= r * x(e.i);
    }
    next = (x - eta * g).cwiseMax(lo).cwiseMin(hi);
    return (x - next).cwiseAbs().maxCoeff() / eta;
  };
  auto objective = [&](const Eigen::VectorXd& x) { return loss(x, corr); };

  SolveResult result;
  result.trace = iterate(x0, config, resolve_tol_grad(config, graph), eta, step, objective);
  result.skills.values = result.trace.final_iterate;
  result.skills.class_count = corr.class_count();
  result.skills.magnitude_only = all_nonnegative(corr) && (result.skills.values.array() >= 0.0).all();
  return result;
}

SolveResult pgd_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                      const SolverConfig& config) {
  return pgd_solve(corr, graph, config, Eigen::VectorXd::Constant(graph.worker_count(), 0.5));
}

SolveResult expgrad_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                          const SolverConfig& config, const Eigen::VectorXd& x0) {
  config.validate();
  check_inputs(corr, graph, x0);
  const double kappa = config.kappa;
  const double cap_k = config.cap_k;
  require((x0.array() >= kappa).all() && (x0.array() <= cap_k).all(), ErrorKind::kParameter,
          "expgrad start must lie in [kappa, K]^W");

  const auto clipped = corr.transform([&](const CorrelationEntry& e) {
    return std::clamp(e.c, kappa * kappa, cap_k * cap_k);
  });
  const double alpha = config.alpha.value_or(default_alpha(graph, cap_k));
  const auto entries = clipped.entries();
  const int w = graph.worker_count();
  Eigen::VectorXd d(w);

  auto step = [&](const Eigen::VectorXd& x, Eigen::VectorXd& next) {
    d.setZero();
    for (const auto& e : entries) {
      const double r = static_cast<double>(e.n) * (x(e.i) * x(e.j) - e.c);
      d(e.i) += r;
      d(e.j) += r;
    }
    next = (x.array() * (-alpha * d.array()).exp()).matrix().cwiseMax(kappa).cwiseMin(cap_k);
    // Projected gradient in the log domain, where the update is plain PGD.
    return (x.array().log() - next.array().log()).abs().maxCoeff() / alpha;
  };
  auto objective = [&](const Eigen::VectorXd& x) { return loss(x, clipped); };

  SolveResult result;
  result.trace = iterate(x0, config, resolve_tol_grad(config, graph), alpha, step, objective);
  result.skills.values = result.trace.final_iterate;
  result.skills.class_count = corr.class_count();
  result.skills.magnitude_only = true;
  return result;
}

SolveResult expgrad_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                          const SolverConfig& config) {
  return expgrad_solve(
      corr, graph, config,
      Eigen::VectorXd::Constant(graph.worker_count(), std::sqrt(config.kappa * config.cap_k)));
}

SolveResult solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                  const SolverConfig& config) {
  return config.method == Method::kPgd ? pgd_solve(corr, graph, config)
                                       : expgrad_solve(corr, graph, config);
}

double lyapunov_v(const Eigen::VectorXd& x, const Eigen::VectorXd& reference) {
  require(x.size() == reference.size(), ErrorKind::kParameter, "dimension mismatch");
  require((x.array() > 0.0).all() && (reference.array() > 0.0).all(), ErrorKind::kParameter,
          "Lyapunov function needs strictly positive vectors");
  const Eigen::ArrayXd ratio = x.array() / reference.array();
  return ratio.max(ratio.inverse()).maxCoeff();
}

double strong_convexity(const InteractionGraph& graph, const SpectralReport& spectral,
                        double kappa) {
  require(kappa > 0.0, ErrorKind::kParameter, "kappa must be positive");
  require(spectral.lambda_min_unit.size() == 1 && graph.edge_count() > 0,
          ErrorKind::kNotIdentifiable, "bound undefined; graph is not connected");
  const double lambda = spectral.lambda_min_unit.front();
  require(lambda > 0.0, ErrorKind::kNotIdentifiable, "bound undefined; not identifiable");
  return kappa * kappa * lambda * static_cast<double>(spectral.n_min);
}

double perturbation_bound(const InteractionGraph& graph, const SpectralReport& spectral,
                          double kappa, double cap_k, double delta_max) {
  require(delta_max >= 0.0, ErrorKind::kParameter, "delta_max must be nonnegative");
  require(cap_k >= kappa, ErrorKind::kParameter, "need kappa <= K");
  const double mu = strong_convexity(graph, spectral, kappa);
  return cap_k * std::sqrt(static_cast<double>(graph.worker_count())) * spectral.norm_inf / mu *
         delta_max;
}

double expgrad_iteration_bound(const InteractionGraph& graph, const SpectralReport& spectral,
                               double kappa, double cap_k, double eps) {
  require(eps > 0.0, ErrorKind::kParameter, "eps must be positive");
  const double mu = strong_convexity(graph, spectral, kappa);
  const double w = static_cast<double>(graph.worker_count());
  const double lipschitz = 2.0 * std::sqrt(w) * spectral.norm_two * cap_k * cap_k;
  const double k4 = std::pow(cap_k, 4);
  return 4.0 * lipschitz / mu * std::log(w * k4 * lipschitz / (eps * mu * kappa * kappa));
}

double potential_g(const Eigen::VectorXd& z, const CorrelationEstimate& corr) {
  check_dimension(z, corr);
  // Largest exponent that still leaves headroom below DBL_MAX after weighting.
  constexpr double kMaxExponent = 700.0;
  double total = 0.0;
  for (const auto& e : corr.entries()) {
    const double exponent = z(e.i) + z(e.j);
    require(exponent <= kMaxExponent, ErrorKind::kNumerical,
            "potential overflow: z_i + z_j = " + std::to_string(exponent));
    const double n = static_cast<double>(e.n);
    // Half of the ordered-pair double sum is one term per unordered edge.
    total += n * std::exp(exponent) - n * e.c * (z(e.i) + z(e.j));
  }
  return total;
}

}  // namespace crowdrank
