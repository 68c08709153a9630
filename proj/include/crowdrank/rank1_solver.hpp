#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crowdrank/correlation.hpp"
#include "crowdrank/interaction_graph.hpp"

namespace crowdrank {

/// Per-worker skills. Binary skills live in [-1, 1]; M-class skills in
/// [-1/(M-1), 1]. `magnitude_only` marks estimates of |s| taken before sign
/// recovery (all entries nonnegative).
struct SkillVector {
  Eigen::VectorXd values;
  bool magnitude_only = false;
  int class_count = 2;

  int size() const noexcept { return static_cast<int>(values.size()); }
  double lower_bound() const noexcept { return -1.0 / static_cast<double>(class_count - 1); }
};

enum class Method { kPgd, kExpgrad };

const char* to_string(Method method) noexcept;
Method parse_method(const std::string& name);

struct SolverConfig {
  Method method = Method::kPgd;
  std::optional<double> eta;    // PGD step; default_eta() when unset
  std::optional<double> alpha;  // expgrad step; 1/(2 sqrt(W) ||N||_2 K^2) when unset
  double kappa = 0.05;          // lower edge of the expgrad cube
  double cap_k = 1.0;           // upper edge of the expgrad cube
  double tau = 1.0;             // PGD boundary projection [-1 + tau/sqrt(N_i), 1 - tau/sqrt(N_i)]
  int max_iters = 100000;
  std::optional<double> tol_grad;  // default 1e-8 * (1 + ||N||_inf)
  double tol_step = 1e-10;
  std::uint64_t seed = 0;
  /// When set, the trace records V(x^t) against this reference.
  std::optional<Eigen::VectorXd> lyapunov_reference;
  /// Keep a copy of every iterate in the trace.
  bool record_iterates = false;

  void validate() const;
};

enum class Termination { kGradient, kStep, kMaxIters };

const char* to_string(Termination reason) noexcept;

/// State at iterate x^t and the step taken from it.
struct IterationRecord {
  double loss = 0.0;
  double grad_norm = 0.0;   // inf-norm of the projected gradient
  double lyapunov = 0.0;    // NaN without a reference
  double max_change = 0.0;  // max_i |x^{t+1}_i - x^t_i|
};

struct SolverTrace {
  std::vector<IterationRecord> records;  // one per step taken
  std::vector<Eigen::VectorXd> iterates; // x^0 .. x^T when record_iterates is set
  Eigen::VectorXd final_iterate;
  double final_loss = 0.0;
  double final_lyapunov = 0.0;
  double step_size = 0.0;
  int iterations = 0;
  bool converged = false;
  Termination reason = Termination::kMaxIters;
};

struct SolveResult {
  SkillVector skills;
  SolverTrace trace;
};

/// L(x) = 1/2 sum_{(i,j) in E} N_ij (c_ij - x_i x_j)^2, each edge once.
double loss(const Eigen::VectorXd& x, const CorrelationEstimate& corr);

/// dL/dx_i = -sum_j N_ij (c_ij - x_i x_j) x_j.
Eigen::VectorXd gradient(const Eigen::VectorXd& x, const CorrelationEstimate& corr);

/// [grad_t]_i = sum_j N_ij (x_i x_j - c_ij), the expgrad search direction.
Eigen::VectorXd expgrad_direction(const Eigen::VectorXd& x, const CorrelationEstimate& corr);

/// kappa^2 / (K^4 ||N||_inf): a step that satisfies the Lyapunov step cap for
/// any s, x^0 in [kappa, K]^W.
double default_eta(const InteractionGraph& graph, double cap_k, double kappa);

/// 1 / (2 sqrt(W) ||N||_2 K^2) with ||N||_2 from power iteration.
double default_alpha(const InteractionGraph& graph, double cap_k);

/// Projected gradient descent with boundary projection. Solves for whatever
/// correlations are given; feed |c| to get a magnitude estimate.
SolveResult pgd_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                      const SolverConfig& config, const Eigen::VectorXd& x0);
SolveResult pgd_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                      const SolverConfig& config);

/// Multiplicative update x <- clip(x * exp(-alpha grad_t), kappa, K) with the
/// revealed entries first clipped into [kappa^2, K^2].
SolveResult expgrad_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                          const SolverConfig& config, const Eigen::VectorXd& x0);
SolveResult expgrad_solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                          const SolverConfig& config);

/// Dispatches on config.method with the method's default start.
SolveResult solve(const CorrelationEstimate& corr, const InteractionGraph& graph,
                  const SolverConfig& config);

/// V(x) = max_i max(x_i / ref_i, ref_i / x_i).
double lyapunov_v(const Eigen::VectorXd& x, const Eigen::VectorXd& reference);

/// mu = kappa^2 * lambda_min(unit-weight L_s) * N_min, the strong convexity
/// constant of the log-domain potential. Requires a connected, non-bipartite
/// graph.
double strong_convexity(const InteractionGraph& graph, const SpectralReport& spectral, double kappa);

/// K * sqrt(W) ||N||_inf / mu * delta_max.
double perturbation_bound(const InteractionGraph& graph, const SpectralReport& spectral,
                          double kappa, double cap_k, double delta_max);

/// (4L/mu) log(W K^4 L / (eps mu kappa^2)) with L = 2 sqrt(W) ||N||_2 K^2:
/// iterations until ||x(t) - x*||_2^2 <= eps.
double expgrad_iteration_bound(const InteractionGraph& graph, const SpectralReport& spectral,
                               double kappa, double cap_k, double eps);

/// g(z) = 1/2 sum_{i,j} N_ij e^{z_i + z_j} - sum_i z_i sum_j N_ij c_ij over
/// ordered pairs. Its gradient at z = log x is expgrad_direction(x).
double potential_g(const Eigen::VectorXd& z, const CorrelationEstimate& corr);

}  // namespace crowdrank
