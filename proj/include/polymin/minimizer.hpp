#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "polymin/convex_extension.hpp"
#include "polymin/core.hpp"
#include "polymin/dynamics.hpp"
#include "polymin/rng.hpp"

namespace polymin {

struct MinimizerParams {
  double eps_opt = 0.1;   // target accuracy as a fraction of L
  double L = 1.0;         // Lipschitz bound (default ||f||_inf)
  double diameter = 1.0;  // Delta(Q), default sqrt(2n)
  int N = 2;              // ambient dimension n*q
  int T = 1;              // iteration cap
  double step_h = 0.1;
  double smoothing_mu = 1e-3;
  int grad_batch = 4;
  std::uint64_t seed = 0;
};

/// Unit-constant instantiation of the random-smoothing schedule:
/// T = min(cap, ceil((N+4) L^2 D^2 / eps^2)), h = D/(L sqrt(N+4) sqrt(T)),
/// mu = eps*D/(4 L sqrt(N)).
MinimizerParams default_minimizer_params(double eps_opt, int q, int n, double L,
                                         std::uint64_t seed,
                                         int iteration_cap = 100000);

/// Euclidean projection onto Delta_q by the sort-and-threshold rule.
SimplexPoint project_simplex_block(const Eigen::VectorXd& v);

/// Blockwise projection onto Delta_q^n of a flattened nq vector.
MarginalProfile project_domain(const Eigen::VectorXd& v, int q, int n);

/// Evaluation oracle for the objective with a declared noise half-width.
struct NoisyObjective {
  std::function<double(const MarginalProfile&, Rng&)> eval;
  double noise_half_width = 0.0;
};

/// Averaged two-point Gaussian difference quotient at x (flattened), with
/// directions drawn in the zero-sum tangent space of each q-block and probe
/// points projected back onto the domain.
Eigen::VectorXd estimate_smoothed_gradient(const NoisyObjective& objective,
                                           const Eigen::VectorXd& x, int q,
                                           int n, double smoothing_mu,
                                           int batch, Rng& rng);

struct SmoothedResult {
  MarginalProfile point;        // iterate with the lowest re-evaluated objective
  double value = 0.0;
  bool budget_exhausted = false;  // T was capped below the theoretical schedule
  bool noise_warning = false;
  std::vector<std::pair<int, double>> trajectory;  // (iter, objective estimate)
};

/// Projected random-smoothing descent over Delta_q^n.
SmoothedResult minimize_smoothed(const NoisyObjective& objective,
                                 const MarginalProfile& start,
                                 const MinimizerParams& params, Rng& rng);

/// Knobs for the end-to-end pipeline. The estimator sub-calls use the
/// perturbation of eps/10 but practical r/m budgets; the theoretical
/// schedules are available through default_estimator_params.
struct PipelineOptions {
  int walk_r = 0;          // 0 = auto (4n + 16)
  int samples_m = 512;     // Monte-Carlo samples per objective evaluation
  int descent_T = 150;     // iterations per restart
  int grad_batch = 2;
  int restarts = 3;
  int threads = 1;
  bool override_checks = false;
  std::int64_t query_budget = 0;  // 0 = unlimited; exceeded -> stop, flag
  bool record_trajectory = true;
};

struct MinimizeResult {
  Assignment best_assignment;
  double best_value = 0.0;
  MarginalProfile final_marginals;
  std::vector<std::pair<int, double>> trajectory;  // (iter, objective estimate)
  std::vector<double> incumbent_curve;             // incumbent value per iter
  long long queries_used = 0;
  bool budget_exhausted = false;
};

/// End-to-end minimization: random-smoothing descent on the estimated convex
/// extension, returning the best integral assignment seen across all
/// estimator samples. Target contract: f(x) <= min f + eps ||f||_inf.
MinimizeResult minimize_function(const ValueOracle& oracle,
                                 const OperationDistribution& P, double eps,
                                 std::uint64_t seed,
                                 const PipelineOptions& opts = {});

}  // namespace polymin
