#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "polymin/core.hpp"
#include "polymin/dynamics.hpp"
#include "polymin/polymorphisms.hpp"

namespace polymin {

struct EstimatorParams {
  double eps = 0.1;       // target accuracy as a fraction of ||f||_inf
  double b = 0.0;         // perturbation magnitude
  int r = 0;              // walk length
  int m = 1;              // Monte-Carlo sample count
  double delta = 0.01;    // failure probability for the half-width
  std::uint64_t seed = 0;
  bool override_checks = false;  // skip polymorphism verification (recorded)
  int threads = 1;
};

/// Paper-faithful default schedule for a given accuracy target: b = eps/(10qn),
/// r = ceil((2n/eps) ln(10qn/eps) ln^2(2qn/eps)), m = ceil(200 ln(2/delta)/eps^2).
/// These grow quickly as eps shrinks; callers running sweeps usually override
/// r and m with empirically sufficient values.
EstimatorParams default_estimator_params(double eps, int q, int n,
                                         double delta = 0.01,
                                         std::uint64_t seed = 0);

struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
  long long queries_used = 0;
  Assignment incumbent;
  double incumbent_value = 0.0;
  bool override_used = false;
};

/// w'_i(a) = (w_i(a) + b) / (1 + q b): every entry ends >= b/(1+qb), sums stay 1.
MarginalProfile perturb_marginals(const MarginalProfile& w, double b);

/// Randomized convex-extension estimator: perturb w, run m independent
/// operation walks of length r, average f over the sampled assignments.
/// Returns the mean, a Hoeffding half-width at confidence 1-delta, and the
/// best assignment seen. Requires P measure preserving with transitive
/// symmetric atoms unless params.override_checks is set.
Estimate estimate_convex_extension(const ValueOracle& oracle,
                                   const OperationDistribution& P,
                                   const MarginalProfile& w,
                                   const EstimatorParams& params);

/// Exact convex extension via the coupling linear program
///   min sum_x f(x) mu(x)  s.t.  mu >= 0, sum mu = 1, marginals = w,
/// solved by a dense two-phase simplex method with Bland anti-cycling
/// pivoting. Test oracle; capped at q^n <= cap variables.
double exact_convex_extension_lp(const ValueOracle& oracle,
                                 const MarginalProfile& w,
                                 std::int64_t cap = 4096);

/// Lovasz extension of a submodular q=2 function by the greedy sorting
/// formula, with t_i = w_i(1). Verifies submodularity exhaustively (min_max
/// fractional-polymorphism check) unless verify=false.
double lovasz_extension(const ValueOracle& oracle, const Eigen::VectorXd& t,
                        bool verify = true);

}  // namespace polymin
