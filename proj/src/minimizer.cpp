#include "polymin/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace polymin {

MinimizerParams default_minimizer_params(double eps_opt, int q, int n, double L,
                                         std::uint64_t seed, int iteration_cap) {
  if (!(eps_opt > 0.0)) throw input_error("eps_opt must be > 0");
  if (!(L > 0.0)) throw input_error("Lipschitz bound must be > 0");
  MinimizerParams p;
  p.eps_opt = eps_opt;
  p.L = L;
  p.N = n * q;
  p.diameter = std::sqrt(2.0 * n);
  const double budget =
      (p.N + 4) * L * L * p.diameter * p.diameter / (eps_opt * eps_opt);
  p.T = static_cast<int>(std::min<double>(iteration_cap, std::ceil(budget)));
  p.T = std::max(p.T, 1);
  p.step_h = p.diameter / (L * std::sqrt(static_cast<double>(p.N + 4)) *
                           std::sqrt(static_cast<double>(p.T)));
  p.smoothing_mu = eps_opt * p.diameter / (4.0 * L * std::sqrt(static_cast<double>(p.N)));
  p.seed = seed;
  return p;
}

SimplexPoint project_simplex_block(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw input_error("projection input non-finite");
  }
  const Eigen::Index q = v.size();
  std::vector<double> u(v.data(), v.data() + q);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  for (Eigen::Index k = 0; k < q; ++k) {
    css += u[k];
    const double candidate = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) tau = candidate;
  }
  Eigen::VectorXd x = (v.array() - tau).cwiseMax(0.0);
  // Renormalization guard: the threshold rule is exact up to rounding.
  x /= x.sum();
  return SimplexPoint{std::move(x)};
}

MarginalProfile project_domain(const Eigen::VectorXd& v, int q, int n) {
  if (v.size() != static_cast<Eigen::Index>(q) * n)
    throw input_error("project_domain: wrong length");
  std::vector<SimplexPoint> coords;
  coords.reserve(n);
  for (int i = 0; i < n; ++i)
    coords.push_back(project_simplex_block(v.segment(static_cast<Eigen::Index>(i) * q, q)));
  return MarginalProfile{std::move(coords)};
}

namespace {

/// Gaussian direction in the product of zero-sum subspaces.
Eigen::VectorXd tangent_gaussian(int q, int n, Rng& rng) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(q) * n);
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.gaussian();
  for (int i = 0; i < n; ++i) {
    auto block = u.segment(static_cast<Eigen::Index>(i) * q, q);
    block.array() -= block.mean();
  }
  return u;
}

}  // namespace

Eigen::VectorXd estimate_smoothed_gradient(const NoisyObjective& objective,
                                           const Eigen::VectorXd& x, int q,
                                           int n, double smoothing_mu,
                                           int batch, Rng& rng) {
  if (batch < 1) throw input_error("gradient batch must be >= 1");
  const MarginalProfile base = project_domain(x, q, n);
  const double f0 = objective.eval(base, rng);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (int b = 0; b < batch; ++b) {
    const Eigen::VectorXd u = tangent_gaussian(q, n, rng);
    const MarginalProfile probe = project_domain(x + smoothing_mu * u, q, n);
    const double fp = objective.eval(probe, rng);
    g += ((fp - f0) / smoothing_mu) * u;
  }
  return g / batch;
}

SmoothedResult minimize_smoothed(const NoisyObjective& objective,
                                 const MarginalProfile& start,
                                 const MinimizerParams& params, Rng& rng) {
  const int q = start.q(), n = start.n();
  if (params.T < 1) throw input_error("iteration cap T must be >= 1");

  const double theoretical =
      (params.N + 4) * params.L * params.L * params.diameter * params.diameter /
      (params.eps_opt * params.eps_opt);

  SmoothedResult res;
  res.budget_exhausted = params.T + 0.5 < theoretical;

  Eigen::VectorXd x = flatten(start);
  MarginalProfile cur = start;
  double cur_val = objective.eval(cur, rng);
  res.point = cur;
  res.value = cur_val;
  res.trajectory.emplace_back(0, cur_val);

  Eigen::VectorXd prev_x = x;
  double prev_val = cur_val;
  for (int t = 1; t <= params.T; ++t) {
    const Eigen::VectorXd g = estimate_smoothed_gradient(
        objective, x, q, n, params.smoothing_mu, params.grad_batch, rng);
    cur = project_domain(x - params.step_h * g, q, n);
    x = flatten(cur);
    cur_val = objective.eval(cur, rng);
    res.trajectory.emplace_back(t, cur_val);
    if (cur_val < res.value) {
      res.value = cur_val;
      res.point = cur;
    }
    // Same point evaluated twice should agree within the declared noise.
    if ((x - prev_x).cwiseAbs().maxCoeff() < 1e-15 &&
        std::abs(cur_val - prev_val) >
            2.0 * objective.noise_half_width + 1e-12) {
      res.noise_warning = true;
    }
    prev_x = x;
    prev_val = cur_val;
  }
  return res;
}

MinimizeResult minimize_function(const ValueOracle& oracle,
                                 const OperationDistribution& P, double eps,
                                 std::uint64_t seed,
                                 const PipelineOptions& opts) {
  const auto& d = oracle.dims();
  if (!(eps > 0.0 && eps < 1.0)) throw input_error("eps must lie in (0,1)");

  if (!opts.override_checks) {
    const CheckReport mp = is_measure_preserving(P);
    if (!mp.pass)
      throw check_failed("polymorphism is not measure preserving: " + mp.witness);
    for (const auto& atom : P.atoms) {
      const CheckReport ts = is_transitive_symmetric(atom.op);
      if (!ts.pass)
        throw check_failed("support operation lacks transitive symmetry: " +
                           ts.witness);
    }
  }

  const int walk_r = opts.walk_r > 0 ? opts.walk_r : 4 * d.n + 16;
  const double L = oracle.inf_norm_bound() > 0 ? oracle.inf_norm_bound() : 1.0;
  const long long queries_before = oracle.query_count();

  MinimizeResult result;
  result.best_value = std::numeric_limits<double>::infinity();
  result.queries_used = 0;
  double best_objective = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    Rng rng = child_rng(seed, "minimize-restart", restart);

    // Objective: estimator at per-query accuracy eps/10 (its perturbation
    // schedule), with the configured practical sample budget.
    int iter_counter = 0;
    NoisyObjective objective;
    objective.noise_half_width =
        L * std::sqrt(2.0 * std::log(2.0 / 0.01) / opts.samples_m);
    objective.eval = [&](const MarginalProfile& w, Rng& r) {
      EstimatorParams ep;
      ep.eps = eps / 10.0;
      ep.b = (eps / 10.0) / (10.0 * d.q * d.n);
      ep.r = walk_r;
      ep.m = opts.samples_m;
      ep.delta = 0.01;
      ep.seed = r.next_u64();
      ep.override_checks = true;  // verified once above
      ep.threads = opts.threads;
      const Estimate est = estimate_convex_extension(oracle, P, w, ep);
      if (est.incumbent_value < result.best_value) {
        result.best_value = est.incumbent_value;
        result.best_assignment = est.incumbent;
      }
      if (opts.record_trajectory) result.incumbent_curve.push_back(result.best_value);
      ++iter_counter;
      return est.value;
    };

    MinimizerParams mp = default_minimizer_params(eps, d.q, d.n, L,
                                                  rng.next_u64(), opts.descent_T);
    mp.T = opts.descent_T;
    mp.grad_batch = opts.grad_batch;
    // Recompute the step for the configured horizon.
    mp.step_h = mp.diameter / (mp.L * std::sqrt(static_cast<double>(mp.N + 4)) *
                               std::sqrt(static_cast<double>(mp.T)));

    const MarginalProfile start = uniform_profile(d.q, d.n);
    SmoothedResult sr = minimize_smoothed(objective, start, mp, rng);
    if (sr.value < best_objective) {
      best_objective = sr.value;
      result.final_marginals = sr.point;
      result.trajectory = sr.trajectory;
    }
    result.budget_exhausted = result.budget_exhausted || sr.budget_exhausted;

    if (opts.query_budget > 0 &&
        oracle.query_count() - queries_before > opts.query_budget) {
      result.budget_exhausted = true;
      break;
    }
  }

  result.queries_used = oracle.query_count() - queries_before;
  return result;
}

}  // namespace polymin
