#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "polymin/function_library.hpp"
#include "polymin/minimizer.hpp"
#include "test_util.hpp"

using namespace polymin;

namespace {

Assignment asg(std::initializer_list<int> vals) {
  Assignment x(static_cast<Eigen::Index>(vals.size()));
  int i = 0;
  for (int v : vals) x[i++] = v;
  return x;
}

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

/// Exhaustive grid nearest point on the q=3 simplex (independent oracle).
Eigen::VectorXd grid_project_q3(const Eigen::VectorXd& v, double step) {
  const int steps = static_cast<int>(std::round(1.0 / step));
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x(3);
  for (int i = 0; i <= steps; ++i) {
    const double x0 = i * step;
    const double d0 = x0 - v[0];
    for (int j = 0; j <= steps - i; ++j) {
      const double x1 = j * step;
      const double x2 = 1.0 - x0 - x1;
      const double d1 = x1 - v[1];
      const double d2 = x2 - v[2];
      const double d = d0 * d0 + d1 * d1 + d2 * d2;
      if (d < best) {
        best = d;
        best_x << x0, x1, x2;
      }
    }
  }
  return best_x;
}

}  // namespace

TEST_CASE("projection: members, thresholds, and the centroid") {
  const SimplexPoint member = project_simplex_block(vec({0.2, 0.5, 0.3}));
  CHECK((member.probs - vec({0.2, 0.5, 0.3})).cwiseAbs().maxCoeff() <= 1e-15);

  const SimplexPoint spike = project_simplex_block(vec({2.0, 0.0, 0.0}));
  CHECK((spike.probs - vec({1.0, 0.0, 0.0})).cwiseAbs().maxCoeff() <= 1e-15);

  const SimplexPoint center = project_simplex_block(vec({0.5, 0.5, 0.5}));
  CHECK((center.probs - Eigen::VectorXd::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff() <=
        1e-15);
}

TEST_CASE("projection is idempotent to 1e-12 and matches the grid oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = 2.0 * rng.uniform() - 0.5;
    const SimplexPoint p = project_simplex_block(v);
    const SimplexPoint pp = project_simplex_block(p.probs);
    CHECK((p.probs - pp.probs).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::VectorXd g = grid_project_q3(v, 1e-3);
    CHECK((p.probs - g).cwiseAbs().maxCoeff() <= 2e-3);
  }
}

TEST_CASE("project_domain factorizes over blocks") {
  Eigen::VectorXd v(4);
  v << 2.0, 0.0, 0.5, 0.5;
  const MarginalProfile w = project_domain(v, 2, 2);
  CHECK(w.coords[0].probs[0] == doctest::Approx(1.0));
  CHECK(w.coords[1].probs[0] == doctest::Approx(0.5));
}

TEST_CASE("two-point gradient correlates with the true gradient on a quadratic") {
  // g(w) = ||w - target||^2 on (Delta_2)^4, interior points, exact evaluations.
  const int q = 2, n = 4;
  Rng rng(17);
  Eigen::VectorXd target(q * n);
  for (int i = 0; i < q * n; ++i) target[i] = 0.4 + 0.2 * rng.uniform();
  NoisyObjective obj;
  obj.noise_half_width = 0.0;
  obj.eval = [&](const MarginalProfile& w, Rng&) {
    return (flatten(w) - target).squaredNorm();
  };
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(q * n, 0.5);
  Rng grad_rng(5);
  const Eigen::VectorXd g =
      estimate_smoothed_gradient(obj, x, q, n, 1e-4, 64, grad_rng);
  // True gradient projected onto the zero-sum tangent space per block.
  Eigen::VectorXd true_g = 2.0 * (x - target);
  for (int i = 0; i < n; ++i) {
    auto block = true_g.segment(static_cast<Eigen::Index>(i) * q, q);
    block.array() -= block.mean();
  }
  const double cosine = g.dot(true_g) / (g.norm() * true_g.norm());
  CHECK(cosine >= 0.5);
}

TEST_CASE("minimize_smoothed: linear objective converges to the vertex") {
  NoisyObjective obj;
  obj.noise_half_width = 0.0;
  obj.eval = [](const MarginalProfile& w, Rng&) {
    return w.coords[0].probs[1];  // minimized at (1, 0)
  };
  MinimizerParams params = default_minimizer_params(0.01, 2, 1, 1.0, 1, 10000);
  params.grad_batch = 1;
  Rng rng(11);
  const SmoothedResult res = minimize_smoothed(obj, uniform_profile(2, 1), params, rng);
  CHECK(res.value <= 1e-3);
  CHECK_FALSE(res.noise_warning);
}

TEST_CASE("minimize_smoothed: constant objectives return the constant") {
  NoisyObjective obj;
  obj.noise_half_width = 0.0;
  obj.eval = [](const MarginalProfile&, Rng&) { return 3.25; };
  MinimizerParams params = default_minimizer_params(0.1, 2, 2, 1.0, 2, 50);
  params.T = 50;
  Rng rng(13);
  const SmoothedResult res = minimize_smoothed(obj, uniform_profile(2, 2), params, rng);
  CHECK(res.value == 3.25);
  CHECK(res.point.coords[0].probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("minimize_smoothed: exact modular extension reaches the separable optimum") {
  Eigen::MatrixXd costs(3, 2);
  costs << 0.0, 1.0, 0.7, 0.0, 0.0, 0.4;
  const double optimum = 0.0;  // pick the cheaper symbol per coordinate
  NoisyObjective obj;
  obj.noise_half_width = 0.0;
  obj.eval = [&](const MarginalProfile& w, Rng&) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += costs.row(i).dot(w.coords[i].probs);
    return v;
  };
  const double bound = costs.cwiseAbs().rowwise().maxCoeff().sum();
  MinimizerParams params = default_minimizer_params(0.05, 2, 3, bound, 3, 4000);
  params.grad_batch = 2;
  Rng rng(19);
  const SmoothedResult res = minimize_smoothed(obj, uniform_profile(2, 3), params, rng);
  CHECK(res.value <= optimum + 1e-2 * bound);
  // every iterate stayed feasible
  for (const auto& c : res.point.coords) {
    CHECK(c.probs.minCoeff() >= 0.0);
    CHECK(c.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("minimize_smoothed flags a capped budget") {
  NoisyObjective obj;
  obj.noise_half_width = 0.0;
  obj.eval = [](const MarginalProfile&, Rng&) { return 0.0; };
  MinimizerParams params = default_minimizer_params(0.01, 2, 2, 1.0, 4, 10);
  Rng rng(23);
  CHECK(minimize_smoothed(obj, uniform_profile(2, 2), params, rng).budget_exhausted);
}

TEST_CASE("minimize_function: modular f returns the coordinatewise minimizer") {
  Eigen::MatrixXd costs(3, 3);
  costs << 1.0, 0.2, 0.5, 0.1, 0.9, 0.4, 0.3, 0.3, 0.0;
  const ValueOracle f = modular_function(costs);
  PipelineOptions opts;
  opts.samples_m = 200;
  opts.descent_T = 30;
  opts.restarts = 2;
  const MinimizeResult res =
      minimize_function(f, standard_family("sorted3", 3), 0.1, 21, opts);
  CHECK(res.best_assignment == asg({1, 0, 2}));
  CHECK(res.best_value == doctest::Approx(0.3).epsilon(1e-12));
  const MinResult bf = brute_force_min(f);
  CHECK(res.best_value == doctest::Approx(bf.value).epsilon(1e-12));
}

TEST_CASE("minimize_function: single edge reaches cut value 0") {
  const ValueOracle f = cut_function(2, {{0, 1, 1.0}});
  PipelineOptions opts;
  opts.samples_m = 200;
  opts.descent_T = 20;
  opts.restarts = 1;
  const MinimizeResult res =
      minimize_function(f, standard_family("min_max", 2), 0.1, 5, opts);
  CHECK(res.best_value == 0.0);
  CHECK(res.queries_used > 0);
}

TEST_CASE("minimize_function: concave-of-sum instances meet the eps contract") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Instance inst = random_instance({"concave_of_sum", 3, 4, seed, 0.0});
    PipelineOptions opts;
    opts.samples_m = 300;
    opts.descent_T = 40;
    opts.restarts = 2;
    const MinimizeResult res =
        minimize_function(inst.oracle, standard_family("min_max", 3), 0.1,
                          100 + seed, opts);
    const MinResult bf = brute_force_min(inst.oracle);
    CHECK(res.best_value <= bf.value + 0.1 * inst.oracle.inf_norm_bound());
    CHECK(res.best_value >= bf.value - 1e-12);
  }
}

TEST_CASE("minimize_function rejects unverified polymorphisms") {
  const ValueOracle f = cut_function(2, {{0, 1, 1.0}});
  const OperationDistribution bad = make_distribution(
      {OperationAtom{1.0, make_rational(1, 1), op_dictator(2, 2, 1)}});
  CHECK_THROWS_AS(minimize_function(f, bad, 0.1, 1), check_failed);
}

TEST_CASE("minimize_function: trajectory min-so-far is consistent with the incumbent") {
  const Instance inst = random_instance({"edge_cut", 2, 5, 77, 0.5});
  PipelineOptions opts;
  opts.samples_m = 150;
  opts.descent_T = 15;
  opts.restarts = 1;
  const MinimizeResult res =
      minimize_function(inst.oracle, standard_family("min_max", 2), 0.1, 8, opts);
  CHECK(res.best_value == evaluate(inst.oracle, res.best_assignment));
  for (std::size_t i = 1; i < res.incumbent_curve.size(); ++i) {
    CHECK(res.incumbent_curve[i] <= res.incumbent_curve[i - 1] + 1e-15);
  }
}
