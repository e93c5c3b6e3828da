#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "polymin/convex_extension.hpp"
#include "polymin/function_library.hpp"
#include "test_util.hpp"

using namespace polymin;
using testutil::random_profile;

namespace {

Assignment asg(std::initializer_list<int> vals) {
  Assignment x(static_cast<Eigen::Index>(vals.size()));
  int i = 0;
  for (int v : vals) x[i++] = v;
  return x;
}

Instance random_cut(std::uint64_t seed, int n) {
  return random_instance({"edge_cut", 2, n, seed, 0.5});
}

double modular_extension(const Eigen::MatrixXd& costs, const MarginalProfile& w) {
  double v = 0.0;
  for (int i = 0; i < w.n(); ++i) v += costs.row(i).dot(w.coords[i].probs);
  return v;
}

}  // namespace

TEST_CASE("perturb_marginals applies the affine map and keeps sums at 1") {
  SUBCASE("point mass at symbol 0, b = 0.01") {
    const MarginalProfile w = point_mass_profile(asg({0}), 2);
    const MarginalProfile wp = perturb_marginals(w, 0.01);
    CHECK(wp.coords[0].probs[0] == doctest::Approx(1.01 / 1.02).epsilon(1e-15));
    CHECK(wp.coords[0].probs[1] == doctest::Approx(0.01 / 1.02).epsilon(1e-15));
    CHECK(wp.coords[0].probs.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("uniform rows are fixed points") {
    const MarginalProfile w = uniform_profile(3, 2);
    const MarginalProfile wp = perturb_marginals(w, 0.05);
    for (const auto& c : wp.coords) {
      CHECK((c.probs.array() - 1.0 / 3).abs().maxCoeff() <= 1e-15);
    }
  }
  SUBCASE("per-coordinate L1 change is bounded by 2qb") {
    Rng rng(2);
    const int q = 3;
    const double b = 0.02;
    const MarginalProfile w = random_profile(rng, q, 4);
    const MarginalProfile wp = perturb_marginals(w, b);
    for (int i = 0; i < 4; ++i) {
      const double l1 = (wp.coords[i].probs - w.coords[i].probs).cwiseAbs().sum();
      CHECK(l1 <= 2.0 * q * b + 1e-15);
    }
    CHECK_THROWS_AS(perturb_marginals(w, 0.0), input_error);
  }
}

TEST_CASE("LP oracle: point-mass marginals admit a unique coupling") {
  const Instance inst = random_cut(3, 4);
  const Assignment x0 = asg({1, 0, 1, 1});
  const double lp =
      exact_convex_extension_lp(inst.oracle, point_mass_profile(x0, 2));
  CHECK(lp == doctest::Approx(evaluate(inst.oracle, x0)).epsilon(1e-12));
}

TEST_CASE("LP oracle: one edge at uniform marginals couples diagonally to 0") {
  const ValueOracle f = cut_function(2, {{0, 1, 1.0}});
  const double lp = exact_convex_extension_lp(f, uniform_profile(2, 2));
  CHECK(lp == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("LP oracle: modular objectives are coupling-independent") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 2 + rng.uniform_int(2);
    const int n = 2 + rng.uniform_int(3);
    Eigen::MatrixXd costs(n, q);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < q; ++a) costs(i, a) = 2.0 * rng.uniform() - 1.0;
    }
    const ValueOracle f = modular_function(costs);
    const MarginalProfile w = random_profile(rng, q, n);
    const double lp = exact_convex_extension_lp(f, w);
    CHECK(lp == doctest::Approx(modular_extension(costs, w)).epsilon(1e-9));
  }
}

TEST_CASE("LP oracle enforces its variable cap") {
  const Instance inst = random_cut(1, 13);  // 2^13 > 4096
  CHECK_THROWS_AS(exact_convex_extension_lp(inst.oracle, uniform_profile(2, 13)),
                  cap_exceeded);
}

TEST_CASE("LP oracle: perturbation continuity |fhat(w) - fhat(w')| <= 2qnb L") {
  Rng rng(15);
  for (int trial = 0; trial < 15; ++trial) {
    const Instance inst = random_cut(100 + trial, 4);
    const MarginalProfile w = random_profile(rng, 2, 4);
    const double b = 0.01 + 0.02 * rng.uniform();
    const MarginalProfile wp = perturb_marginals(w, b);
    const double fw = exact_convex_extension_lp(inst.oracle, w);
    const double fwp = exact_convex_extension_lp(inst.oracle, wp);
    CHECK(std::abs(fw - fwp) <=
          2.0 * 2 * 4 * b * inst.oracle.inf_norm_bound() + 1e-9);
  }
}

TEST_CASE("Lovasz extension: greedy telescoping on the single edge") {
  const ValueOracle f = cut_function(2, {{0, 1, 1.0}});
  Eigen::VectorXd t(2);
  t << 0.5, 0.3;
  // (0.5-0.3)*f({0}) + 0.3*f({0,1}) = 0.2
  CHECK(lovasz_extension(f, t) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("Lovasz extension interpolates f at integral points") {
  const Instance inst = random_cut(11, 5);
  for (std::int64_t idx = 0; idx < 32; ++idx) {
    const Assignment x = assignment_from_index(idx, 2, 5);
    Eigen::VectorXd t(5);
    for (int i = 0; i < 5; ++i) t[i] = x[i];
    CHECK(lovasz_extension(inst.oracle, t, /*verify=*/false) ==
          doctest::Approx(evaluate(inst.oracle, x)).epsilon(1e-12));
  }
}

TEST_CASE("Lovasz extension agrees with the LP oracle on random submodular instances") {
  Rng rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + rng.uniform_int(5);
    const Instance inst = random_cut(1000 + trial, n);
    const MarginalProfile w = random_profile(rng, 2, n);
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t[i] = w.coords[i].probs[1];
    const double lv = lovasz_extension(inst.oracle, t, /*verify=*/false);
    const double lp = exact_convex_extension_lp(inst.oracle, w);
    CHECK(lv == doctest::Approx(lp).epsilon(1e-9));
  }
}

TEST_CASE("Lovasz extension rejects non-submodular functions and q != 2") {
  const ValueOracle parity = testutil::parity_even_oracle(2);
  Eigen::VectorXd t(2);
  t << 0.5, 0.5;
  CHECK_THROWS_AS(lovasz_extension(parity, t), check_failed);

  Eigen::MatrixXd costs(2, 3);
  costs.setZero();
  CHECK_THROWS_AS(lovasz_extension(modular_function(costs), t), input_error);
}

TEST_CASE("estimator: point-mass marginals with a tiny perturbation return f(x0)") {
  const Instance inst = random_cut(23, 3);
  const Assignment x0 = asg({1, 0, 1});
  EstimatorParams params;
  params.eps = 0.1;
  params.b = 1e-7;
  params.r = 5;
  params.m = 50;
  params.delta = 0.01;
  params.seed = 99;
  const Estimate est = estimate_convex_extension(
      inst.oracle, standard_family("min_max", 2), point_mass_profile(x0, 2), params);
  CHECK(est.value == doctest::Approx(evaluate(inst.oracle, x0)).epsilon(1e-14));
  CHECK(est.incumbent == x0);
  CHECK(est.queries_used == 50);
}

TEST_CASE("estimator: modular objectives are estimated within the half-width") {
  Rng rng(27);
  Eigen::MatrixXd costs(3, 2);
  costs << 1, -1, 0.5, 2, -0.5, 0;
  const ValueOracle f = modular_function(costs);
  const MarginalProfile w = random_profile(rng, 2, 3);
  EstimatorParams params;
  params.eps = 0.05;
  params.b = 0.05 / (10.0 * 2 * 3);
  params.r = 40;
  params.m = 4000;
  params.seed = 5;
  const Estimate est =
      estimate_convex_extension(f, standard_family("min_max", 2), w, params);
  // The sample mean is unbiased for the modular extension at the perturbed w.
  const double target = modular_extension(costs, perturb_marginals(w, params.b));
  CHECK(std::abs(est.value - target) <= est.half_width);
}

TEST_CASE("estimator: one edge at uniform marginals walks to the diagonal") {
  const ValueOracle f = cut_function(2, {{0, 1, 1.0}});
  EstimatorParams params;
  params.eps = 0.05;
  params.b = 0.05 / (10.0 * 2 * 2);
  params.r = 80;
  params.m = 4000;
  params.seed = 12;
  const Estimate est =
      estimate_convex_extension(f, standard_family("min_max", 2),
                                uniform_profile(2, 2), params);
  const double lp = exact_convex_extension_lp(f, uniform_profile(2, 2));
  CHECK(std::abs(est.value - lp) <= 0.05 * f.inf_norm_bound());
  CHECK(est.incumbent_value == 0.0);
}

TEST_CASE("estimator rejects invalid polymorphisms unless overridden") {
  const Instance inst = random_cut(31, 3);
  const OperationDistribution with_dictator = make_distribution(
      {OperationAtom{1.0, make_rational(1, 1), op_dictator(2, 2, 0)}});
  EstimatorParams params;
  params.eps = 0.1;
  params.b = 0.01;
  params.r = 3;
  params.m = 10;
  params.seed = 1;
  CHECK_THROWS_AS(estimate_convex_extension(inst.oracle, with_dictator,
                                            uniform_profile(2, 3), params),
                  check_failed);
  params.override_checks = true;
  const Estimate est = estimate_convex_extension(inst.oracle, with_dictator,
                                                 uniform_profile(2, 3), params);
  CHECK(est.override_used);
}

TEST_CASE("estimator is deterministic per seed and independent of thread count") {
  const Instance inst = random_cut(37, 4);
  EstimatorParams params;
  params.eps = 0.1;
  params.b = 0.001;
  params.r = 20;
  params.m = 500;
  params.seed = 777;
  const OperationDistribution P = standard_family("min_max", 2);
  const MarginalProfile w = uniform_profile(2, 4);
  const Estimate a = estimate_convex_extension(inst.oracle, P, w, params);
  params.threads = 2;
  const Estimate b = estimate_convex_extension(inst.oracle, P, w, params);
  CHECK(a.value == b.value);
  CHECK(a.incumbent_value == b.incumbent_value);
  CHECK(a.incumbent == b.incumbent);
}

TEST_CASE("estimator sandwich: the evolved product never beats the LP value") {
  // F(P^t(w'^x)) >= fhat(w') for every t: the evolved joint keeps marginals w'.
  Rng rng(41);
  const Instance inst = random_cut(43, 3);
  const OperationDistribution P = standard_family("min_max", 2);
  const MarginalProfile w = random_profile(rng, 2, 3);
  const MarginalProfile wp = perturb_marginals(w, 0.01);
  const double fhat = exact_convex_extension_lp(inst.oracle, wp);
  JointDistribution mu = product_joint(wp);
  double prev = distributional_extension(inst.oracle, mu);
  for (int t = 0; t < 10; ++t) {
    mu = evolve_joint_distribution(P, mu);
    const double cur = distributional_extension(inst.oracle, mu);
    CHECK(cur >= fhat - 1e-9);
    CHECK(cur <= prev + 1e-9 * inst.oracle.inf_norm_bound());
    prev = cur;
  }
}

TEST_CASE("default estimator parameters follow the documented schedule") {
  const EstimatorParams p = default_estimator_params(0.05, 3, 6, 0.01, 1);
  CHECK(p.b == doctest::Approx(0.05 / (10.0 * 3 * 6)));
  const double l1 = std::log(10.0 * 3 * 6 / 0.05);
  const double l2 = std::log(2.0 * 3 * 6 / 0.05);
  CHECK(p.r == static_cast<int>(std::ceil((2.0 * 6 / 0.05) * l1 * l2 * l2)));
  CHECK(p.m == static_cast<int>(std::ceil(200.0 * std::log(2.0 / 0.01) / 0.0025)));
}
