#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "polymin/correlation.hpp"
#include "test_util.hpp"

using namespace polymin;
using testutil::binary_symmetric_pair;
using testutil::random_pair;

namespace {

PairJoint product_pair(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::MatrixXd mass = a * b.transpose();
  return make_pair_joint(std::move(mass));
}

PairJoint diagonal_uniform(int q) {
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i) mass(i, i) = 1.0 / q;
  return PairJoint{q, q, std::move(mass)};
}

/// p(mu) on a pairwise space: draw k i.i.d. pairs, apply p to both sides.
PairJoint evolve_pair(const Operation& p, const PairJoint& pj) {
  return pair_from_joint(evolve_joint_exact(p, pair_to_joint(pj)), 1);
}

}  // namespace

TEST_CASE("maximal correlation: independence, perfect correlation, and the 2-gamma pair") {
  Eigen::VectorXd u2 = Eigen::VectorXd::Constant(2, 0.5);
  Eigen::VectorXd m3(3);
  m3 << 0.2, 0.5, 0.3;
  CHECK(maximal_correlation(product_pair(u2, m3)) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(maximal_correlation(diagonal_uniform(3)) == doctest::Approx(1.0));
  // X = Y with probability 1/2 + gamma on uniform bits: rho = 2*gamma.
  CHECK(maximal_correlation(binary_symmetric_pair(0.4)) ==
        doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("maximal correlation: degenerate marginals give 0 by convention") {
  Eigen::MatrixXd mass(2, 2);
  mass << 0.7, 0.3, 0.0, 0.0;  // side A concentrated on one atom
  CHECK(maximal_correlation(PairJoint{2, 2, mass}) == 0.0);
}

TEST_CASE("maximal correlation is invariant under symbol relabeling") {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const PairJoint pj = random_pair(rng, 3, 4);
    Eigen::MatrixXd permuted(3, 4);
    permuted.row(0) = pj.mass.row(2);
    permuted.row(1) = pj.mass.row(0);
    permuted.row(2) = pj.mass.row(1);
    const double a = maximal_correlation(pj);
    const double b = maximal_correlation(PairJoint{3, 4, permuted});
    CHECK(std::abs(a - b) <= 1e-12);
  }
}

TEST_CASE("singular basis: product pairs have sigma = (1, 0, ...)") {
  Eigen::VectorXd a(3), b(3);
  a << 0.2, 0.3, 0.5;
  b << 0.6, 0.1, 0.3;
  const SingularBasis sb = singular_basis(product_pair(a, b));
  CHECK(sb.singulars[0] == 1.0);
  CHECK(sb.singulars[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK((sb.left.col(0).array() - 1.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("singular basis of the binary symmetric pair: sigma = (1, 2 gamma)") {
  const double gamma = 0.15;
  const SingularBasis sb = singular_basis(binary_symmetric_pair(2 * gamma));
  REQUIRE(sb.singulars.size() == 2);
  CHECK(sb.singulars[1] == doctest::Approx(2 * gamma).epsilon(1e-12));
}

TEST_CASE("singular basis: orthonormality, pairing identity, reconstruction") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int qa = 2 + rng.uniform_int(3);
    const int qb = 2 + rng.uniform_int(3);
    const PairJoint pj = random_pair(rng, qa, qb);
    const SingularBasis sb = singular_basis(pj);
    const Eigen::VectorXd ma = pj.mass.rowwise().sum();
    const Eigen::VectorXd mb = pj.mass.colwise().sum();
    const int L = static_cast<int>(sb.singulars.size());

    // <phi_i, phi_j>_{mu_X} = delta_ij
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j <= i; ++j) {
        double ip = 0.0;
        for (int a = 0; a < qa; ++a) ip += ma[a] * sb.left(a, i) * sb.left(a, j);
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-8);
      }
    }
    // E[phi_i(X) psi_j(Y)] = sigma_i delta_ij; i=j=1 is the correlation itself
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        double e = 0.0;
        for (int a = 0; a < qa; ++a) {
          for (int b = 0; b < qb; ++b)
            e += pj.mass(a, b) * sb.left(a, i) * sb.right(b, j);
        }
        CHECK(std::abs(e - (i == j ? sb.singulars[i] : 0.0)) <= 1e-8);
      }
    }
    CHECK(std::abs(sb.singulars[1] - maximal_correlation(pj)) <= 1e-8);
    CHECK(sb.residual <= 1e-8);
  }
}

TEST_CASE("linearity: dictators are fully linear") {
  const LinearityReport rep =
      linearity(op_dictator(2, 3, 0), binary_symmetric_pair(0.5));
  CHECK(rep.rho == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.lin == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("linearity: 3-bit parity has no degree-one mass under uniform marginals") {
  const LinearityReport rep =
      linearity(op_minority3(), binary_symmetric_pair(0.6));
  CHECK(rep.lin == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("linearity: majority3 puts exactly 3/4 of its mass on degree one") {
  // Uniform binary marginals: the centered majority indicator is -MAJ/2 in the
  // character basis, with squared degree-one coefficients 3*(1/4)/norm (1/4).
  const LinearityReport rep =
      linearity(op_majority3(), binary_symmetric_pair(0.3));
  CHECK(rep.lin == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(rep.lin < 1.0 - 0.2);
}

TEST_CASE("linearity: constant operations have a degenerate span") {
  Eigen::VectorXi table = Eigen::VectorXi::Zero(4);
  const Operation constant = make_operation(2, 2, table);
  const LinearityReport rep = linearity(constant, binary_symmetric_pair(0.4));
  CHECK(rep.degenerate_span);
  CHECK(rep.lin == 0.0);
}

TEST_CASE("linearity of a distribution reports per-atom values and their mean") {
  const OperationDistribution P = standard_family("maj_min", 2);
  const LinearityReport rep = linearity(P, binary_symmetric_pair(0.5));
  REQUIRE(rep.per_atom.size() == 2);
  CHECK(rep.per_atom[0] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(rep.per_atom[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rep.lin ==
        doctest::Approx((2.0 / 3.0) * 0.75 + (1.0 / 3.0) * 0.0).epsilon(1e-9));
}

TEST_CASE("tv_to_product: product, diagonal, and range") {
  Rng rng(23);
  const JointDistribution prod = product_joint(testutil::random_profile(rng, 2, 3));
  CHECK(tv_to_product(prod) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(tv_to_product(pair_to_joint(diagonal_uniform(2))) == doctest::Approx(1.0));

  for (int trial = 0; trial < 50; ++trial) {
    const JointDistribution mu = testutil::random_joint(rng, 3, 2);
    const double tv = tv_to_product(mu);
    CHECK(tv >= 0.0);
    CHECK(tv <= 2.0);
  }
}

TEST_CASE("statistical-distance bound: examples and a random sweep") {
  Eigen::VectorXd u2 = Eigen::VectorXd::Constant(2, 0.5);
  const BoundCheck prod = check_corr_stat_bound(product_pair(u2, u2));
  CHECK(prod.lhs == doctest::Approx(0.0));
  CHECK(prod.rhs == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(prod.holds);

  const BoundCheck diag = check_corr_stat_bound(diagonal_uniform(2));
  CHECK(diag.lhs == doctest::Approx(1.0));
  CHECK(diag.rhs == doctest::Approx(2.0));
  CHECK(diag.holds);

  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const PairJoint pj = random_pair(rng, 2 + rng.uniform_int(3), 2 + rng.uniform_int(3));
    CHECK(check_corr_stat_bound(pj).holds);
  }
}

TEST_CASE("noise caps the correlation at 1 - gamma") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int q = 2 + rng.uniform_int(2);
    const PairJoint pj = random_pair(rng, q, q);
    const double gamma = 0.05 + 0.9 * rng.uniform();
    const JointDistribution noised = noise(pair_to_joint(pj), gamma);
    const double rho = maximal_correlation(pair_from_joint(noised, 1));
    CHECK(rho <= 1.0 - gamma + 1e-8);
  }
}

TEST_CASE("per-step correlation decay bound for deterministic symmetric atoms") {
  Rng rng(53);
  const std::vector<Operation> atoms = {op_min(2, 2),    op_max(2, 2),
                                        op_majority3(),  op_minority3(),
                                        op_min(3, 3),    op_median3(3)};
  for (const Operation& p : atoms) {
    REQUIRE(is_transitive_symmetric(p).pass);
    for (int trial = 0; trial < 15; ++trial) {
      const PairJoint pj = random_pair(rng, p.q, p.q);
      const double rho = maximal_correlation(pj);
      if (rho >= 0.99) continue;
      const double lin = linearity(p, pj).lin;
      const double bound = rho * (1.0 - 0.5 * (1.0 - lin) * (1.0 - rho * rho));
      const double rho_next = maximal_correlation(evolve_pair(p, pj));
      CHECK(rho_next <= bound + 1e-6);
    }
  }
}

TEST_CASE("decay trace: product starts stay independent") {
  // Deterministic sequences map products to products; a per-step mixture does
  // so when the atoms agree on the marginals, e.g. uniform marginals under a
  // self-dual family.
  SUBCASE("uniform product under the maj_min mixture") {
    const JointDistribution prod = product_joint(uniform_profile(2, 2));
    const DecayTrace trace = decay_trace(standard_family("maj_min", 2), prod, 10);
    for (const auto& s : trace.steps) {
      CHECK(s.rho <= 1e-8);
      CHECK_FALSE(s.bound_violated);
    }
  }
  SUBCASE("arbitrary product under a single-atom family") {
    Rng rng(61);
    const JointDistribution prod =
        product_joint(testutil::random_profile(rng, 2, 2));
    const OperationDistribution only_maj = make_distribution(
        {OperationAtom{1.0, make_rational(1, 1), op_majority3()}});
    const DecayTrace trace = decay_trace(only_maj, prod, 10);
    for (const auto& s : trace.steps) {
      CHECK(s.rho <= 1e-7);
      CHECK_FALSE(s.bound_violated);
    }
  }
}

TEST_CASE("decay trace: the diagonal coupling is a fixed point with rho = 1") {
  const DecayTrace trace = decay_trace(standard_family("maj_min", 2),
                                       pair_to_joint(diagonal_uniform(2)), 10);
  for (const auto& s : trace.steps) CHECK(s.rho == doctest::Approx(1.0));
}

TEST_CASE("decay trace: maj_min from rho = 0.8 decays below 0.01 in 40 steps") {
  const JointDistribution mu0 = pair_to_joint(binary_symmetric_pair(0.8));
  const DecayTrace trace = decay_trace(standard_family("maj_min", 2), mu0, 40);
  REQUIRE(trace.steps.size() == 41);
  CHECK(trace.steps.front().rho == doctest::Approx(0.8).epsilon(1e-12));
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    // strictly decreasing until the correlation underflows to exactly 0
    if (trace.steps[i - 1].rho > 0.0) {
      CHECK(trace.steps[i].rho < trace.steps[i - 1].rho);
    } else {
      CHECK(trace.steps[i].rho == 0.0);
    }
  }
  CHECK(trace.steps.back().rho < 0.01);
}

TEST_CASE("decay trace: single-atom steps respect the lemma bound") {
  const OperationDistribution only_maj =
      make_distribution({OperationAtom{1.0, make_rational(1, 1), op_majority3()}});
  const JointDistribution mu0 = pair_to_joint(binary_symmetric_pair(0.9));
  const DecayTrace trace = decay_trace(only_maj, mu0, 25);
  for (const auto& s : trace.steps) {
    CHECK_FALSE(s.bound_violated);
  }
  CHECK(trace.steps.back().rho < trace.steps.front().rho);
}

TEST_CASE("correlated-vs-product bound experiment") {
  SUBCASE("product start gives 0 on both sides") {
    Rng rng(71);
    const JointDistribution prod =
        product_joint(testutil::random_profile(rng, 2, 3));
    const BoundCheck bc =
        check_corrvsind_bound(standard_family("min_max", 2), prod, 3, 0.5);
    CHECK(bc.lhs == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(bc.rhs == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(bc.holds);
  }
  SUBCASE("r=0 on binary 3-coordinate joints: sum of rho_i dominates the TV") {
    Rng rng(73);
    for (int trial = 0; trial < 25; ++trial) {
      const JointDistribution mu = testutil::random_joint(rng, 2, 3);
      const BoundCheck bc =
          check_corrvsind_bound(standard_family("maj_min", 2), mu, 0, 0.0);
      CHECK(bc.lhs <= bc.rhs + 1e-9);
    }
  }
  SUBCASE("maj_min at r=10: both sides computed and logged") {
    const JointDistribution mu0 = pair_to_joint(binary_symmetric_pair(0.8));
    const BoundCheck bc =
        check_corrvsind_bound(standard_family("maj_min", 2), mu0, 10, 0.5);
    CHECK(std::isfinite(bc.lhs));
    CHECK(std::isfinite(bc.rhs));
    CHECK(bc.lhs < 0.5);  // correlation has visibly decayed by ten steps
  }
}
