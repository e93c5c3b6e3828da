#pragma once

#include <Eigen/Dense>
#include <vector>

#include "polymin/core.hpp"
#include "polymin/correlation.hpp"
#include "polymin/dynamics.hpp"
#include "polymin/rng.hpp"

namespace testutil {

using namespace polymin;

/// Even-parity indicator: f(x) = 1 if sum x_i is even, else 0. Not submodular
/// (witness: rows (1,0) and (0,1) meet/join to the all-even pair).
inline ValueOracle parity_even_oracle(int n) {
  return ValueOracle(
      make_dims(2, n),
      [](const Assignment& x) { return (x.sum() % 2 == 0) ? 1.0 : 0.0; }, 1.0);
}

inline SimplexPoint random_simplex(Rng& rng, int q) {
  Eigen::VectorXd p(q);
  for (int a = 0; a < q; ++a) p[a] = 0.05 + rng.uniform();
  p /= p.sum();
  return SimplexPoint{std::move(p)};
}

inline MarginalProfile random_profile(Rng& rng, int q, int n) {
  std::vector<SimplexPoint> coords;
  for (int i = 0; i < n; ++i) coords.push_back(random_simplex(rng, q));
  return make_profile(std::move(coords));
}

inline JointDistribution random_joint(Rng& rng, int q, int n) {
  const std::int64_t points = pow_int(q, n);
  Eigen::VectorXd mass(points);
  for (std::int64_t i = 0; i < points; ++i) mass[i] = 0.01 + rng.uniform();
  mass /= mass.sum();
  return JointDistribution{ProblemDims{q, n}, std::move(mass)};
}

inline PairJoint random_pair(Rng& rng, int qa, int qb) {
  Eigen::MatrixXd mass(qa, qb);
  for (int a = 0; a < qa; ++a) {
    for (int b = 0; b < qb; ++b) mass(a, b) = 0.01 + rng.uniform();
  }
  mass /= mass.sum();
  return PairJoint{qa, qb, std::move(mass)};
}

/// Binary symmetric pair: uniform marginals, Pr[X=Y] = (1+rho)/2, so the
/// maximal correlation is exactly rho.
inline PairJoint binary_symmetric_pair(double rho) {
  Eigen::MatrixXd mass(2, 2);
  const double same = (1.0 + rho) / 4.0;
  const double diff = (1.0 - rho) / 4.0;
  mass << same, diff, diff, same;
  return PairJoint{2, 2, std::move(mass)};
}

}  // namespace testutil
