#include "polymin/convex_extension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "polymin/parallel.hpp"
#include "polymin/rng.hpp"

namespace polymin {

EstimatorParams default_estimator_params(double eps, int q, int n, double delta,
                                         std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0)) throw input_error("eps must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw input_error("delta must lie in (0,1)");
  EstimatorParams p;
  p.eps = eps;
  p.delta = delta;
  p.seed = seed;
  p.b = eps / (10.0 * q * n);
  const double l1 = std::log(10.0 * q * n / eps);
  const double l2 = std::log(2.0 * q * n / eps);
  p.r = static_cast<int>(std::ceil((2.0 * n / eps) * l1 * l2 * l2));
  p.m = static_cast<int>(std::ceil(200.0 * std::log(2.0 / delta) / (eps * eps)));
  return p;
}

MarginalProfile perturb_marginals(const MarginalProfile& w, double b) {
  if (!(b > 0.0)) throw input_error("perturbation magnitude b must be > 0");
  const int q = w.q();
  std::vector<SimplexPoint> coords;
  coords.reserve(w.coords.size());
  for (const auto& c : w.coords) {
    Eigen::VectorXd p = (c.probs.array() + b) / (1.0 + q * b);
    coords.push_back(SimplexPoint{std::move(p)});
  }
  return MarginalProfile{std::move(coords)};
}

Estimate estimate_convex_extension(const ValueOracle& oracle,
                                   const OperationDistribution& P,
                                   const MarginalProfile& w,
                                   const EstimatorParams& params) {
  const auto& d = oracle.dims();
  if (w.n() != d.n || w.q() != d.q)
    throw input_error("marginal profile does not match oracle dims");
  if (P.q != d.q) throw input_error("polymorphism alphabet does not match oracle");
  if (!(params.eps > 0.0 && params.eps < 1.0))
    throw input_error("eps must lie in (0,1)");
  if (!(params.b > 0.0)) throw input_error("b must be > 0");
  if (params.r < 0) throw input_error("r must be >= 0");
  if (params.m < 1) throw input_error("m must be >= 1");
  if (!(params.delta > 0.0 && params.delta < 1.0))
    throw input_error("delta must lie in (0,1)");

  if (!params.override_checks) {
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

  const MarginalProfile wp = perturb_marginals(w, params.b);
  const long long queries_before = oracle.query_count();

  std::vector<double> values(params.m);
  std::vector<Assignment> samples(params.m);
  parallel_for(params.m, params.threads, [&](std::int64_t i) {
    Rng rng = child_rng(params.seed, "estimate-sample", static_cast<std::uint64_t>(i));
    Assignment x = sample_assignment(P, wp, params.r, rng);
    values[i] = evaluate(oracle, x);
    samples[i] = std::move(x);
  });

  Estimate est;
  est.override_used = params.override_checks;
  double sum = 0.0;
  int best = 0;
  for (int i = 0; i < params.m; ++i) {
    sum += values[i];
    if (values[i] < values[best]) best = i;
  }
  est.value = sum / params.m;
  est.half_width = oracle.inf_norm_bound() *
                   std::sqrt(2.0 * std::log(2.0 / params.delta) / params.m);
  est.incumbent = samples[best];
  est.incumbent_value = values[best];
  est.queries_used = oracle.query_count() - queries_before;
  return est;
}

namespace {

/// Dense two-phase tableau simplex for min c.x s.t. Ax = b, x >= 0, with
/// Bland's rule. Small systems only (the coupling LP has <= 1+nq rows).
class EqualitySimplex {
 public:
  EqualitySimplex(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::VectorXd c)
      : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
    for (Eigen::Index i = 0; i < b_.size(); ++i) {
      if (b_[i] < 0.0) {
        A_.row(i) = -A_.row(i);
        b_[i] = -b_[i];
      }
    }
  }

  /// Returns the optimal objective; throws input_error when infeasible.
  double solve() {
    const Eigen::Index m = A_.rows(), n = A_.cols();
    // Phase 1: artificial basis.
    Eigen::MatrixXd T(m + 1, n + m + 1);
    T.setZero();
    T.block(0, 0, m, n) = A_;
    T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    T.col(n + m).head(m) = b_;
    basis_.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) basis_[i] = static_cast<int>(n + i);
    // Phase-1 reduced costs: minimize sum of artificials.
    for (Eigen::Index j = 0; j < n; ++j) T(m, j) = -A_.col(j).sum();
    T(m, n + m) = -b_.sum();

    run_pivots(T, n + m);
    if (-T(m, n + m) > 1e-7)
      throw input_error("coupling LP infeasible: marginals are inconsistent");

    // Drive artificials out of the basis; a row with no real pivot is
    // redundant and gets dropped.
    std::vector<int> keep_rows;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis_[i] < n) {
        keep_rows.push_back(static_cast<int>(i));
        continue;
      }
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(T(i, j)) > 1e-9) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) {
        pivot(T, i, enter);
        keep_rows.push_back(static_cast<int>(i));
      }
    }

    // Phase 2 on the kept rows, original costs.
    const Eigen::Index m2 = static_cast<Eigen::Index>(keep_rows.size());
    Eigen::MatrixXd T2(m2 + 1, n + 1);
    std::vector<int> basis2(m2);
    for (Eigen::Index i = 0; i < m2; ++i) {
      T2.block(i, 0, 1, n) = T.block(keep_rows[i], 0, 1, n);
      T2(i, n) = T(keep_rows[i], n + m);
      basis2[i] = basis_[keep_rows[i]];
    }
    T2.row(m2).head(n) = c_.transpose();
    T2(m2, n) = 0.0;
    for (Eigen::Index i = 0; i < m2; ++i) {
      const double cb = c_[basis2[i]];
      if (cb != 0.0) {
        T2.row(m2).head(n) -= cb * T2.row(i).head(n);
        T2(m2, n) -= cb * T2(i, n);
      }
    }
    basis_ = basis2;
    run_pivots(T2, n);

    // Polish: re-solve the basic system against the original data so the
    // reported value does not carry accumulated tableau drift.
    Eigen::MatrixXd AB(m, basis_.size());
    for (std::size_t j = 0; j < basis_.size(); ++j) AB.col(j) = A_.col(basis_[j]);
    Eigen::VectorXd xb = AB.colPivHouseholderQr().solve(b_);
    double value = 0.0;
    for (std::size_t j = 0; j < basis_.size(); ++j) value += c_[basis_[j]] * xb[j];
    return value;
  }

 private:
  void pivot(Eigen::MatrixXd& T, Eigen::Index row, Eigen::Index col) {
    T.row(row) /= T(row, col);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      if (i != row && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(row);
    }
    basis_[row] = static_cast<int>(col);
  }

  // Bland's rule: smallest-index entering column, smallest ratio then
  // smallest basis index leaving. Terminates without cycling.
  void run_pivots(Eigen::MatrixXd& T, Eigen::Index ncols) {
    const Eigen::Index m = T.rows() - 1;
    const Eigen::Index rhs = T.cols() - 1;
    while (true) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (T(m, j) < -1e-9) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best_ratio = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (T(i, enter) > 1e-11) {
          const double ratio = T(i, rhs) / T(i, enter);
          if (leave < 0 || ratio < best_ratio - 1e-12 ||
              (std::abs(ratio - best_ratio) <= 1e-12 &&
               basis_[i] < basis_[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0)
        throw input_error("coupling LP unbounded (cannot happen for couplings)");
      pivot(T, leave, enter);
    }
  }

  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd c_;
  std::vector<int> basis_;
};

}  // namespace

double exact_convex_extension_lp(const ValueOracle& oracle,
                                 const MarginalProfile& w, std::int64_t cap) {
  const auto& d = oracle.dims();
  if (w.n() != d.n || w.q() != d.q)
    throw input_error("marginal profile does not match oracle dims");
  const std::int64_t points = pow_int(d.q, d.n);
  if (points > cap)
    throw cap_exceeded("exact_convex_extension_lp: q^n = " +
                       std::to_string(points) + " exceeds cap " +
                       std::to_string(cap));

  Eigen::VectorXd costs(points);
  Assignment x = Assignment::Zero(d.n);
  for (std::int64_t idx = 0; idx < points; ++idx) {
    costs[idx] = oracle.eval_counted(x);
    for (int i = 0; i < d.n; ++i) {
      if (++x[i] < d.q) break;
      x[i] = 0;
    }
  }

  const Eigen::Index rows = 1 + static_cast<Eigen::Index>(d.n) * d.q;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, points);
  Eigen::VectorXd b(rows);
  A.row(0).setOnes();
  b[0] = 1.0;
  std::vector<int> digits(d.n);
  for (std::int64_t idx = 0; idx < points; ++idx) {
    decode_index(idx, d.q, d.n, digits.data());
    for (int i = 0; i < d.n; ++i)
      A(1 + static_cast<Eigen::Index>(i) * d.q + digits[i], idx) = 1.0;
  }
  for (int i = 0; i < d.n; ++i) {
    for (int a = 0; a < d.q; ++a)
      b[1 + static_cast<Eigen::Index>(i) * d.q + a] = w.coords[i].probs[a];
  }

  return EqualitySimplex(std::move(A), std::move(b), std::move(costs)).solve();
}

double lovasz_extension(const ValueOracle& oracle, const Eigen::VectorXd& t,
                        bool verify) {
  const auto& d = oracle.dims();
  if (d.q != 2) throw input_error("lovasz_extension is defined for q = 2 only");
  if (t.size() != d.n) throw input_error("lovasz_extension: t has wrong length");
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0 && t[i] <= 1.0))
      throw input_error("lovasz_extension: t entries must lie in [0,1]");
  }
  if (verify) {
    const CheckReport sub = check_fractional_polymorphism(
        standard_family("min_max", 2), oracle, CheckMode::exhaustive);
    if (!sub.pass)
      throw check_failed("function is not submodular: " + sub.witness);
  }

  // Greedy formula: sort coordinates by t descending and telescope over the
  // nested level sets.
  std::vector<int> order(d.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return t[a] > t[b]; });

  Assignment level = Assignment::Zero(d.n);
  double value = (1.0 - t[order[0]]) * evaluate(oracle, level);
  for (int j = 0; j < d.n; ++j) {
    level[order[j]] = 1;
    const double next_t = (j + 1 < d.n) ? t[order[j + 1]] : 0.0;
    value += (t[order[j]] - next_t) * evaluate(oracle, level);
  }
  return value;
}

}  // namespace polymin
