#include "polymin/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace polymin {

SimplexPoint make_simplex_point(Eigen::VectorXd probs) {
  if (probs.size() < 2) throw input_error("simplex point needs q >= 2 entries");
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0)
      throw input_error("simplex point entry negative or non-finite");
  }
  const double sum = probs.sum();
  if (std::abs(sum - 1.0) > 1e-9)
    throw input_error("simplex point sums to " + std::to_string(sum) +
                      ", outside 1e-9 of 1");
  probs /= sum;
  return SimplexPoint{std::move(probs)};
}

SimplexPoint point_mass(int q, int symbol) {
  if (symbol < 0 || symbol >= q) throw input_error("point mass symbol out of range");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(q);
  p[symbol] = 1.0;
  return SimplexPoint{std::move(p)};
}

SimplexPoint uniform_simplex(int q) {
  return SimplexPoint{Eigen::VectorXd::Constant(q, 1.0 / q)};
}

MarginalProfile make_profile(std::vector<SimplexPoint> coords) {
  if (coords.empty()) throw input_error("marginal profile needs n >= 1 coordinates");
  const Eigen::Index q = coords.front().probs.size();
  for (const auto& c : coords) {
    if (c.probs.size() != q)
      throw input_error("marginal profile coordinates with mixed q");
  }
  return MarginalProfile{std::move(coords)};
}

MarginalProfile uniform_profile(int q, int n) {
  return MarginalProfile{std::vector<SimplexPoint>(
      static_cast<std::size_t>(n), uniform_simplex(q))};
}

MarginalProfile point_mass_profile(const Assignment& x, int q) {
  std::vector<SimplexPoint> coords;
  coords.reserve(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) coords.push_back(point_mass(q, x[i]));
  return MarginalProfile{std::move(coords)};
}

Eigen::VectorXd flatten(const MarginalProfile& w) {
  const int q = w.q(), n = w.n();
  Eigen::VectorXd v(static_cast<Eigen::Index>(q) * n);
  for (int i = 0; i < n; ++i) v.segment(static_cast<Eigen::Index>(i) * q, q) = w.coords[i].probs;
  return v;
}

MarginalProfile unflatten(const Eigen::VectorXd& v, int q, int n) {
  if (v.size() != static_cast<Eigen::Index>(q) * n)
    throw input_error("flattened profile has wrong length");
  std::vector<SimplexPoint> coords;
  coords.reserve(n);
  for (int i = 0; i < n; ++i)
    coords.push_back(make_simplex_point(v.segment(static_cast<Eigen::Index>(i) * q, q)));
  return MarginalProfile{std::move(coords)};
}

JointDistribution make_joint(ProblemDims dims, Eigen::VectorXd mass) {
  const std::int64_t total = pow_int(dims.q, dims.n);
  if (mass.size() != total)
    throw input_error("joint mass length does not match q^n");
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    if (!std::isfinite(mass[i]) || mass[i] < 0.0)
      throw input_error("joint mass entry negative or non-finite");
  }
  const double sum = mass.sum();
  if (std::abs(sum - 1.0) > 1e-9)
    throw input_error("joint mass sums to " + std::to_string(sum));
  mass /= sum;
  return JointDistribution{dims, std::move(mass)};
}

JointDistribution point_mass_joint(ProblemDims dims, const Assignment& x) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(pow_int(dims.q, dims.n));
  mass[index_of(x, dims.q)] = 1.0;
  return JointDistribution{dims, std::move(mass)};
}

SimplexPoint marginal_of(const JointDistribution& mu, int coord) {
  const int q = mu.dims.q, n = mu.dims.n;
  if (coord < 0 || coord >= n) throw input_error("marginal coordinate out of range");
  const std::int64_t stride = pow_int(q, coord);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(q);
  for (std::int64_t idx = 0; idx < mu.mass.size(); ++idx) {
    probs[static_cast<int>((idx / stride) % q)] += mu.mass[idx];
  }
  return SimplexPoint{std::move(probs)};
}

MarginalProfile marginals_of(const JointDistribution& mu) {
  std::vector<SimplexPoint> coords;
  coords.reserve(mu.dims.n);
  for (int i = 0; i < mu.dims.n; ++i) coords.push_back(marginal_of(mu, i));
  return MarginalProfile{std::move(coords)};
}

JointDistribution product_joint(const MarginalProfile& w, std::int64_t cap) {
  const int q = w.q(), n = w.n();
  const std::int64_t total = pow_int(q, n);
  if (total > cap) throw cap_exceeded("product_joint: q^n exceeds cap");
  Eigen::VectorXd mass(total);
  std::vector<int> digits(n, 0);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    double m = 1.0;
    for (int i = 0; i < n; ++i) m *= w.coords[i].probs[digits[i]];
    mass[idx] = m;
    for (int i = 0; i < n; ++i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
  }
  return JointDistribution{ProblemDims{q, n}, std::move(mass)};
}

double l1_distance(const JointDistribution& a, const JointDistribution& b) {
  if (a.dims.q != b.dims.q || a.dims.n != b.dims.n)
    throw input_error("l1_distance: mismatched spaces");
  return (a.mass - b.mass).cwiseAbs().sum();
}

JointDistribution noise(const JointDistribution& mu, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw input_error("noise rate gamma must lie in [0,1]");
  const int q = mu.dims.q, n = mu.dims.n;
  const std::int64_t total = mu.mass.size();
  // Resampling uses each coordinate's own original marginal; single-coordinate
  // resampling leaves every marginal fixed, so the kernels commute.
  const MarginalProfile marg = marginals_of(mu);
  Eigen::VectorXd mass = mu.mass;
  Eigen::VectorXd collapsed(total / q);
  for (int i = 0; i < n; ++i) {
    const std::int64_t stride = pow_int(q, i);
    collapsed.setZero();
    for (std::int64_t idx = 0; idx < total; ++idx) {
      const std::int64_t low = idx % stride;
      const std::int64_t high = idx / (stride * q);
      collapsed[high * stride + low] += mass[idx];
    }
    for (std::int64_t idx = 0; idx < total; ++idx) {
      const std::int64_t low = idx % stride;
      const std::int64_t high = idx / (stride * q);
      const int a = static_cast<int>((idx / stride) % q);
      mass[idx] = (1.0 - gamma) * mass[idx] +
                  gamma * marg.coords[i].probs[a] * collapsed[high * stride + low];
    }
  }
  return JointDistribution{mu.dims, std::move(mass)};
}

SimplexPoint apply_op_to_simplex(const Operation& p, const SimplexPoint& z) {
  if (p.q != z.probs.size()) throw input_error("operation/simplex alphabet mismatch");
  const int q = p.q, k = p.k;
  const std::int64_t rows = pow_int(q, k);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(q);
  std::vector<int> digits(k, 0);
  for (std::int64_t idx = 0; idx < rows; ++idx) {
    double m = 1.0;
    for (int j = 0; j < k; ++j) m *= z.probs[digits[j]];
    out[p.table[idx]] += m;
    for (int j = 0; j < k; ++j) {
      if (++digits[j] < q) break;
      digits[j] = 0;
    }
  }
  // Renormalize: a 1-ulp excess compounds under iterated squaring, so long
  // walks must stay exactly on the simplex.
  out = out.cwiseMax(0.0);
  out /= out.sum();
  return SimplexPoint{std::move(out)};
}

SimplexPoint apply_dist_to_simplex(const OperationDistribution& P,
                                   const SimplexPoint& z) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(z.probs.size());
  for (const auto& atom : P.atoms)
    out += atom.weight * apply_op_to_simplex(atom.op, z).probs;
  return SimplexPoint{std::move(out)};
}

MarginalProfile evolve_marginals(const OperationDistribution& P,
                                 const MarginalProfile& w, int r, Rng& rng,
                                 bool per_coordinate_ops) {
  if (r < 0) throw input_error("walk length r must be >= 0");
  const Eigen::VectorXd weights = P.weights();
  MarginalProfile z = w;
  for (int t = 0; t < r; ++t) {
    if (per_coordinate_ops) {
      for (auto& coord : z.coords) {
        const auto& op = P.atoms[rng.sample_cdf(weights)].op;
        coord = apply_op_to_simplex(op, coord);
      }
    } else {
      const auto& op = P.atoms[rng.sample_cdf(weights)].op;
      for (auto& coord : z.coords) coord = apply_op_to_simplex(op, coord);
    }
  }
  return z;
}

Assignment sample_assignment(const OperationDistribution& P,
                             const MarginalProfile& w, int r, Rng& rng,
                             bool per_coordinate_ops) {
  const MarginalProfile z = evolve_marginals(P, w, r, rng, per_coordinate_ops);
  Assignment x(z.n());
  for (int i = 0; i < z.n(); ++i) x[i] = rng.sample_cdf(z.coords[i].probs);
  return x;
}

JointDistribution evolve_joint_exact(const Operation& p,
                                     const JointDistribution& mu,
                                     std::int64_t cap) {
  if (p.q != mu.dims.q) throw input_error("operation/joint alphabet mismatch");
  const int q = mu.dims.q, n = mu.dims.n, k = p.k;
  const std::int64_t points = mu.mass.size();
  std::int64_t terms = 1;
  for (int j = 0; j < k; ++j) {
    if (terms > cap / points + 1)
      throw cap_exceeded("evolve_joint_exact: (q^n)^k exceeds cap");
    terms *= points;
  }
  if (terms > cap)
    throw cap_exceeded("evolve_joint_exact: (q^n)^k = " + std::to_string(terms) +
                       " exceeds cap " + std::to_string(cap));

  // Digits of every point, precomputed once.
  std::vector<int> digits(static_cast<std::size_t>(points) * n);
  for (std::int64_t idx = 0; idx < points; ++idx)
    decode_index(idx, q, n, digits.data() + static_cast<std::size_t>(idx) * n);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(points);
  std::vector<std::int64_t> tuple(k, 0);
  std::vector<int> row(k);
  for (std::int64_t c = 0; c < terms; ++c) {
    double m = 1.0;
    for (int j = 0; j < k; ++j) m *= mu.mass[tuple[j]];
    if (m > 0.0) {
      std::int64_t out_idx = 0;
      for (int i = n - 1; i >= 0; --i) {
        for (int j = 0; j < k; ++j)
          row[j] = digits[static_cast<std::size_t>(tuple[j]) * n + i];
        out_idx = out_idx * q + apply_row(p, row.data());
      }
      out[out_idx] += m;
    }
    for (int j = 0; j < k; ++j) {
      if (++tuple[j] < points) break;
      tuple[j] = 0;
    }
  }
  return JointDistribution{mu.dims, std::move(out)};
}

JointDistribution evolve_joint_distribution(const OperationDistribution& P,
                                            const JointDistribution& mu,
                                            std::int64_t cap) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mu.mass.size());
  for (const auto& atom : P.atoms)
    out += atom.weight * evolve_joint_exact(atom.op, mu, cap).mass;
  return JointDistribution{mu.dims, std::move(out)};
}

double distributional_extension(const ValueOracle& oracle,
                                const JointDistribution& mu,
                                std::int64_t cap) {
  if (oracle.dims().q != mu.dims.q || oracle.dims().n != mu.dims.n)
    throw input_error("oracle/joint dimension mismatch");
  const std::int64_t points = mu.mass.size();
  if (points > cap) throw cap_exceeded("distributional_extension: q^n exceeds cap");
  double acc = 0.0;
  Assignment x = Assignment::Zero(mu.dims.n);
  for (std::int64_t idx = 0; idx < points; ++idx) {
    if (mu.mass[idx] > 0.0) acc += mu.mass[idx] * oracle.eval_counted(x);
    for (int i = 0; i < mu.dims.n; ++i) {
      if (++x[i] < mu.dims.q) break;
      x[i] = 0;
    }
  }
  return acc;
}

}  // namespace polymin
