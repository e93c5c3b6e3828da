#include "polymin/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace polymin {

namespace {

Eigen::VectorXd side_a_marginal(const PairJoint& j) { return j.mass.rowwise().sum(); }
Eigen::VectorXd side_b_marginal(const PairJoint& j) { return j.mass.colwise().sum(); }

std::vector<int> support_of(const Eigen::VectorXd& m) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m[i] > 0.0) s.push_back(static_cast<int>(i));
  }
  return s;
}

}  // namespace

PairJoint make_pair_joint(Eigen::MatrixXd mass) {
  if (mass.rows() < 1 || mass.cols() < 1)
    throw input_error("pair joint needs a nonempty mass matrix");
  for (Eigen::Index a = 0; a < mass.rows(); ++a) {
    for (Eigen::Index b = 0; b < mass.cols(); ++b) {
      if (!std::isfinite(mass(a, b)) || mass(a, b) < 0.0)
        throw input_error("pair joint entry negative or non-finite");
    }
  }
  const double sum = mass.sum();
  if (std::abs(sum - 1.0) > 1e-9)
    throw input_error("pair joint mass sums to " + std::to_string(sum));
  mass /= sum;
  return PairJoint{static_cast<int>(mass.rows()), static_cast<int>(mass.cols()),
                   std::move(mass)};
}

PairJoint pair_from_joint(const JointDistribution& mu, int coord) {
  const int q = mu.dims.q, n = mu.dims.n;
  if (coord < 1 || coord >= n)
    throw input_error("pair_from_joint: tracked coordinate needs 1 <= coord < n");
  const std::int64_t prefix_size = pow_int(q, coord);
  const std::int64_t stride = prefix_size;  // coordinate `coord` sits above the prefix
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(q, prefix_size);
  for (std::int64_t idx = 0; idx < mu.mass.size(); ++idx) {
    const std::int64_t b = idx % prefix_size;
    const int a = static_cast<int>((idx / stride) % q);
    mass(a, b) += mu.mass[idx];
  }
  return PairJoint{q, static_cast<int>(prefix_size), std::move(mass)};
}

JointDistribution pair_to_joint(const PairJoint& pj) {
  if (pj.qa != pj.qb) throw input_error("pair_to_joint requires qa == qb");
  const int q = pj.qa;
  Eigen::VectorXd mass(static_cast<Eigen::Index>(q) * q);
  // coordinate 0 = side A (least significant), coordinate 1 = side B
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) mass[a + static_cast<Eigen::Index>(q) * b] = pj.mass(a, b);
  }
  return make_joint(ProblemDims{q, 2}, std::move(mass));
}

namespace {

/// Normalized mass matrix restricted to positive-mass atoms, plus supports.
struct NormalizedPair {
  std::vector<int> sup_a, sup_b;
  Eigen::VectorXd ma, mb;  // marginals restricted to support
  Eigen::MatrixXd M;       // M[a,b] = mass/sqrt(ma*mb)
  bool degenerate = false;
};

NormalizedPair normalize_pair(const PairJoint& joint) {
  NormalizedPair np;
  const Eigen::VectorXd full_a = side_a_marginal(joint);
  const Eigen::VectorXd full_b = side_b_marginal(joint);
  np.sup_a = support_of(full_a);
  np.sup_b = support_of(full_b);
  if (np.sup_a.size() <= 1 || np.sup_b.size() <= 1) {
    np.degenerate = true;
    return np;
  }
  const int sa = static_cast<int>(np.sup_a.size());
  const int sb = static_cast<int>(np.sup_b.size());
  np.ma.resize(sa);
  np.mb.resize(sb);
  for (int i = 0; i < sa; ++i) np.ma[i] = full_a[np.sup_a[i]];
  for (int j = 0; j < sb; ++j) np.mb[j] = full_b[np.sup_b[j]];
  np.M.resize(sa, sb);
  for (int i = 0; i < sa; ++i) {
    for (int j = 0; j < sb; ++j) {
      np.M(i, j) = joint.mass(np.sup_a[i], np.sup_b[j]) /
                   std::sqrt(np.ma[i] * np.mb[j]);
    }
  }
  return np;
}

}  // namespace

double maximal_correlation(const PairJoint& joint) {
  const NormalizedPair np = normalize_pair(joint);
  if (np.degenerate) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(np.M);
  const double rho = svd.singularValues()[1];
  return std::clamp(rho, 0.0, 1.0);
}

SingularBasis singular_basis(const PairJoint& joint) {
  const NormalizedPair np = normalize_pair(joint);
  if (np.degenerate) {
    // Single-atom side: only the constant pair exists.
    SingularBasis sb;
    sb.left = Eigen::MatrixXd::Ones(joint.qa, 1);
    sb.right = Eigen::MatrixXd::Ones(joint.qb, 1);
    sb.singulars = Eigen::VectorXd::Ones(1);
    return sb;
  }
  const int sa = static_cast<int>(np.sup_a.size());
  const int sb_n = static_cast<int>(np.sup_b.size());
  const int L = std::min(sa, sb_n);

  const Eigen::VectorXd sqrt_a = np.ma.cwiseSqrt();
  const Eigen::VectorXd sqrt_b = np.mb.cwiseSqrt();
  // The constant pair (sqrt_a, sqrt_b, 1) is exact; deflate it so the
  // remaining singular structure is orthogonal to the constants.
  const Eigen::MatrixXd deflated = np.M - sqrt_a * sqrt_b.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      deflated, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SingularBasis out;
  out.left = Eigen::MatrixXd::Zero(joint.qa, L);
  out.right = Eigen::MatrixXd::Zero(joint.qb, L);
  out.singulars = Eigen::VectorXd::Zero(L);
  out.singulars[0] = 1.0;
  for (int i = 0; i < sa; ++i) out.left(np.sup_a[i], 0) = 1.0;
  for (int j = 0; j < sb_n; ++j) out.right(np.sup_b[j], 0) = 1.0;
  for (int c = 1; c < L; ++c) {
    out.singulars[c] = std::clamp(svd.singularValues()[c - 1], 0.0, 1.0);
    for (int i = 0; i < sa; ++i)
      out.left(np.sup_a[i], c) = svd.matrixU()(i, c - 1) / sqrt_a[i];
    for (int j = 0; j < sb_n; ++j)
      out.right(np.sup_b[j], c) = svd.matrixV()(j, c - 1) / sqrt_b[j];
  }

  // Reconstruction residual over positive-mass atoms: the decomposition must
  // reproduce mu via mu(a,b) = mu_X(a) mu_Y(b) sum_c sigma_c phi_c(a) psi_c(b).
  double residual = 0.0;
  for (int i = 0; i < sa; ++i) {
    for (int j = 0; j < sb_n; ++j) {
      double rec = 0.0;
      for (int c = 0; c < L; ++c) {
        rec += out.singulars[c] * out.left(np.sup_a[i], c) *
               out.right(np.sup_b[j], c);
      }
      rec *= np.ma[i] * np.mb[j];
      residual = std::max(residual,
                          std::abs(rec - joint.mass(np.sup_a[i], np.sup_b[j])));
    }
  }
  out.residual = residual;
  return out;
}

namespace {

LinearityReport linearity_impl(const Operation& p, const PairJoint& pair_mu,
                               const SingularBasis& basis, std::int64_t cap) {
  if (pair_mu.qa != pair_mu.qb)
    throw input_error("linearity is defined for pairwise spaces [q] x [q]");
  if (p.q != pair_mu.qa)
    throw input_error("linearity: operation alphabet does not match pair space");
  const int q = p.q, k = p.k;
  const std::int64_t rows = pow_int(q, k);
  if (rows > cap) throw cap_exceeded("linearity: q^k exceeds cap");

  LinearityReport rep;
  const int L = static_cast<int>(basis.singulars.size());
  rep.rho = (L >= 2) ? basis.singulars[1] : 0.0;
  const double threshold = rep.rho * rep.rho;
  std::vector<int> kept;  // basis indices s >= 1 with sigma_s >= rho^2
  for (int s = 1; s < L; ++s) {
    if (basis.singulars[s] >= threshold) kept.push_back(s);
  }
  for (int i = 0; i < k; ++i) {
    for (int s : kept) rep.linear_indices.emplace_back(i, s);
  }

  const Eigen::VectorXd mu1 = side_a_marginal(pair_mu);
  const int nk = static_cast<int>(kept.size());
  // coef(c, i*nk + j) = degree-one coefficient of indicator p_c on phi_{kept[j]}(x_i)
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(q, static_cast<Eigen::Index>(k) * nk);
  Eigen::VectorXd mass_of_symbol = Eigen::VectorXd::Zero(q);  // m_c = Pr[p(x)=c]
  std::vector<int> digits(k, 0);
  for (std::int64_t idx = 0; idx < rows; ++idx) {
    double w = 1.0;
    for (int i = 0; i < k; ++i) w *= mu1[digits[i]];
    if (w > 0.0) {
      const int c = p.table[idx];
      mass_of_symbol[c] += w;
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < nk; ++j)
          coef(c, static_cast<Eigen::Index>(i) * nk + j) +=
              w * basis.left(digits[i], kept[j]);
      }
    }
    for (int i = 0; i < k; ++i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
  }

  // Gram matrices over the mean-centered indicator span:
  //   A = linear-part inner products, B = <p_c - m_c, p_d - m_d>.
  const Eigen::MatrixXd lin_gram = coef * coef.transpose();
  const Eigen::MatrixXd full_gram =
      Eigen::MatrixXd(mass_of_symbol.asDiagonal()) -
      mass_of_symbol * mass_of_symbol.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full_gram);
  std::vector<int> pos;
  for (int i = 0; i < q; ++i) {
    if (es.eigenvalues()[i] > 1e-12) pos.push_back(i);
  }
  if (pos.empty()) {
    rep.degenerate_span = true;
    rep.lin = 0.0;
    return rep;
  }
  Eigen::MatrixXd W(q, pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i)
    W.col(i) = es.eigenvectors().col(pos[i]) / std::sqrt(es.eigenvalues()[pos[i]]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rayleigh(W.transpose() *
                                                          lin_gram * W);
  rep.lin = std::clamp(rayleigh.eigenvalues().maxCoeff(), 0.0, 1.0);
  return rep;
}

}  // namespace

LinearityReport linearity(const Operation& p, const PairJoint& pair_mu,
                          std::int64_t cap) {
  return linearity_impl(p, pair_mu, singular_basis(pair_mu), cap);
}

LinearityReport linearity(const OperationDistribution& P,
                          const PairJoint& pair_mu, std::int64_t cap) {
  const SingularBasis basis = singular_basis(pair_mu);
  LinearityReport rep;
  double weighted = 0.0;
  for (const auto& atom : P.atoms) {
    LinearityReport r = linearity_impl(atom.op, pair_mu, basis, cap);
    if (rep.per_atom.empty()) {
      rep.rho = r.rho;
      rep.linear_indices = r.linear_indices;
    }
    rep.per_atom.push_back(r.lin);
    weighted += atom.weight * r.lin;
    rep.degenerate_span = rep.degenerate_span || r.degenerate_span;
  }
  rep.lin = weighted;
  return rep;
}

double tv_to_product(const JointDistribution& mu, std::int64_t cap) {
  if (mu.mass.size() > cap) throw cap_exceeded("tv_to_product: q^n exceeds cap");
  return l1_distance(mu, product_joint(marginals_of(mu)));
}

BoundCheck check_corr_stat_bound(const PairJoint& joint) {
  const Eigen::VectorXd ma = side_a_marginal(joint);
  const Eigen::VectorXd mb = side_b_marginal(joint);
  BoundCheck bc;
  bc.lhs = (joint.mass - ma * mb.transpose()).cwiseAbs().sum();
  bc.rhs = std::min(joint.qa, joint.qb) * maximal_correlation(joint);
  bc.holds = bc.lhs <= bc.rhs + 1e-9;
  return bc;
}

DecayTrace decay_trace(const OperationDistribution& P,
                       const JointDistribution& mu0, int T,
                       int tracked_coordinate) {
  const int n = mu0.dims.n;
  if (n < 2) throw input_error("decay_trace needs n >= 2");
  const int coord = (tracked_coordinate < 0) ? n - 1 : tracked_coordinate;
  if (coord < 1 || coord >= n)
    throw input_error("decay_trace: tracked coordinate out of range");
  // Lin needs a [q] x [q] pair, i.e. tracking a coordinate against a single
  // predecessor; evolution commutes with marginalization, so the sub-pair
  // obeys the same per-step lemma.
  const bool pairwise = (coord == 1);
  const bool single_atom = P.atoms.size() == 1;

  DecayTrace trace;
  trace.tracked_coordinate = coord;
  JointDistribution mu = mu0;
  double prev_bound = std::numeric_limits<double>::quiet_NaN();
  for (int t = 0; t <= T; ++t) {
    DecayStep step;
    step.t = t;
    const PairJoint pj = pair_from_joint(mu, coord);
    step.rho = maximal_correlation(pj);
    step.tv = tv_to_product(mu);
    step.bound = std::numeric_limits<double>::quiet_NaN();
    if (pairwise && t < T) {
      // Bound on rho_{t+1} from the current state; exact lemma for a single
      // deterministic operation, weighted per-atom picture for mixtures.
      double bound = 0.0;
      for (const auto& atom : P.atoms) {
        const double lin = linearity(atom.op, pj).lin;
        bound += atom.weight *
                 step.rho * (1.0 - 0.5 * (1.0 - lin) * (1.0 - step.rho * step.rho));
      }
      step.bound = bound;
    }
    if (single_atom && t > 0 && std::isfinite(prev_bound)) {
      step.bound_violated = step.rho > prev_bound + 1e-6;
    }
    prev_bound = step.bound;
    trace.steps.push_back(step);
    if (t < T) mu = evolve_joint_distribution(P, mu);
  }
  return trace;
}

BoundCheck check_corrvsind_bound(const OperationDistribution& P,
                                 const JointDistribution& mu0, int r,
                                 double lin_estimate) {
  if (r < 0) throw input_error("check_corrvsind_bound: r must be >= 0");
  const int n = mu0.dims.n;
  BoundCheck bc;
  bc.rhs = 0.0;
  for (int i = 1; i < n; ++i) {
    const double rho_i = maximal_correlation(pair_from_joint(mu0, i));
    bc.rhs += rho_i * std::pow(1.0 - (1.0 - lin_estimate) * (1.0 - rho_i * rho_i),
                               r);
  }
  JointDistribution mu = mu0;
  JointDistribution prod = product_joint(marginals_of(mu0));
  for (int t = 0; t < r; ++t) {
    mu = evolve_joint_distribution(P, mu);
    prod = evolve_joint_distribution(P, prod);
  }
  bc.lhs = l1_distance(mu, prod);
  bc.holds = bc.lhs <= bc.rhs + 1e-9;
  return bc;
}

}  // namespace polymin
