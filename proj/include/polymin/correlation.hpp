#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "polymin/dynamics.hpp"
#include "polymin/polymorphisms.hpp"

namespace polymin {

/// Joint distribution of a pair (X, Y) with X in [qa], Y in [qb]; the B side
/// may be a prefix space [q]^m. mass(a, b) >= 0 sums to 1.
struct PairJoint {
  int qa = 2;
  int qb = 2;
  Eigen::MatrixXd mass;
};

PairJoint make_pair_joint(Eigen::MatrixXd mass);

/// Pair (X_coord, (X_0..X_{coord-1})): side A is the tracked coordinate, side
/// B the prefix space [q]^coord. Requires coord >= 1.
PairJoint pair_from_joint(const JointDistribution& mu, int coord);

/// Pairwise joint as an n=2 joint distribution (requires qa == qb).
JointDistribution pair_to_joint(const PairJoint& pj);

/// Maximal correlation rho(X,Y): the second singular value of
/// M[a,b] = mass(a,b)/sqrt(mass_A(a) mass_B(b)) restricted to positive-mass
/// atoms; 0 by convention when either side has a single atom. Clamped to [0,1].
double maximal_correlation(const PairJoint& joint);

/// Singular decomposition of the conditional-expectation operator, with the
/// constant pair (phi_0 = psi_0 = 1, sigma_0 = 1) enforced by deflation.
/// Basis functions are full-length (zero at zero-mass symbols).
struct SingularBasis {
  Eigen::MatrixXd left;      // qa x L, column i = phi_i
  Eigen::MatrixXd right;     // qb x L, column i = psi_i
  Eigen::VectorXd singulars; // length L, nonincreasing, [0] = 1
  double residual = 0.0;     // max reconstruction error over atoms
};

SingularBasis singular_basis(const PairJoint& joint);

/// Linearity Lin_mu(p): the largest fraction of norm an element of the
/// mean-centered span of p's indicator components can put on the degree-one
/// basis functions whose singular value is >= rho(mu)^2. Pairwise spaces
/// [q] x [q] only.
struct LinearityReport {
  double lin = 0.0;
  double rho = 0.0;
  std::vector<std::pair<int, int>> linear_indices;  // (coordinate, basis index)
  std::vector<double> per_atom;  // filled for distributions
  bool degenerate_span = false;
};

LinearityReport linearity(const Operation& p, const PairJoint& pair_mu,
                          std::int64_t cap = std::int64_t{1} << 24);
LinearityReport linearity(const OperationDistribution& P,
                          const PairJoint& pair_mu,
                          std::int64_t cap = std::int64_t{1} << 24);

/// L1 distance between mu and the product of its marginals.
double tv_to_product(const JointDistribution& mu,
                     std::int64_t cap = std::int64_t{1} << 24);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||mu_XY - mu_X x mu_Y||_1 <= min(qa, qb) * rho(X,Y), slack 1e-9.
BoundCheck check_corr_stat_bound(const PairJoint& joint);

struct DecayStep {
  int t = 0;
  double rho = 0.0;
  double tv = 0.0;
  double bound = 0.0;  // NaN when no per-step bound applies
  bool bound_violated = false;
};

struct DecayTrace {
  std::vector<DecayStep> steps;
  int tracked_coordinate = 1;
};

/// Evolves mu0 exactly for T mixture steps, recording rho_t of the tracked
/// coordinate against its prefix and the L1 distance to the product of
/// marginals. When the tracked pair is [q] x [q], also records the per-step
/// correlation-decay bound: asserted (flagged on >1e-6 excess) for a
/// single-atom P, logged as the weighted per-atom value for mixtures.
DecayTrace decay_trace(const OperationDistribution& P,
                       const JointDistribution& mu0, int T,
                       int tracked_coordinate = -1);

/// Experiment comparing ||P^r(mu) - P^r(mu^x)||_1 (computed by exact mixture
/// evolution of both sides) against sum_i rho_i (1-(1-lin)(1-rho_i^2))^r with
/// a caller-supplied linearity value. Reported, not asserted.
BoundCheck check_corrvsind_bound(const OperationDistribution& P,
                                 const JointDistribution& mu0, int r,
                                 double lin_estimate);

}  // namespace polymin
