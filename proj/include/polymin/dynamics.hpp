#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "polymin/core.hpp"
#include "polymin/polymorphisms.hpp"
#include "polymin/rng.hpp"

namespace polymin {

/// A probability distribution over [q]: nonnegative entries summing to 1.
/// Construction renormalizes sums within 1e-9 of 1 and rejects anything else.
struct SimplexPoint {
  Eigen::VectorXd probs;
};

SimplexPoint make_simplex_point(Eigen::VectorXd probs);
SimplexPoint point_mass(int q, int symbol);
SimplexPoint uniform_simplex(int q);

/// One simplex point per coordinate: a point of (Delta_q)^n.
struct MarginalProfile {
  std::vector<SimplexPoint> coords;

  int n() const { return static_cast<int>(coords.size()); }
  int q() const { return static_cast<int>(coords.front().probs.size()); }
};

MarginalProfile make_profile(std::vector<SimplexPoint> coords);
MarginalProfile uniform_profile(int q, int n);
MarginalProfile point_mass_profile(const Assignment& x, int q);

/// Flattened view (n*q reals, coordinate-major) used by the optimizer.
Eigen::VectorXd flatten(const MarginalProfile& w);
MarginalProfile unflatten(const Eigen::VectorXd& v, int q, int n);

/// Explicit distribution over [q]^n, mass in canonical order.
struct JointDistribution {
  ProblemDims dims;
  Eigen::VectorXd mass;
};

JointDistribution make_joint(ProblemDims dims, Eigen::VectorXd mass);
JointDistribution point_mass_joint(ProblemDims dims, const Assignment& x);

SimplexPoint marginal_of(const JointDistribution& mu, int coord);
MarginalProfile marginals_of(const JointDistribution& mu);

/// mu^x: the product of mu's marginals, as an explicit joint.
JointDistribution product_joint(const MarginalProfile& w,
                                std::int64_t cap = std::int64_t{1} << 24);

/// L1 distance between two joints on the same space.
double l1_distance(const JointDistribution& a, const JointDistribution& b);

/// Noise operator T_{1-gamma}: independently resample each coordinate from
/// its own marginal with probability gamma. Computed exactly as n sequential
/// single-coordinate kernels (cost n*q*q^n).
JointDistribution noise(const JointDistribution& mu, double gamma);

/// Pushforward of the product z^k under p: out[c] = sum over rows a with
/// p(a)=c of prod_j z[a_j].
SimplexPoint apply_op_to_simplex(const Operation& p, const SimplexPoint& z);

/// Mixture of apply_op_to_simplex over the atoms of P.
SimplexPoint apply_dist_to_simplex(const OperationDistribution& P,
                                   const SimplexPoint& z);

/// The marginal random walk: z_0 = w; r times sample p ~ P (one operation per
/// step, shared across coordinates) and push every coordinate forward.
/// `per_coordinate_ops` resamples the operation independently per coordinate
/// instead (non-default variant).
MarginalProfile evolve_marginals(const OperationDistribution& P,
                                 const MarginalProfile& w, int r, Rng& rng,
                                 bool per_coordinate_ops = false);

/// Runs the walk, then draws each coordinate independently from z_r; over
/// fresh operation draws the output law is exactly P^{(x)r}(w^x).
Assignment sample_assignment(const OperationDistribution& P,
                             const MarginalProfile& w, int r, Rng& rng,
                             bool per_coordinate_ops = false);

/// Exact pushforward p(mu): k independent samples from mu combined
/// coordinatewise. Cost (q^n)^k table terms; throws cap_exceeded beyond cap.
JointDistribution evolve_joint_exact(const Operation& p,
                                     const JointDistribution& mu,
                                     std::int64_t cap = 10'000'000);

/// One mixture step P(mu) = sum_atoms weight * p(mu).
JointDistribution evolve_joint_distribution(const OperationDistribution& P,
                                            const JointDistribution& mu,
                                            std::int64_t cap = 10'000'000);

/// F(mu) = E_{x~mu} f(x), computed exactly over all q^n points (queries
/// counted).
double distributional_extension(const ValueOracle& oracle,
                                const JointDistribution& mu,
                                std::int64_t cap = std::int64_t{1} << 24);

}  // namespace polymin
