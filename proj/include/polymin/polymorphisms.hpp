#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polymin/core.hpp"

namespace polymin {

/// Exact weight num/den used for measure-preservation checks; normalized with
/// den > 0 and gcd(num, den) = 1. Desk-scale denominators only.
struct Rational {
  long long num = 0;
  long long den = 1;
};

Rational make_rational(long long num, long long den);
Rational rat_add(Rational a, Rational b);
bool rat_equal(Rational a, Rational b);
double rat_value(Rational r);

/// Total map [q]^k -> [q] stored as a dense table in canonical order.
struct Operation {
  int q = 2;
  int k = 1;
  Eigen::VectorXi table;  // length q^k, entries in [0,q)
};

Operation make_operation(int q, int k, Eigen::VectorXi table);

/// Table lookup for one symbol row (length k).
int apply_row(const Operation& p, const int* row);

/// Coordinatewise application to k assignments of common dims.
Assignment apply_op(const Operation& p, const std::vector<Assignment>& xs);

/// Composition p1 (x) p2 of arity k1*k2: the input grid {x_ij} is laid out
/// row-major (row i = inputs of the i-th argument of p1), rows fed through p2.
/// Throws cap_exceeded when the composed table would exceed `table_cap`.
Operation compose(const Operation& p1, const Operation& p2,
                  std::int64_t table_cap = std::int64_t{1} << 24);

/// Finitely supported distribution over operations of common (q, k). Exact
/// rational weights are retained when supplied so structural checks can be
/// exact.
struct OperationAtom {
  double weight = 0.0;
  std::optional<Rational> exact_weight;
  Operation op;
};

struct OperationDistribution {
  int q = 2;
  int k = 1;
  std::vector<OperationAtom> atoms;

  bool has_exact_weights() const;
  Eigen::VectorXd weights() const;
};

OperationDistribution make_distribution(std::vector<OperationAtom> atoms);

/// Verdict of a structural check. `witness` holds a human-readable
/// counterexample and is empty iff pass; `permutations` is filled by the
/// transitive-symmetry check (one permutation per ordered position pair,
/// flattened k*k rows).
struct CheckReport {
  bool pass = false;
  double worst_violation = 0.0;
  std::string witness;
  std::string note;
  std::vector<std::vector<int>> permutations;
};

/// Brute-force scan of S_k for the automorphism group of p, then transitivity
/// of its action on input positions. Throws cap_exceeded for k > max_arity.
CheckReport is_transitive_symmetric(const Operation& p, int max_arity = 8);

/// For every input row a and symbol c, the P-expected probability of output c
/// must equal the fraction of inputs equal to c. Exact when all weights are
/// rational and k divides cleanly; tolerance 1e-12 otherwise.
CheckReport is_measure_preserving(const OperationDistribution& P,
                                  std::int64_t cap = std::int64_t{1} << 24);

enum class CheckMode { exhaustive, sampled };

/// Tests (1/k) sum_i f(x_i) >= E_{p~P} f(p(x_1..x_k)) over k-tuples of
/// assignments: all q^{nk} tuples in exhaustive mode (cap), or `trials`
/// seeded random tuples in sampled mode (reported as evidence, not proof).
CheckReport check_fractional_polymorphism(
    const OperationDistribution& P, const ValueOracle& oracle, CheckMode mode,
    int trials = 1000, std::uint64_t rng_seed = 0,
    std::int64_t cap = std::int64_t{1} << 22);

// Named operations used by the standard families and tests.
Operation op_min(int q, int k);
Operation op_max(int q, int k);
Operation op_median3(int q);
Operation op_majority3();   // q = 2
Operation op_minority3();   // q = 2 (3-bit parity)
Operation op_or2();         // q = 2
Operation op_and2();        // q = 2
Operation op_dictator(int q, int k, int position);
Operation op_identity(int q);  // arity 1

/// Named measure-preserving families: min_max (arity 2), sorted3 (arity 3),
/// maj_min (arity 3, q=2), or_and (arity 2, q=2).
OperationDistribution standard_family(const std::string& name, int q);

}  // namespace polymin
