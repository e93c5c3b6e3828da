#include "polymin/polymorphisms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "polymin/rng.hpp"

namespace polymin {

namespace {

std::string row_to_string(const int* row, int k) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < k; ++i) os << (i ? "," : "") << row[i];
  os << ")";
  return os.str();
}

std::string assignment_to_string(const Assignment& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

Rational make_rational(long long num, long long den) {
  if (den == 0) throw input_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

Rational rat_add(Rational a, Rational b) {
  return make_rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

bool rat_equal(Rational a, Rational b) {
  return a.num == b.num && a.den == b.den;
}

double rat_value(Rational r) {
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

Operation make_operation(int q, int k, Eigen::VectorXi table) {
  if (q < 2) throw input_error("operation with q < 2");
  if (k < 1) throw input_error("operation with arity < 1");
  const std::int64_t size = pow_int(q, k);
  if (table.size() != size)
    throw input_error("operation table length " + std::to_string(table.size()) +
                      " does not match q^k = " + std::to_string(size));
  for (std::int64_t i = 0; i < size; ++i) {
    if (table[i] < 0 || table[i] >= q)
      throw input_error("operation table entry out of [0,q) at index " +
                        std::to_string(i));
  }
  return Operation{q, k, std::move(table)};
}

int apply_row(const Operation& p, const int* row) {
  std::int64_t idx = 0;
  for (int j = p.k - 1; j >= 0; --j) idx = idx * p.q + row[j];
  return p.table[idx];
}

Assignment apply_op(const Operation& p, const std::vector<Assignment>& xs) {
  if (static_cast<int>(xs.size()) != p.k)
    throw input_error("apply_op: got " + std::to_string(xs.size()) +
                      " assignments for arity " + std::to_string(p.k));
  const int n = static_cast<int>(xs[0].size());
  for (const auto& x : xs) {
    if (static_cast<int>(x.size()) != n)
      throw input_error("apply_op: assignments of mixed lengths");
    for (int i = 0; i < n; ++i) {
      if (x[i] < 0 || x[i] >= p.q)
        throw input_error("apply_op: symbol out of [0,q)");
    }
  }
  Assignment out(n);
  std::vector<int> row(p.k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p.k; ++j) row[j] = xs[j][i];
    out[i] = apply_row(p, row.data());
  }
  return out;
}

Operation compose(const Operation& p1, const Operation& p2,
                  std::int64_t table_cap) {
  if (p1.q != p2.q) throw input_error("compose: alphabet mismatch");
  const int q = p1.q;
  const int k1 = p1.k, k2 = p2.k, kk = k1 * k2;
  const std::int64_t size = pow_int(q, kk);
  if (size > table_cap)
    throw cap_exceeded("compose: q^(k1*k2) = " + std::to_string(size) +
                       " exceeds table cap");
  Eigen::VectorXi table(size);
  std::vector<int> digits(kk, 0);
  std::vector<int> inner(k1);
  for (std::int64_t idx = 0; idx < size; ++idx) {
    for (int i = 0; i < k1; ++i) {
      inner[i] = apply_row(p2, digits.data() + static_cast<std::size_t>(i) * k2);
    }
    table[idx] = apply_row(p1, inner.data());
    for (int i = 0; i < kk; ++i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
  }
  return Operation{q, kk, std::move(table)};
}

bool OperationDistribution::has_exact_weights() const {
  return std::all_of(atoms.begin(), atoms.end(),
                     [](const OperationAtom& a) { return a.exact_weight.has_value(); });
}

Eigen::VectorXd OperationDistribution::weights() const {
  Eigen::VectorXd w(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) w[i] = atoms[i].weight;
  return w;
}

OperationDistribution make_distribution(std::vector<OperationAtom> atoms) {
  if (atoms.empty()) throw input_error("distribution with no atoms");
  const int q = atoms[0].op.q;
  const int k = atoms[0].op.k;
  double sum = 0.0;
  for (auto& a : atoms) {
    if (a.op.q != q || a.op.k != k)
      throw input_error("distribution atoms with mixed (q,k)");
    if (a.exact_weight) a.weight = rat_value(*a.exact_weight);
    if (!(a.weight > 0.0)) throw input_error("atom weight must be > 0");
    sum += a.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw input_error("atom weights sum to " + std::to_string(sum) +
                      ", expected 1 within 1e-12");
  return OperationDistribution{q, k, std::move(atoms)};
}

CheckReport is_transitive_symmetric(const Operation& p, int max_arity) {
  if (p.k > max_arity)
    throw cap_exceeded("is_transitive_symmetric: arity " + std::to_string(p.k) +
                       " exceeds cap " + std::to_string(max_arity));
  const int k = p.k, q = p.q;
  const std::int64_t size = pow_int(q, k);

  CheckReport report;
  report.permutations.assign(static_cast<std::size_t>(k) * k, {});

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> digits(k), permuted(k);
  do {
    // Is sigma an automorphism: p(x_{sigma(0)},...,x_{sigma(k-1)}) == p(x)?
    bool ok = true;
    for (std::int64_t idx = 0; idx < size && ok; ++idx) {
      std::int64_t rest = idx;
      for (int i = 0; i < k; ++i) {
        digits[i] = static_cast<int>(rest % q);
        rest /= q;
      }
      for (int i = 0; i < k; ++i) permuted[i] = digits[perm[i]];
      ok = apply_row(p, permuted.data()) == p.table[idx];
    }
    if (ok) {
      for (int i = 0; i < k; ++i) {
        auto& slot = report.permutations[static_cast<std::size_t>(i) * k + perm[i]];
        if (slot.empty()) slot = perm;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (report.permutations[static_cast<std::size_t>(i) * k + j].empty()) {
        report.pass = false;
        report.worst_violation = 1.0;
        report.witness = "no table-preserving permutation maps position " +
                         std::to_string(i) + " to " + std::to_string(j);
        report.permutations.clear();
        return report;
      }
    }
  }
  report.pass = true;
  return report;
}

CheckReport is_measure_preserving(const OperationDistribution& P,
                                  std::int64_t cap) {
  const int q = P.q, k = P.k;
  const std::int64_t size = pow_int(q, k);
  if (size > cap)
    throw cap_exceeded("is_measure_preserving: q^k exceeds cap");

  const bool exact = P.has_exact_weights();
  CheckReport report;
  report.pass = true;
  if (!exact) report.note = "real weights: tolerance 1e-12";

  std::vector<int> digits(k);
  std::vector<int> counts(q);
  std::vector<double> out_prob(q);
  std::vector<Rational> out_rat(q);
  for (std::int64_t idx = 0; idx < size; ++idx) {
    std::int64_t rest = idx;
    for (int i = 0; i < k; ++i) {
      digits[i] = static_cast<int>(rest % q);
      rest /= q;
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < k; ++i) counts[digits[i]]++;
    std::fill(out_prob.begin(), out_prob.end(), 0.0);
    std::fill(out_rat.begin(), out_rat.end(), Rational{0, 1});
    for (const auto& atom : P.atoms) {
      const int c = apply_row(atom.op, digits.data());
      out_prob[c] += atom.weight;
      if (exact) out_rat[c] = rat_add(out_rat[c], *atom.exact_weight);
    }
    for (int c = 0; c < q; ++c) {
      const double required = static_cast<double>(counts[c]) / k;
      const double violation = std::abs(out_prob[c] - required);
      report.worst_violation = std::max(report.worst_violation, violation);
      const bool bad = exact ? !rat_equal(out_rat[c], make_rational(counts[c], k))
                             : violation > 1e-12;
      if (bad && report.pass) {
        report.pass = false;
        std::ostringstream os;
        os << "at input " << row_to_string(digits.data(), k) << ", symbol " << c
           << ": output probability " << out_prob[c] << " != required "
           << required;
        report.witness = os.str();
      }
    }
  }
  return report;
}

CheckReport check_fractional_polymorphism(const OperationDistribution& P,
                                          const ValueOracle& oracle,
                                          CheckMode mode, int trials,
                                          std::uint64_t rng_seed,
                                          std::int64_t cap) {
  const auto& d = oracle.dims();
  if (P.q != d.q)
    throw input_error("polymorphism alphabet does not match oracle");
  const int k = P.k, n = d.n, q = d.q;
  const std::int64_t points = pow_int(q, n);
  const double tol = 1e-9 * oracle.inf_norm_bound();

  // Cache the full value table and digit arrays; the tuple scan then never
  // re-queries the oracle.
  Eigen::VectorXd values(points);
  std::vector<int> all_digits(static_cast<std::size_t>(points) * n);
  {
    Assignment x = Assignment::Zero(n);
    for (std::int64_t idx = 0; idx < points; ++idx) {
      values[idx] = oracle.eval_counted(x);
      for (int i = 0; i < n; ++i)
        all_digits[static_cast<std::size_t>(idx) * n + i] = x[i];
      for (int i = 0; i < n; ++i) {
        if (++x[i] < q) break;
        x[i] = 0;
      }
    }
  }

  CheckReport report;
  report.pass = true;
  report.worst_violation = -std::numeric_limits<double>::infinity();

  std::vector<std::int64_t> tuple(k);
  std::vector<int> row(k);
  std::vector<int> out_digits(n);

  auto check_tuple = [&](const std::vector<std::int64_t>& t) {
    double lhs = 0.0;
    for (int j = 0; j < k; ++j) lhs += values[t[j]];
    lhs /= k;
    double rhs = 0.0;
    for (const auto& atom : P.atoms) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j)
          row[j] = all_digits[static_cast<std::size_t>(t[j]) * n + i];
        out_digits[i] = apply_row(atom.op, row.data());
      }
      std::int64_t out_idx = 0;
      for (int i = n - 1; i >= 0; --i) out_idx = out_idx * q + out_digits[i];
      rhs += atom.weight * values[out_idx];
    }
    const double violation = rhs - lhs;
    if (violation > report.worst_violation) report.worst_violation = violation;
    if (violation > tol && report.pass) {
      report.pass = false;
      std::ostringstream os;
      os << "violated at tuple (";
      for (int j = 0; j < k; ++j) {
        os << (j ? ", " : "")
           << assignment_to_string(assignment_from_index(t[j], q, n));
      }
      os << "): E_P f(p(...)) = " << rhs << " > mean input value " << lhs;
      report.witness = os.str();
    }
  };

  if (mode == CheckMode::exhaustive) {
    std::int64_t total = 1;
    for (int j = 0; j < k; ++j) {
      if (total > cap / points + 1)
        throw cap_exceeded("check_fractional_polymorphism: q^(n*k) exceeds cap");
      total *= points;
    }
    if (total > cap)
      throw cap_exceeded("check_fractional_polymorphism: q^(n*k) = " +
                         std::to_string(total) + " exceeds cap " +
                         std::to_string(cap));
    std::fill(tuple.begin(), tuple.end(), 0);
    for (std::int64_t c = 0; c < total; ++c) {
      check_tuple(tuple);
      for (int j = 0; j < k; ++j) {
        if (++tuple[j] < points) break;
        tuple[j] = 0;
      }
    }
  } else {
    if (trials < 1) throw input_error("sampled mode requires trials >= 1");
    report.note = "sampled mode: not a proof";
    for (int trial = 0; trial < trials; ++trial) {
      Rng rng = child_rng(rng_seed, "fracpoly-trial", trial);
      for (int j = 0; j < k; ++j)
        tuple[j] = static_cast<std::int64_t>(rng.next_u64() %
                                             static_cast<std::uint64_t>(points));
      check_tuple(tuple);
    }
  }
  if (report.pass && !std::isfinite(report.worst_violation))
    report.worst_violation = 0.0;
  return report;
}

namespace {

Operation build_table(int q, int k, const std::function<int(const int*)>& fn) {
  const std::int64_t size = pow_int(q, k);
  Eigen::VectorXi table(size);
  std::vector<int> digits(k, 0);
  for (std::int64_t idx = 0; idx < size; ++idx) {
    table[idx] = fn(digits.data());
    for (int i = 0; i < k; ++i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
  }
  return make_operation(q, k, std::move(table));
}

}  // namespace

Operation op_min(int q, int k) {
  return build_table(q, k, [k](const int* r) {
    int m = r[0];
    for (int i = 1; i < k; ++i) m = std::min(m, r[i]);
    return m;
  });
}

Operation op_max(int q, int k) {
  return build_table(q, k, [k](const int* r) {
    int m = r[0];
    for (int i = 1; i < k; ++i) m = std::max(m, r[i]);
    return m;
  });
}

Operation op_median3(int q) {
  return build_table(q, 3, [](const int* r) {
    int a = r[0], b = r[1], c = r[2];
    return std::max(std::min(a, b), std::min(std::max(a, b), c));
  });
}

Operation op_majority3() {
  return build_table(2, 3, [](const int* r) { return (r[0] + r[1] + r[2] >= 2) ? 1 : 0; });
}

Operation op_minority3() {
  // Fixed on unanimous inputs, 1 - Majority elsewhere; equals 3-bit parity.
  return build_table(2, 3, [](const int* r) { return (r[0] + r[1] + r[2]) % 2; });
}

Operation op_or2() {
  return build_table(2, 2, [](const int* r) { return r[0] | r[1]; });
}

Operation op_and2() {
  return build_table(2, 2, [](const int* r) { return r[0] & r[1]; });
}

Operation op_dictator(int q, int k, int position) {
  if (position < 0 || position >= k)
    throw input_error("dictator position out of range");
  return build_table(q, k, [position](const int* r) { return r[position]; });
}

Operation op_identity(int q) {
  return build_table(q, 1, [](const int* r) { return r[0]; });
}

OperationDistribution standard_family(const std::string& name, int q) {
  auto atom = [](Operation op, long long num, long long den) {
    OperationAtom a;
    a.exact_weight = make_rational(num, den);
    a.weight = rat_value(*a.exact_weight);
    a.op = std::move(op);
    return a;
  };
  if (name == "min_max") {
    return make_distribution({atom(op_min(q, 2), 1, 2), atom(op_max(q, 2), 1, 2)});
  }
  if (name == "sorted3") {
    return make_distribution({atom(op_min(q, 3), 1, 3), atom(op_median3(q), 1, 3),
                              atom(op_max(q, 3), 1, 3)});
  }
  if (name == "maj_min") {
    if (q != 2) throw input_error("maj_min is defined for q = 2 only");
    return make_distribution({atom(op_majority3(), 2, 3), atom(op_minority3(), 1, 3)});
  }
  if (name == "or_and") {
    if (q != 2) throw input_error("or_and is defined for q = 2 only");
    return make_distribution({atom(op_or2(), 1, 2), atom(op_and2(), 1, 2)});
  }
  throw input_error("unknown standard family: " + name);
}

}  // namespace polymin
