#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

#include "polymin/errors.hpp"

namespace polymin {

/// Alphabet size q >= 2 and coordinate count n >= 1. Points of [q]^n are
/// enumerated in mixed-radix order with coordinate 0 least significant; every
/// dense table in the project uses this one order.
struct ProblemDims {
  int q = 2;
  int n = 1;
};

ProblemDims make_dims(int q, int n);

/// A point of [q]^n; entry i is the symbol at coordinate i.
using Assignment = Eigen::VectorXi;

/// q^k as a 64-bit count; throws cap_exceeded past 2^62.
std::int64_t pow_int(int q, int k);

/// Canonical index of x in [q]^n (coordinate 0 least significant).
std::int64_t index_of(const Assignment& x, int q);

/// Inverse of index_of.
Assignment assignment_from_index(std::int64_t index, int q, int n);

/// Writes the digits of `index` into `out` (length n), avoiding allocation in
/// enumeration loops.
void decode_index(std::int64_t index, int q, int n, int* out);

/// Query-counted black-box access to f : [q]^n -> R with a declared bound on
/// ||f||_inf. Copies share the query counter. Evaluation is thread-safe when
/// the wrapped function is pure.
class ValueOracle {
 public:
  ValueOracle(ProblemDims dims, std::function<double(const Assignment&)> f,
              double inf_norm_bound);

  const ProblemDims& dims() const { return dims_; }
  double inf_norm_bound() const { return inf_norm_bound_; }
  long long query_count() const { return count_->load(); }

  /// Raw evaluation used by evaluate(); validates the contract and counts.
  double eval_counted(const Assignment& x) const;

 private:
  ProblemDims dims_;
  std::function<double(const Assignment&)> f_;
  double inf_norm_bound_;
  std::shared_ptr<std::atomic<long long>> count_;
};

/// Evaluates f(x), counting the query. Throws input_error on dimension
/// mismatch and oracle_contract_violation on non-finite or out-of-bound
/// values.
double evaluate(const ValueOracle& oracle, const Assignment& x);

struct MinResult {
  Assignment argmin;
  double value = 0.0;
};

/// Exhaustive scan of [q]^n; ties broken by smallest canonical index.
/// Throws cap_exceeded when q^n > cap.
MinResult brute_force_min(const ValueOracle& oracle,
                          std::int64_t cap = std::int64_t{1} << 20);

/// Oracle backed by a dense value table in canonical order; the declared
/// ||f||_inf bound is the exact max |value|.
ValueOracle table_oracle(ProblemDims dims, Eigen::VectorXd values);

}  // namespace polymin
