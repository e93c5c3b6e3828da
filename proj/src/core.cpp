#include "polymin/core.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace polymin {

ProblemDims make_dims(int q, int n) {
  if (q < 2) throw input_error("alphabet size q must be >= 2, got " + std::to_string(q));
  if (n < 1) throw input_error("coordinate count n must be >= 1, got " + std::to_string(n));
  return ProblemDims{q, n};
}

std::int64_t pow_int(int q, int k) {
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) {
    if (r > (std::int64_t{1} << 62) / q)
      throw cap_exceeded("q^k overflows 64-bit table index");
    r *= q;
  }
  return r;
}

std::int64_t index_of(const Assignment& x, int q) {
  std::int64_t idx = 0;
  for (int i = static_cast<int>(x.size()) - 1; i >= 0; --i) {
    idx = idx * q + x[i];
  }
  return idx;
}

Assignment assignment_from_index(std::int64_t index, int q, int n) {
  Assignment x(n);
  decode_index(index, q, n, x.data());
  return x;
}

void decode_index(std::int64_t index, int q, int n, int* out) {
  for (int i = 0; i < n; ++i) {
    out[i] = static_cast<int>(index % q);
    index /= q;
  }
}

ValueOracle::ValueOracle(ProblemDims dims,
                         std::function<double(const Assignment&)> f,
                         double inf_norm_bound)
    : dims_(dims),
      f_(std::move(f)),
      inf_norm_bound_(inf_norm_bound),
      count_(std::make_shared<std::atomic<long long>>(0)) {
  if (!(inf_norm_bound >= 0.0) || !std::isfinite(inf_norm_bound))
    throw input_error("inf_norm_bound must be a finite nonnegative real");
}

double ValueOracle::eval_counted(const Assignment& x) const {
  count_->fetch_add(1, std::memory_order_relaxed);
  const double v = f_(x);
  if (!std::isfinite(v))
    throw oracle_contract_violation("oracle returned a non-finite value");
  // Tiny slack so a bound computed in a different summation order still passes.
  if (std::abs(v) > inf_norm_bound_ * (1.0 + 1e-12) + 1e-300)
    throw oracle_contract_violation(
        "oracle value " + std::to_string(v) + " exceeds declared ||f||_inf bound " +
        std::to_string(inf_norm_bound_));
  return v;
}

double evaluate(const ValueOracle& oracle, const Assignment& x) {
  const auto& d = oracle.dims();
  if (static_cast<int>(x.size()) != d.n)
    throw input_error("assignment length " + std::to_string(x.size()) +
                      " does not match n=" + std::to_string(d.n));
  for (int i = 0; i < d.n; ++i) {
    if (x[i] < 0 || x[i] >= d.q)
      throw input_error("assignment symbol out of [0,q) at coordinate " +
                        std::to_string(i));
  }
  return oracle.eval_counted(x);
}

MinResult brute_force_min(const ValueOracle& oracle, std::int64_t cap) {
  const auto& d = oracle.dims();
  const std::int64_t total = pow_int(d.q, d.n);
  if (total > cap)
    throw cap_exceeded("brute_force_min: q^n = " + std::to_string(total) +
                       " exceeds cap " + std::to_string(cap));
  MinResult best;
  best.value = std::numeric_limits<double>::infinity();
  Assignment x = Assignment::Zero(d.n);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const double v = oracle.eval_counted(x);
    if (v < best.value) {
      best.value = v;
      best.argmin = x;
    }
    // odometer increment in canonical order
    for (int i = 0; i < d.n; ++i) {
      if (++x[i] < d.q) break;
      x[i] = 0;
    }
  }
  return best;
}

ValueOracle table_oracle(ProblemDims dims, Eigen::VectorXd values) {
  const std::int64_t total = pow_int(dims.q, dims.n);
  if (values.size() != total)
    throw input_error("table length " + std::to_string(values.size()) +
                      " does not match q^n = " + std::to_string(total));
  for (std::int64_t i = 0; i < total; ++i) {
    if (!std::isfinite(values[i]))
      throw input_error("table contains a non-finite value");
  }
  const double bound = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  auto table = std::make_shared<Eigen::VectorXd>(std::move(values));
  const int q = dims.q;
  return ValueOracle(
      dims,
      [table, q](const Assignment& x) { return (*table)[index_of(x, q)]; },
      bound);
}

}  // namespace polymin
