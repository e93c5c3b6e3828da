#include "polymin/function_library.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "polymin/rng.hpp"

namespace polymin {

ValueOracle cut_function(int n, const std::vector<WeightedEdge>& edges) {
  double total = 0.0;
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw input_error("cut_function: edge endpoint out of range");
    if (!(e.w >= 0.0) || !std::isfinite(e.w))
      throw input_error("cut_function: negative or non-finite edge weight");
    total += e.w;
  }
  auto shared = std::make_shared<std::vector<WeightedEdge>>(edges);
  return ValueOracle(
      make_dims(2, n),
      [shared](const Assignment& x) {
        double cut = 0.0;
        for (const auto& e : *shared) {
          if (x[e.u] != x[e.v]) cut += e.w;
        }
        return cut;
      },
      total);
}

ValueOracle modular_function(const Eigen::MatrixXd& costs) {
  const int n = static_cast<int>(costs.rows());
  const int q = static_cast<int>(costs.cols());
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < q; ++a) {
      if (!std::isfinite(costs(i, a)))
        throw input_error("modular_function: non-finite cost entry");
    }
  }
  const double bound = costs.cwiseAbs().rowwise().maxCoeff().sum();
  auto shared = std::make_shared<Eigen::MatrixXd>(costs);
  return ValueOracle(
      make_dims(q, n),
      [shared](const Assignment& x) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) v += (*shared)(i, x[i]);
        return v;
      },
      bound);
}

ValueOracle concave_of_sum(int q, int n, const Eigen::VectorXd& g) {
  const int smax = n * (q - 1);
  if (g.size() != smax + 1)
    throw input_error("concave_of_sum: table must cover sums 0..n(q-1)");
  for (int s = 0; s + 2 <= smax; ++s) {
    const double second = g[s + 2] - 2.0 * g[s + 1] + g[s];
    if (second > 1e-12)
      throw input_error("concave_of_sum: second difference " +
                        std::to_string(second) + " > 0 at s=" + std::to_string(s));
  }
  const double bound = g.cwiseAbs().maxCoeff();
  auto shared = std::make_shared<Eigen::VectorXd>(g);
  return ValueOracle(
      make_dims(q, n),
      [shared](const Assignment& x) { return (*shared)[x.sum()]; }, bound);
}

Instance random_instance(const InstanceSpec& spec) {
  Rng rng = child_rng(spec.seed, "instance-" + spec.family, 0);
  if (spec.family == "edge_cut") {
    if (spec.q != 2) throw input_error("edge_cut requires q = 2");
    std::vector<WeightedEdge> edges;
    for (int u = 0; u < spec.n; ++u) {
      for (int v = u + 1; v < spec.n; ++v) {
        if (rng.uniform() < spec.edge_prob)
          edges.push_back({u, v, 0.1 + 0.9 * rng.uniform()});
      }
    }
    // A graph with no edges makes a degenerate benchmark; wire a fallback edge.
    if (edges.empty() && spec.n >= 2) edges.push_back({0, 1, 1.0});
    Instance inst{cut_function(spec.n, edges), spec.family, "min_max", edges,
                  {}, {}, {}};
    return inst;
  }
  if (spec.family == "modular") {
    Eigen::MatrixXd costs(spec.n, spec.q);
    for (int i = 0; i < spec.n; ++i) {
      for (int a = 0; a < spec.q; ++a) costs(i, a) = 2.0 * rng.uniform() - 1.0;
    }
    return Instance{modular_function(costs), spec.family, "min_max",
                    {},      costs,          {},          {}};
  }
  if (spec.family == "concave_of_sum") {
    const int smax = spec.n * (spec.q - 1);
    // Concave by construction: nonincreasing increments.
    Eigen::VectorXd increments(smax);
    for (int s = 0; s < smax; ++s) increments[s] = 2.0 * rng.uniform() - 1.0;
    std::sort(increments.data(), increments.data() + smax,
              std::greater<double>());
    Eigen::VectorXd g(smax + 1);
    g[0] = 2.0 * rng.uniform() - 1.0;
    for (int s = 0; s < smax; ++s) g[s + 1] = g[s] + increments[s];
    return Instance{concave_of_sum(spec.q, spec.n, g),
                    spec.family,
                    "min_max",
                    {},
                    {},
                    g,
                    {}};
  }
  if (spec.family == "random_table") {
    const std::int64_t points = pow_int(spec.q, spec.n);
    if (points > (std::int64_t{1} << 22))
      throw cap_exceeded("random_table: q^n exceeds cap");
    Eigen::VectorXd values(points);
    for (std::int64_t i = 0; i < points; ++i) values[i] = 2.0 * rng.uniform() - 1.0;
    return Instance{table_oracle(make_dims(spec.q, spec.n), values),
                    spec.family,
                    "",
                    {},
                    {},
                    {},
                    values};
  }
  throw input_error("unknown instance family: " + spec.family);
}

}  // namespace polymin
