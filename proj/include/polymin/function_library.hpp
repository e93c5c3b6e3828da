#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "polymin/core.hpp"

namespace polymin {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

/// f(x) = sum of w over edges with x_u != x_v (q = 2). ||f||_inf = total
/// weight. Submodular; admits min_max.
ValueOracle cut_function(int n, const std::vector<WeightedEdge>& edges);

/// f(x) = sum_i costs(i, x_i). ||f||_inf bound: sum_i max_a |costs(i,a)|.
/// Admits every measure-preserving polymorphism with equality.
ValueOracle modular_function(const Eigen::MatrixXd& costs);

/// f(x) = g(sum_i x_i) with g a concave table on 0..n(q-1) (second
/// differences <= 0, validated to 1e-12). Admits min_max on [q].
ValueOracle concave_of_sum(int q, int n, const Eigen::VectorXd& g);

/// Seeded instance description; `family` is one of edge_cut, modular,
/// concave_of_sum, random_table.
struct InstanceSpec {
  std::string family;
  int q = 2;
  int n = 2;
  std::uint64_t seed = 0;
  double edge_prob = 0.4;  // edge_cut only
};

/// A generated oracle plus the data needed to serialize it and the name of
/// the polymorphism family it is known to admit (empty for random_table).
struct Instance {
  ValueOracle oracle;
  std::string family;
  std::string polymorphism;            // standard_family name, or empty
  std::vector<WeightedEdge> edges;     // edge_cut
  Eigen::MatrixXd costs;               // modular (n x q)
  Eigen::VectorXd concave_table;       // concave_of_sum
  Eigen::VectorXd values;              // random_table (canonical order)
};

/// Reproducible instance from a seed. random_table instances carry no
/// polymorphism guarantee and exist for negative tests.
Instance random_instance(const InstanceSpec& spec);

}  // namespace polymin
