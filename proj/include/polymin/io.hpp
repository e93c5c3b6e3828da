#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "polymin/correlation.hpp"
#include "polymin/core.hpp"
#include "polymin/dynamics.hpp"
#include "polymin/function_library.hpp"
#include "polymin/polymorphisms.hpp"

namespace polymin::io {

using json = nlohmann::json;

// --- file formats -----------------------------------------------------------
// function table: {"q": int, "n": int, "values": [reals]} in canonical order
// graph:          text, one edge per line "u v weight", 0-indexed vertices
// operation:      {"q": int, "k": int, "table": [ints]}
// distribution:   {"q", "k", "atoms": [{"weight": real|{"num","den"}, "op": object|path}]}
// joint:          {"q", "n", "mass": [reals]}
// marginals:      [[q reals], ...] one row per coordinate

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

ValueOracle load_function_table(const std::string& path);
void save_function_table(const std::string& path, const ValueOracle& oracle);

std::pair<int, std::vector<WeightedEdge>> load_graph(const std::string& path);
void save_graph(const std::string& path, int n,
                const std::vector<WeightedEdge>& edges);

Operation operation_from_json(const json& j);
json operation_to_json(const Operation& p);
Operation load_operation(const std::string& path);

/// Atom "op" fields may be inline objects or paths relative to `base_dir`.
OperationDistribution distribution_from_json(const json& j,
                                             const std::string& base_dir);
json distribution_to_json(const OperationDistribution& P);
OperationDistribution load_distribution(const std::string& path);

JointDistribution joint_from_json(const json& j);
json joint_to_json(const JointDistribution& mu);
JointDistribution load_joint(const std::string& path);

MarginalProfile marginals_from_json(const json& j);
json marginals_to_json(const MarginalProfile& w);
MarginalProfile load_marginals(const std::string& path);

json instance_spec_to_json(const InstanceSpec& spec);
InstanceSpec instance_spec_from_json(const json& j);

json check_report_to_json(const CheckReport& r);

/// CSV with header "t,rho,tv,bound"; bound written as empty when NaN.
void save_decay_trace_csv(const std::string& path, const DecayTrace& trace);

/// CSV with header "iter,objective_estimate,incumbent_value".
void save_descent_trace_csv(
    const std::string& path,
    const std::vector<std::pair<int, double>>& objective,
    const std::vector<double>& incumbent);

/// CSV with header "t,value" for distributional-extension descent traces.
void save_value_trace_csv(const std::string& path,
                          const std::vector<std::pair<int, double>>& values);

/// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

/// Everything needed to reproduce a run bit-identically (given the same
/// build): command, resolved parameters, seed, input digests, tool version,
/// and query counts. Wall-clock time and the timestamp are isolated here so
/// result files stay byte-stable.
struct RunManifest {
  std::string command;
  json parameters;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> input_digests;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  std::string timestamp;
  long long query_count = 0;
};

json manifest_to_json(const RunManifest& m);
void save_manifest(const std::string& path, const RunManifest& m);

}  // namespace polymin::io
