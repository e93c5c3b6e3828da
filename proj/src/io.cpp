#include "polymin/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace polymin::io {

namespace fs = std::filesystem;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw input_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

namespace {

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw input_error(std::string("missing or non-numeric field \"") + key + "\"");
  return j[key].get<double>();
}

int require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw input_error(std::string("missing or non-integer field \"") + key + "\"");
  return j[key].get<int>();
}

}  // namespace

ValueOracle load_function_table(const std::string& path) {
  const json j = load_json_file(path);
  const int q = require_int(j, "q");
  const int n = require_int(j, "n");
  if (!j.contains("values") || !j["values"].is_array())
    throw input_error("function table needs a \"values\" array");
  const auto& vals = j["values"];
  Eigen::VectorXd values(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!vals[i].is_number()) throw input_error("non-numeric table value");
    values[static_cast<Eigen::Index>(i)] = vals[i].get<double>();
  }
  return table_oracle(make_dims(q, n), std::move(values));
}

void save_function_table(const std::string& path, const ValueOracle& oracle) {
  const auto& d = oracle.dims();
  const std::int64_t points = pow_int(d.q, d.n);
  json values = json::array();
  Assignment x = Assignment::Zero(d.n);
  for (std::int64_t idx = 0; idx < points; ++idx) {
    values.push_back(oracle.eval_counted(x));
    for (int i = 0; i < d.n; ++i) {
      if (++x[i] < d.q) break;
      x[i] = 0;
    }
  }
  save_json_file(path, json{{"q", d.q}, {"n", d.n}, {"values", values}});
}

std::pair<int, std::vector<WeightedEdge>> load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open graph file: " + path);
  std::vector<WeightedEdge> edges;
  int max_vertex = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    WeightedEdge e;
    if (!(ls >> e.u >> e.v >> e.w))
      throw input_error("malformed graph line " + std::to_string(lineno) +
                        " in " + path);
    if (e.u < 0 || e.v < 0)
      throw input_error("negative vertex id on line " + std::to_string(lineno));
    if (e.w < 0.0)
      throw input_error("negative edge weight on line " + std::to_string(lineno));
    max_vertex = std::max({max_vertex, e.u, e.v});
    edges.push_back(e);
  }
  if (edges.empty()) throw input_error("graph file has no edges: " + path);
  return {max_vertex + 1, edges};
}

void save_graph(const std::string& path, int n,
                const std::vector<WeightedEdge>& edges) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write graph file: " + path);
  out << "# " << n << " vertices, " << edges.size() << " edges\n";
  out.precision(17);
  for (const auto& e : edges) out << e.u << " " << e.v << " " << e.w << "\n";
}

Operation operation_from_json(const json& j) {
  const int q = require_int(j, "q");
  const int k = require_int(j, "k");
  if (!j.contains("table") || !j["table"].is_array())
    throw input_error("operation needs a \"table\" array");
  const auto& tab = j["table"];
  Eigen::VectorXi table(tab.size());
  for (std::size_t i = 0; i < tab.size(); ++i) {
    if (!tab[i].is_number_integer())
      throw input_error("non-integer operation table entry");
    table[static_cast<Eigen::Index>(i)] = tab[i].get<int>();
  }
  return make_operation(q, k, std::move(table));
}

json operation_to_json(const Operation& p) {
  json table = json::array();
  for (Eigen::Index i = 0; i < p.table.size(); ++i) table.push_back(p.table[i]);
  return json{{"q", p.q}, {"k", p.k}, {"table", table}};
}

Operation load_operation(const std::string& path) {
  return operation_from_json(load_json_file(path));
}

OperationDistribution distribution_from_json(const json& j,
                                             const std::string& base_dir) {
  const int q = require_int(j, "q");
  const int k = require_int(j, "k");
  if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
    throw input_error("distribution needs a nonempty \"atoms\" array");
  std::vector<OperationAtom> atoms;
  for (const auto& aj : j["atoms"]) {
    OperationAtom atom;
    if (!aj.contains("weight")) throw input_error("atom without weight");
    const auto& wj = aj["weight"];
    if (wj.is_object()) {
      atom.exact_weight =
          make_rational(require_int(wj, "num"), require_int(wj, "den"));
      atom.weight = rat_value(*atom.exact_weight);
    } else if (wj.is_number()) {
      atom.weight = wj.get<double>();
    } else {
      throw input_error("atom weight must be a number or {num, den}");
    }
    if (!aj.contains("op")) throw input_error("atom without op");
    if (aj["op"].is_string()) {
      const fs::path p = fs::path(base_dir) / aj["op"].get<std::string>();
      atom.op = load_operation(p.string());
    } else {
      atom.op = operation_from_json(aj["op"]);
    }
    if (atom.op.q != q || atom.op.k != k)
      throw input_error("atom operation (q,k) does not match distribution");
    atoms.push_back(std::move(atom));
  }
  return make_distribution(std::move(atoms));
}

json distribution_to_json(const OperationDistribution& P) {
  json atoms = json::array();
  for (const auto& a : P.atoms) {
    json weight;
    if (a.exact_weight) {
      weight = json{{"num", a.exact_weight->num}, {"den", a.exact_weight->den}};
    } else {
      weight = a.weight;
    }
    atoms.push_back(json{{"weight", weight}, {"op", operation_to_json(a.op)}});
  }
  return json{{"q", P.q}, {"k", P.k}, {"atoms", atoms}};
}

OperationDistribution load_distribution(const std::string& path) {
  return distribution_from_json(load_json_file(path),
                                fs::path(path).parent_path().string());
}

JointDistribution joint_from_json(const json& j) {
  const int q = require_int(j, "q");
  const int n = require_int(j, "n");
  if (!j.contains("mass") || !j["mass"].is_array())
    throw input_error("joint needs a \"mass\" array");
  const auto& m = j["mass"];
  Eigen::VectorXd mass(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i].is_number()) throw input_error("non-numeric joint mass entry");
    mass[static_cast<Eigen::Index>(i)] = m[i].get<double>();
  }
  return make_joint(make_dims(q, n), std::move(mass));
}

json joint_to_json(const JointDistribution& mu) {
  json mass = json::array();
  for (Eigen::Index i = 0; i < mu.mass.size(); ++i) mass.push_back(mu.mass[i]);
  return json{{"q", mu.dims.q}, {"n", mu.dims.n}, {"mass", mass}};
}

JointDistribution load_joint(const std::string& path) {
  return joint_from_json(load_json_file(path));
}

MarginalProfile marginals_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw input_error("marginals file must be a nonempty array of rows");
  std::vector<SimplexPoint> coords;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() < 2)
      throw input_error("marginal row must be an array of >= 2 probabilities");
    Eigen::VectorXd probs(row.size());
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (!row[a].is_number()) throw input_error("non-numeric marginal entry");
      probs[static_cast<Eigen::Index>(a)] = row[a].get<double>();
    }
    coords.push_back(make_simplex_point(std::move(probs)));
  }
  return make_profile(std::move(coords));
}

json marginals_to_json(const MarginalProfile& w) {
  json rows = json::array();
  for (const auto& c : w.coords) {
    json row = json::array();
    for (Eigen::Index a = 0; a < c.probs.size(); ++a) row.push_back(c.probs[a]);
    rows.push_back(row);
  }
  return rows;
}

MarginalProfile load_marginals(const std::string& path) {
  return marginals_from_json(load_json_file(path));
}

json instance_spec_to_json(const InstanceSpec& spec) {
  return json{{"family", spec.family}, {"q", spec.q},         {"n", spec.n},
              {"seed", spec.seed},     {"edge_prob", spec.edge_prob}};
}

InstanceSpec instance_spec_from_json(const json& j) {
  InstanceSpec spec;
  if (!j.contains("family") || !j["family"].is_string())
    throw input_error("instance spec needs a \"family\" string");
  spec.family = j["family"].get<std::string>();
  spec.q = require_int(j, "q");
  spec.n = require_int(j, "n");
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("edge_prob")) spec.edge_prob = require_number(j, "edge_prob");
  return spec;
}

json check_report_to_json(const CheckReport& r) {
  json j{{"pass", r.pass},
         {"worst_violation", r.worst_violation},
         {"witness", r.witness}};
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.permutations.empty()) j["permutations"] = r.permutations;
  return j;
}

void save_decay_trace_csv(const std::string& path, const DecayTrace& trace) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write file: " + path);
  out.precision(17);
  out << "t,rho,tv,bound\n";
  for (const auto& s : trace.steps) {
    out << s.t << "," << s.rho << "," << s.tv << ",";
    if (std::isfinite(s.bound)) out << s.bound;
    out << "\n";
  }
}

void save_descent_trace_csv(
    const std::string& path,
    const std::vector<std::pair<int, double>>& objective,
    const std::vector<double>& incumbent) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write file: " + path);
  out.precision(17);
  out << "iter,objective_estimate,incumbent_value\n";
  for (std::size_t i = 0; i < objective.size(); ++i) {
    out << objective[i].first << "," << objective[i].second << ",";
    if (i < incumbent.size()) out << incumbent[i];
    out << "\n";
  }
}

void save_value_trace_csv(const std::string& path,
                          const std::vector<std::pair<int, double>>& values) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write file: " + path);
  out.precision(17);
  out << "t,value\n";
  for (const auto& [t, v] : values) out << t << "," << v << "\n";
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open file for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

json manifest_to_json(const RunManifest& m) {
  json digests = json::object();
  for (const auto& [path, digest] : m.input_digests) digests[path] = digest;
  return json{{"command", m.command},
              {"parameters", m.parameters},
              {"seed", m.seed},
              {"input_digests", digests},
              {"tool_version", m.tool_version},
              {"wall_clock_seconds", m.wall_clock_seconds},
              {"timestamp", m.timestamp},
              {"query_count", m.query_count}};
}

void save_manifest(const std::string& path, const RunManifest& m) {
  save_json_file(path, manifest_to_json(m));
}

}  // namespace polymin::io
