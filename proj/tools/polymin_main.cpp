// polymin: verification, estimation, minimization, and decay experiments for
// value oracles with measure-preserving transitive-symmetric polymorphisms.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "polymin/convex_extension.hpp"
#include "polymin/correlation.hpp"
#include "polymin/core.hpp"
#include "polymin/dynamics.hpp"
#include "polymin/errors.hpp"
#include "polymin/function_library.hpp"
#include "polymin/io.hpp"
#include "polymin/minimizer.hpp"
#include "polymin/polymorphisms.hpp"

#define POLYMIN_VERSION "0.1.0"

namespace {

using json = nlohmann::json;
using namespace polymin;

constexpr int kExitOk = 0;
constexpr int kExitLogic = 1;   // failed check / logic error
constexpr int kExitInput = 2;   // malformed input
constexpr int kExitBudget = 3;  // cap or budget exceeded

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

/// Values from --config JSON fill in options not given on the command line.
void apply_config(CLI::App* cmd, const std::string& config_path) {
  const json cfg = io::load_json_file(config_path);
  if (!cfg.is_object()) throw input_error("config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt || opt->count() > 0) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) opt->add_result("true");
    } else if (value.is_string()) {
      opt->add_result(value.get<std::string>());
    } else {
      opt->add_result(value.dump());
    }
    // Parsing already ran; push the late result into the bound variable.
    opt->run_callback();
  }
}

struct CommonFlags {
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  int threads = 1;
};

void write_output(const std::string& out, const json& result) {
  if (out.empty()) {
    std::cout << result.dump(2) << "\n";
  } else {
    io::save_json_file(out, result);
  }
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const json& params, std::uint64_t seed,
                    const std::vector<std::string>& inputs, double wall,
                    long long queries) {
  if (out_path.empty()) return;
  io::RunManifest m;
  m.command = command;
  m.parameters = params;
  m.seed = seed;
  for (const auto& p : inputs) m.input_digests.emplace_back(p, io::file_digest(p));
  m.tool_version = POLYMIN_VERSION;
  m.wall_clock_seconds = wall;
  m.timestamp = iso_timestamp();
  m.query_count = queries;
  io::save_manifest(out_path + ".manifest", m);
}

/// Shared loader: a function table, a graph, or a generated family instance.
struct FunctionInputs {
  std::string function_file;
  std::string graph_file;
  std::string family;
  int n = 0;
  int q = 2;
  std::uint64_t gen_seed = 0;
  double edge_prob = 0.4;

  void attach(CLI::App* cmd) {
    cmd->add_option("--function", function_file,
                    "function-table JSON ({q, n, values})");
    cmd->add_option("--graph", graph_file, "cut-function graph file (u v w lines)");
    cmd->add_option(
        "--family", family,
        "generated instance family (edge_cut|modular|concave_of_sum|random_table)");
    cmd->add_option("--n", n, "coordinate count for --family");
    cmd->add_option("--q", q, "alphabet size for --family");
    cmd->add_option("--gen-seed", gen_seed, "seed for --family instances");
    cmd->add_option("--edge-prob", edge_prob, "edge probability for edge_cut");
  }

  std::vector<std::string> files() const {
    std::vector<std::string> v;
    if (!function_file.empty()) v.push_back(function_file);
    if (!graph_file.empty()) v.push_back(graph_file);
    return v;
  }

  ValueOracle load() const {
    if (!function_file.empty()) return io::load_function_table(function_file);
    if (!graph_file.empty()) {
      auto [n_vertices, edges] = io::load_graph(graph_file);
      return cut_function(n_vertices, edges);
    }
    if (!family.empty()) {
      if (n <= 0) throw input_error("--family requires --n");
      InstanceSpec spec{family, q, n, gen_seed, edge_prob};
      return random_instance(spec).oracle;
    }
    throw input_error("no function input: use --function, --graph, or --family");
  }
};

struct PolymorphismInput {
  std::string dist_file;
  std::string poly_name;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dist", dist_file, "operation-distribution JSON file");
    cmd->add_option("--poly", poly_name,
                    "standard family name (min_max|sorted3|maj_min|or_and)");
  }

  std::vector<std::string> files() const {
    return dist_file.empty() ? std::vector<std::string>{}
                             : std::vector<std::string>{dist_file};
  }

  OperationDistribution load(int q) const {
    if (!dist_file.empty()) return io::load_distribution(dist_file);
    if (!poly_name.empty()) return standard_family(poly_name, q);
    throw input_error("no polymorphism input: use --dist or --poly");
  }
};

json assignment_to_json(const Assignment& x) {
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& op_file, const PolymorphismInput& poly,
              const FunctionInputs& fn, bool measure_preserving, bool transitive,
              bool fractional, const std::string& mode, int trials,
              const CommonFlags& common) {
  Timer timer;
  json results = json::object();
  bool all_pass = true;

  std::optional<OperationDistribution> dist;
  if (!op_file.empty()) {
    const Operation op = io::load_operation(op_file);
    dist = make_distribution({OperationAtom{1.0, make_rational(1, 1), op}});
  } else {
    int q = fn.q;
    if (!fn.family.empty() || !fn.function_file.empty() || !fn.graph_file.empty())
      q = fn.load().dims().q;
    dist = poly.load(q);
  }

  if (measure_preserving) {
    const CheckReport r = is_measure_preserving(*dist);
    results["measure_preserving"] = io::check_report_to_json(r);
    all_pass = all_pass && r.pass;
  }
  if (transitive) {
    json atom_reports = json::array();
    for (const auto& atom : dist->atoms) {
      const CheckReport r = is_transitive_symmetric(atom.op);
      json rj = io::check_report_to_json(r);
      rj.erase("permutations");  // bulky; verdict and witness suffice here
      atom_reports.push_back(rj);
      all_pass = all_pass && r.pass;
    }
    results["transitive_symmetric"] = atom_reports;
  }
  if (fractional) {
    const ValueOracle oracle = fn.load();
    const CheckMode m =
        (mode == "sampled") ? CheckMode::sampled : CheckMode::exhaustive;
    const CheckReport r =
        check_fractional_polymorphism(*dist, oracle, m, trials, common.seed);
    results["fractional_polymorphism"] = io::check_report_to_json(r);
    all_pass = all_pass && r.pass;
  }

  results["pass"] = all_pass;
  write_output(common.out, results);
  write_manifest(common.out, "check", json{{"mode", mode}, {"trials", trials}},
                 common.seed, fn.files(), timer.seconds(), 0);
  return all_pass ? kExitOk : kExitLogic;
}

int cmd_estimate(const FunctionInputs& fn, const PolymorphismInput& poly,
                 const std::string& marginals_file, double eps, double delta,
                 int r_override, int m_override, bool override_checks,
                 const CommonFlags& common) {
  Timer timer;
  const ValueOracle oracle = fn.load();
  const auto& d = oracle.dims();
  const OperationDistribution P = poly.load(d.q);
  const MarginalProfile w = marginals_file.empty()
                                ? uniform_profile(d.q, d.n)
                                : io::load_marginals(marginals_file);

  EstimatorParams params =
      default_estimator_params(eps, d.q, d.n, delta, common.seed);
  if (r_override >= 0) params.r = r_override;
  if (m_override > 0) params.m = m_override;
  params.override_checks = override_checks;
  params.threads = common.threads;

  const Estimate est = estimate_convex_extension(oracle, P, w, params);

  const json pj{{"eps", params.eps}, {"b", params.b},         {"r", params.r},
                {"m", params.m},     {"delta", params.delta}, {"seed", params.seed},
                {"threads", params.threads}};
  json result{{"value", est.value},
              {"half_width", est.half_width},
              {"queries", est.queries_used},
              {"incumbent", assignment_to_json(est.incumbent)},
              {"incumbent_value", est.incumbent_value},
              {"params", pj}};
  if (est.override_used) result["override_checks"] = true;
  write_output(common.out, result);

  std::vector<std::string> inputs = fn.files();
  for (const auto& f : poly.files()) inputs.push_back(f);
  if (!marginals_file.empty()) inputs.push_back(marginals_file);
  write_manifest(common.out, "estimate", pj, common.seed, inputs, timer.seconds(),
                 oracle.query_count());
  return kExitOk;
}

int cmd_minimize(const FunctionInputs& fn, const PolymorphismInput& poly,
                 double eps, std::int64_t budget, const std::string& trace_file,
                 int walk_r, int samples_m, int iters, int restarts,
                 bool override_checks, const CommonFlags& common) {
  Timer timer;
  const ValueOracle oracle = fn.load();
  const auto& d = oracle.dims();
  const OperationDistribution P = poly.load(d.q);

  PipelineOptions opts;
  if (walk_r > 0) opts.walk_r = walk_r;
  if (samples_m > 0) opts.samples_m = samples_m;
  if (iters > 0) opts.descent_T = iters;
  if (restarts > 0) opts.restarts = restarts;
  opts.threads = common.threads;
  opts.override_checks = override_checks;
  opts.query_budget = budget;

  const MinimizeResult res = minimize_function(oracle, P, eps, common.seed, opts);

  if (!trace_file.empty())
    io::save_descent_trace_csv(trace_file, res.trajectory, res.incumbent_curve);

  const json pj{{"eps", eps},
                {"walk_r", opts.walk_r},
                {"samples_m", opts.samples_m},
                {"descent_T", opts.descent_T},
                {"restarts", opts.restarts},
                {"seed", common.seed},
                {"threads", common.threads},
                {"budget", budget}};
  json result{{"assignment", assignment_to_json(res.best_assignment)},
              {"value", res.best_value},
              {"queries", res.queries_used},
              {"budget_exhausted", res.budget_exhausted},
              {"final_marginals", io::marginals_to_json(res.final_marginals)},
              {"params", pj}};
  write_output(common.out, result);

  std::vector<std::string> inputs = fn.files();
  for (const auto& f : poly.files()) inputs.push_back(f);
  write_manifest(common.out, "minimize", pj, common.seed, inputs, timer.seconds(),
                 oracle.query_count());
  return kExitOk;
}

int cmd_decay(const PolymorphismInput& poly, const std::string& mu_file,
              double rho0, int steps, int q, int coord,
              const std::string& csv_file, const CommonFlags& common) {
  Timer timer;
  JointDistribution mu0 = [&]() {
    if (!mu_file.empty()) return io::load_joint(mu_file);
    // Binary symmetric pair: uniform marginals, Pr[X=Y] = (1+rho0)/2.
    if (q != 2)
      throw input_error("--rho0 start distribution requires q = 2; use --mu");
    if (!(rho0 >= 0.0 && rho0 <= 1.0))
      throw input_error("--rho0 must lie in [0,1]");
    const double same = (1.0 + rho0) / 4.0;
    const double diff = (1.0 - rho0) / 4.0;
    Eigen::VectorXd mass(4);
    mass << same, diff, diff, same;
    return make_joint(make_dims(2, 2), mass);
  }();

  const OperationDistribution P = poly.load(mu0.dims.q);
  const DecayTrace trace = decay_trace(P, mu0, steps, coord);

  if (!csv_file.empty()) io::save_decay_trace_csv(csv_file, trace);

  bool strictly_decreasing = true;
  bool any_bound_violated = false;
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    if (trace.steps[i].rho >= trace.steps[i - 1].rho && trace.steps[i - 1].rho > 0)
      strictly_decreasing = false;
    any_bound_violated = any_bound_violated || trace.steps[i].bound_violated;
  }
  const json pj{{"steps", steps},
                {"rho0", rho0},
                {"coord", trace.tracked_coordinate}};
  json result{{"rho_initial", trace.steps.front().rho},
              {"rho_final", trace.steps.back().rho},
              {"tv_final", trace.steps.back().tv},
              {"strictly_decreasing", strictly_decreasing},
              {"bound_violated", any_bound_violated},
              {"params", pj}};
  write_output(common.out, result);

  std::vector<std::string> inputs = poly.files();
  if (!mu_file.empty()) inputs.push_back(mu_file);
  write_manifest(common.out, "decay", pj, common.seed, inputs, timer.seconds(), 0);
  return any_bound_violated ? kExitLogic : kExitOk;
}

int cmd_gen(const std::string& family, int n, int q, double edge_prob,
            const std::string& out_base, const CommonFlags& common) {
  Timer timer;
  if (out_base.empty()) throw input_error("gen requires --out <basename>");
  InstanceSpec spec{family, q, n, common.seed, edge_prob};
  const Instance inst = random_instance(spec);

  json written = json::array();
  if (inst.family == "edge_cut") {
    const std::string path = out_base + ".graph";
    io::save_graph(path, n, inst.edges);
    written.push_back(path);
  } else {
    const std::string path = out_base + ".json";
    io::save_function_table(path, inst.oracle);
    written.push_back(path);
  }
  const std::string spec_path = out_base + ".spec.json";
  io::save_json_file(spec_path, io::instance_spec_to_json(spec));
  written.push_back(spec_path);

  json result{{"family", inst.family},
              {"polymorphism", inst.polymorphism},
              {"files", written}};
  write_output("", result);
  write_manifest(out_base, "gen", io::instance_spec_to_json(spec), common.seed,
                 {}, timer.seconds(), 0);
  return kExitOk;
}

int cmd_lp_oracle(const FunctionInputs& fn, const std::string& marginals_file,
                  const CommonFlags& common) {
  Timer timer;
  const ValueOracle oracle = fn.load();
  const auto& d = oracle.dims();
  const MarginalProfile w = marginals_file.empty()
                                ? uniform_profile(d.q, d.n)
                                : io::load_marginals(marginals_file);
  const double value = exact_convex_extension_lp(oracle, w);
  json result{{"value", value}, {"queries", oracle.query_count()}};
  write_output(common.out, result);
  std::vector<std::string> inputs = fn.files();
  if (!marginals_file.empty()) inputs.push_back(marginals_file);
  write_manifest(common.out, "lp-oracle", json::object(), common.seed, inputs,
                 timer.seconds(), oracle.query_count());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polymin " POLYMIN_VERSION
               " - value-oracle minimization with fractional polymorphisms"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "verify polymorphism structure");
  std::string check_op_file, check_mode = "exhaustive";
  bool flag_mp = false, flag_ts = false, flag_fp = false;
  int check_trials = 1000;
  FunctionInputs check_fn;
  PolymorphismInput check_poly;
  CommonFlags check_common;
  check->add_option("--op", check_op_file, "single-operation JSON file");
  check_poly.attach(check);
  check_fn.attach(check);
  check->add_flag("--measure-preserving", flag_mp,
                  "run the measure-preservation check");
  check->add_flag("--transitive", flag_ts, "run the transitive-symmetry check");
  check->add_flag("--fractional", flag_fp,
                  "run the fractional-polymorphism check against the function input");
  check->add_option("--mode", check_mode, "fractional check mode: exhaustive|sampled");
  check->add_option("--trials", check_trials, "sampled-mode trial count");
  check->add_option("--seed", check_common.seed, "seed for sampled mode");
  check->add_option("--out", check_common.out, "write report JSON here");
  check->add_option("--config", check_common.config, "JSON config (flags override)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "estimate the convex extension");
  FunctionInputs est_fn;
  PolymorphismInput est_poly;
  CommonFlags est_common;
  std::string est_marginals;
  double est_eps = 0.1, est_delta = 0.01;
  int est_r = -1, est_m = 0;
  bool est_override = false;
  est_fn.attach(estimate);
  est_poly.attach(estimate);
  estimate->add_option("--marginals", est_marginals,
                       "marginals JSON (rows of q probabilities); default uniform");
  estimate->add_option("--eps", est_eps, "target accuracy (fraction of ||f||_inf)");
  estimate->add_option("--delta", est_delta, "failure probability");
  estimate->add_option("--r", est_r, "walk length override");
  estimate->add_option("--m", est_m, "sample count override");
  estimate->add_flag("--override-checks", est_override,
                     "skip polymorphism verification (recorded in output)");
  estimate->add_option("--seed", est_common.seed, "random seed")->required();
  estimate->add_option("--threads", est_common.threads, "worker threads");
  estimate->add_option("--out", est_common.out, "write result JSON here");
  estimate->add_option("--config", est_common.config, "JSON config (flags override)");

  // minimize
  auto* minimize = app.add_subcommand("minimize", "minimize f end to end");
  FunctionInputs min_fn;
  PolymorphismInput min_poly;
  CommonFlags min_common;
  double min_eps = 0.1;
  std::int64_t min_budget = 0;
  std::string min_trace;
  int min_walk_r = 0, min_samples = 0, min_iters = 0, min_restarts = 0;
  bool min_override = false;
  min_fn.attach(minimize);
  min_poly.attach(minimize);
  minimize->add_option("--eps", min_eps, "target accuracy (fraction of ||f||_inf)");
  minimize->add_option("--budget", min_budget, "query budget (0 = unlimited)");
  minimize->add_option("--trace", min_trace, "write descent trace CSV here");
  minimize->add_option("--walk-r", min_walk_r, "walk length per estimator call");
  minimize->add_option("--samples", min_samples, "Monte-Carlo samples per call");
  minimize->add_option("--iters", min_iters, "descent iterations per restart");
  minimize->add_option("--restarts", min_restarts, "independent restarts");
  minimize->add_flag("--override-checks", min_override,
                     "skip polymorphism verification");
  minimize->add_option("--seed", min_common.seed, "random seed")->required();
  minimize->add_option("--threads", min_common.threads, "worker threads");
  minimize->add_option("--out", min_common.out, "write result JSON here");
  minimize->add_option("--config", min_common.config, "JSON config (flags override)");

  // decay
  auto* decay = app.add_subcommand("decay", "exact correlation-decay experiment");
  PolymorphismInput dec_poly;
  CommonFlags dec_common;
  std::string dec_mu, dec_csv;
  double dec_rho0 = 0.8;
  int dec_steps = 40, dec_q = 2, dec_coord = -1;
  dec_poly.attach(decay);
  decay->add_option("--mu", dec_mu, "initial joint JSON ({q, n, mass})");
  decay->add_option("--rho0", dec_rho0,
                    "initial correlation for the built-in binary pair");
  decay->add_option("--steps", dec_steps, "number of exact evolution steps");
  decay->add_option("--q", dec_q, "alphabet for the built-in pair");
  decay->add_option("--coord", dec_coord, "tracked coordinate (default last)");
  decay->add_option("--csv", dec_csv, "write trace CSV here");
  decay->add_option("--seed", dec_common.seed,
                    "seed (recorded; evolution is exact)");
  decay->add_option("--out", dec_common.out, "write summary JSON here");
  decay->add_option("--config", dec_common.config, "JSON config (flags override)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a benchmark instance");
  CommonFlags gen_common;
  std::string gen_family, gen_out;
  int gen_n = 6, gen_q = 2;
  double gen_edge_prob = 0.4;
  gen->add_option("--family", gen_family,
                  "edge_cut|modular|concave_of_sum|random_table")
      ->required();
  gen->add_option("--n", gen_n, "coordinate count");
  gen->add_option("--q", gen_q, "alphabet size");
  gen->add_option("--edge-prob", gen_edge_prob, "edge probability for edge_cut");
  gen->add_option("--seed", gen_common.seed, "random seed")->required();
  gen->add_option("--out", gen_out, "output basename")->required();
  gen->add_option("--config", gen_common.config, "JSON config (flags override)");

  // lp-oracle
  auto* lp = app.add_subcommand("lp-oracle", "exact convex extension (small LP)");
  FunctionInputs lp_fn;
  CommonFlags lp_common;
  std::string lp_marginals;
  lp_fn.attach(lp);
  lp->add_option("--marginals", lp_marginals, "marginals JSON; default uniform");
  lp->add_option("--out", lp_common.out, "write result JSON here");
  lp->add_option("--config", lp_common.config, "JSON config (flags override)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    std::string* config = nullptr;
    if (sub == check) config = &check_common.config;
    if (sub == estimate) config = &est_common.config;
    if (sub == minimize) config = &min_common.config;
    if (sub == decay) config = &dec_common.config;
    if (sub == gen) config = &gen_common.config;
    if (sub == lp) config = &lp_common.config;
    if (config && !config->empty()) apply_config(sub, *config);

    if (sub == check) {
      if (!flag_mp && !flag_ts && !flag_fp)
        throw input_error(
            "check: select at least one of --measure-preserving, --transitive, "
            "--fractional");
      return cmd_check(check_op_file, check_poly, check_fn, flag_mp, flag_ts,
                       flag_fp, check_mode, check_trials, check_common);
    }
    if (sub == estimate) {
      return cmd_estimate(est_fn, est_poly, est_marginals, est_eps, est_delta,
                          est_r, est_m, est_override, est_common);
    }
    if (sub == minimize) {
      return cmd_minimize(min_fn, min_poly, min_eps, min_budget, min_trace,
                          min_walk_r, min_samples, min_iters, min_restarts,
                          min_override, min_common);
    }
    if (sub == decay) {
      return cmd_decay(dec_poly, dec_mu, dec_rho0, dec_steps, dec_q, dec_coord,
                       dec_csv, dec_common);
    }
    if (sub == gen) {
      return cmd_gen(gen_family, gen_n, gen_q, gen_edge_prob, gen_out,
                     gen_common);
    }
    if (sub == lp) {
      return cmd_lp_oracle(lp_fn, lp_marginals, lp_common);
    }
    return kExitInput;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const cap_exceeded& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const check_failed& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitLogic;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLogic;
  }
}
