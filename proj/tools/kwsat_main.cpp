// Command line front end: kernelize, solve, lift, generate, verify and
// check-free over the extended DIMACS format documented in the README.
//
// Exit codes: 0 success, 1 failed checks or internal errors, 2 malformed
// input, 3 parameters outside their domain (eps in particular), 4 exhausted
// work budgets.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kwsat/formula.hpp"
#include "kwsat/generate.hpp"
#include "kwsat/json_io.hpp"
#include "kwsat/oracle.hpp"
#include "kwsat/pipeline.hpp"
#include "kwsat/rational.hpp"
#include "kwsat/verify.hpp"

namespace {

using namespace kwsat;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

// solution files: whitespace-separated 1-based variable ids, 'c' comments
Solution read_solution_file(const std::string& path, VarId n_vars) {
  std::istringstream in(slurp(path));
  std::string line;
  std::vector<VarId> vars;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (ls >> tok && tok == "c") continue;
    std::istringstream again(line);
    long long id;
    while (again >> id) {
      if (id < 1 || id > static_cast<long long>(n_vars))
        throw parse_error(path + ":" + std::to_string(lineno) +
                          ": variable id " + std::to_string(id) +
                          " outside 1.." + std::to_string(n_vars));
      vars.push_back(static_cast<VarId>(id - 1));
    }
    if (!again.eof())
      throw parse_error(path + ":" + std::to_string(lineno) + ": bad token");
  }
  return make_solution(std::move(vars));
}

std::string show_solution(const Solution& y) {
  std::string s;
  for (std::size_t i = 0; i < y.true_vars.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(y.true_vars[i] + 1);
  }
  return s;
}

json solution_to_json(const Solution& y) {
  json arr = json::array();
  for (VarId v : y.true_vars) arr.push_back(v + 1);
  return arr;
}

struct CommonOpts {
  std::string input;
  Count k = 1;
  std::string eps = "1/8";
  unsigned a = 2, b = 2;
  std::string oracle = "best-of";
  Count budget = default_enum_budget;
  bool as_json = false;
};

PipelineParams params_of(const CommonOpts& o) {
  PipelineParams p;
  p.k = o.k;
  p.eps = parse_rational(o.eps);
  p.a = o.a;
  p.b = o.b;
  validate_params(p);
  return p;
}

int cmd_kernelize(const CommonOpts& o, const std::string& out_path,
                  const std::string& report_path) {
  const Formula phi = parse_formula(slurp(o.input));
  const PipelineParams p = params_of(o);
  const OracleKind oracle = oracle_from_string(o.oracle);

  const auto t0 = std::chrono::steady_clock::now();
  const KernelRun run = run_kernel_stages(phi, p, oracle, o.budget);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();

  const std::string kernel_path =
      out_path.empty() ? o.input + ".kernel" : out_path;
  spit(kernel_path, serialize_formula(run.phi[4]));
  const json report = run_report_to_json(run, p, oracle, ms);
  if (!report_path.empty()) spit(report_path, report.dump(2) + "\n");

  if (o.as_json) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "input:  " << phi.n_vars << " vars, "
              << distinct_clause_count(phi) << " distinct clauses, mass "
              << clause_mass(phi) << '\n'
              << "kernel: " << occurring_vars(run.phi[4]).size()
              << " occurring vars, " << distinct_clause_count(run.phi[4])
              << " distinct clauses, mass " << clause_mass(run.phi[4]) << '\n'
              << "stage2 case " << to_string(run.trace.stage2.kind)
              << ", stage3 " << (run.trace.stage3.applied ? "applied" : "skipped")
              << '\n'
              << "kernel written to " << kernel_path << '\n';
    if (!report_path.empty())
      std::cout << "report written to " << report_path << '\n';
  }
  return 0;
}

int cmd_solve(const CommonOpts& o) {
  const Formula phi = parse_formula(slurp(o.input));
  const OracleKind oracle = oracle_from_string(o.oracle);
  const auto [y, value] = approx_solve(phi, o.k, oracle, o.budget);
  if (o.as_json) {
    std::cout << json{{"solution", solution_to_json(y)}, {"value", value}}.dump()
              << '\n';
  } else {
    std::cout << "solution: " << show_solution(y) << '\n'
              << "value: " << value << '\n';
  }
  return 0;
}

int cmd_lift(const CommonOpts& o, const std::string& solution_path,
             const std::string& trace_path) {
  const Formula phi = parse_formula(slurp(o.input));
  const Solution y_kernel = read_solution_file(solution_path, phi.n_vars);
  const OracleKind oracle = oracle_from_string(o.oracle);
  if (!trace_path.empty()) {
    // the trace is advisory here: parse it strictly so corrupt files fail fast
    (void)trace_from_json(json::parse(slurp(trace_path), nullptr, true));
  }
  const Solution lifted = lift_solution(phi, o.k, y_kernel, oracle, o.budget);
  const Count value = val(phi, lifted);
  if (o.as_json) {
    std::cout << json{{"solution", solution_to_json(lifted)}, {"value", value}}
                     .dump()
              << '\n';
  } else {
    std::cout << "solution: " << show_solution(lifted) << '\n'
              << "value: " << value << '\n';
  }
  return 0;
}

int cmd_generate(const GenSpec& spec, Count attempts, Count budget,
                 const std::string& out_path) {
  const Formula phi = generate_instance(spec, attempts, budget);
  std::ostringstream text;
  text << "c seed " << spec.seed << ", K_{" << spec.a << "," << spec.b
       << "}-free certified\n"
       << serialize_formula(phi);
  if (out_path.empty() || out_path == "-")
    std::cout << text.str();
  else
    spit(out_path, text.str());
  return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& trace_path) {
  const Formula phi = parse_formula(slurp(o.input));
  const PipelineParams p = params_of(o);
  VerifyOptions vo;
  vo.oracle = oracle_from_string(o.oracle);
  vo.budget = o.budget;
  vo.free_budget = o.budget;
  KernelTrace reference;
  if (!trace_path.empty()) {
    reference = trace_from_json(json::parse(slurp(trace_path), nullptr, true));
    vo.reference_trace = &reference;
  }
  const auto results = verify_instance(phi, p, vo);
  bool failed = false;
  if (o.as_json) {
    json arr = json::array();
    for (const auto& r : results)
      arr.push_back({{"name", r.name},
                     {"status", to_string(r.status)},
                     {"detail", r.detail}});
    std::cout << arr.dump(2) << '\n';
  } else {
    for (const auto& r : results)
      std::cout << to_string(r.status) << ' ' << r.name
                << (r.detail.empty() ? "" : ": " + r.detail) << '\n';
  }
  for (const auto& r : results) failed |= r.status == CheckStatus::fail;
  return failed ? 1 : 0;
}

int cmd_check_free(const std::string& input, unsigned a, unsigned b,
                   Count budget) {
  const Formula phi = parse_formula(slurp(input));
  const bool free = is_kab_free(incidence_graph(phi), a, b, budget);
  std::cout << "K_{" << a << "," << b << "}-free: " << (free ? "yes" : "no")
            << '\n';
  return free ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate kernelization for K_{a,b}-free Max k-Weight SAT"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string out_path, report_path, solution_path, trace_path;

  auto add_common = [&](CLI::App* cmd, bool needs_eps, bool needs_ab) {
    cmd->add_option("--input", o.input, "instance file")->required();
    cmd->add_option("--k", o.k, "solution size budget")->required();
    if (needs_eps) cmd->add_option("--eps", o.eps, "accuracy, p/q or decimal");
    if (needs_ab) {
      cmd->add_option("--a", o.a, "forbidden pattern, variable side");
      cmd->add_option("--b", o.b, "forbidden pattern, clause side");
    }
    cmd->add_option("--oracle", o.oracle, "exact | greedy | best-of");
    cmd->add_option("--budget", o.budget, "enumeration work budget");
    cmd->add_flag("--json", o.as_json, "machine-readable output");
  };

  CLI::App* kernelize = app.add_subcommand("kernelize", "shrink an instance");
  add_common(kernelize, true, true);
  kernelize->add_option("--out", out_path, "kernel file (default: <input>.kernel)");
  kernelize->add_option("--report", report_path, "JSON run report file");

  CLI::App* solve = app.add_subcommand("solve", "run an oracle on an instance");
  add_common(solve, false, false);

  CLI::App* lift = app.add_subcommand("lift", "translate a kernel solution back");
  add_common(lift, false, false);
  lift->add_option("--solution", solution_path, "kernel solution file")->required();
  lift->add_option("--trace", trace_path, "kernel trace JSON (validated)");

  GenSpec gen;
  Count attempts = 1000;
  std::string neg_prob = "1/4";
  CLI::App* generate = app.add_subcommand("generate", "sample a free instance");
  generate->add_option("--n", gen.n_vars, "variables")->required();
  generate->add_option("--m", gen.n_clauses, "clause draws")->required();
  generate->add_option("--a", gen.a, "forbidden pattern, variable side");
  generate->add_option("--b", gen.b, "forbidden pattern, clause side");
  generate->add_option("--max-width", gen.max_width, "max literals per clause");
  generate->add_option("--max-mult", gen.max_mult, "max multiplicity per draw");
  generate->add_option("--neg-prob", neg_prob, "negation probability, p/q");
  generate->add_option("--seed", gen.seed, "rng seed")->required();
  generate->add_option("--attempts", attempts, "rejection sampling attempts");
  Count gen_budget = default_enum_budget;
  generate->add_option("--budget", gen_budget, "freeness check budget");
  std::string gen_out;
  generate->add_option("--out", gen_out, "output file, '-' for stdout");

  CLI::App* verify = app.add_subcommand("verify", "check the stage guarantees");
  add_common(verify, true, true);
  verify->add_option("--trace", trace_path, "compare against this trace JSON");

  std::string cf_input;
  unsigned cf_a = 2, cf_b = 2;
  Count cf_budget = default_enum_budget;
  CLI::App* check_free = app.add_subcommand("check-free", "test K_{a,b}-freeness");
  check_free->add_option("--input", cf_input, "instance file")->required();
  check_free->add_option("--a", cf_a, "pattern, variable side");
  check_free->add_option("--b", cf_b, "pattern, clause side");
  check_free->add_option("--budget", cf_budget, "subset enumeration budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(kernelize)) return cmd_kernelize(o, out_path, report_path);
    if (app.got_subcommand(solve)) return cmd_solve(o);
    if (app.got_subcommand(lift)) {
      // lifting defaults to the exact oracle, matching the scheme's contract
      if (lift->get_option("--oracle")->count() == 0) o.oracle = "exact";
      return cmd_lift(o, solution_path, trace_path);
    }
    if (app.got_subcommand(generate)) {
      gen.neg_prob = parse_rational(neg_prob);
      return cmd_generate(gen, attempts, gen_budget, gen_out);
    }
    if (app.got_subcommand(verify)) return cmd_verify(o, trace_path);
    if (app.got_subcommand(check_free))
      return cmd_check_free(cf_input, cf_a, cf_b, cf_budget);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const param_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const budget_exceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
