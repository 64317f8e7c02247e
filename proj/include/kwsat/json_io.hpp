#pragma once

// JSON views of kernel traces and run reports.  Field names are stable;
// rationals are serialized as "p/q" strings and unbounded integers as
// decimal strings, so nothing is ever rounded.  Variable ids are 1-based in
// JSON, matching the formula text format.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kwsat/pipeline.hpp"
#include "kwsat/rational.hpp"

namespace kwsat {

using nlohmann::json;

namespace detail {

inline json vars_to_json(const std::vector<VarId>& vs) {
  json arr = json::array();
  for (VarId v : vs) arr.push_back(v + 1);
  return arr;
}

inline std::vector<VarId> vars_from_json(const json& arr) {
  if (!arr.is_array()) throw parse_error("expected an array of variable ids");
  std::vector<VarId> out;
  for (const auto& e : arr) {
    if (!e.is_number_unsigned() || e.get<std::uint64_t>() == 0)
      throw parse_error("variable ids must be positive integers");
    out.push_back(static_cast<VarId>(e.get<std::uint64_t>() - 1));
  }
  return out;
}

inline Rational rational_from_json(const json& j, const char* what) {
  if (!j.is_string()) throw parse_error(std::string(what) + " must be a 'p/q' string");
  return parse_rational(j.get<std::string>());
}

inline BigInt bigint_from_json(const json& j, const char* what) {
  if (!j.is_string()) throw parse_error(std::string(what) + " must be a decimal string");
  try {
    return BigInt(j.get<std::string>());
  } catch (const std::exception&) {
    throw parse_error(std::string(what) + ": bad decimal string");
  }
}

inline const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw parse_error(std::string("missing field '") + name + "'");
  return *it;
}

}  // namespace detail

inline json trace_to_json(const KernelTrace& tr) {
  json j;
  j["stage0_deleted"] = tr.stage0_deleted;
  j["stage1"] = {
      {"tau", format_rational(tr.stage1.tau)},
      {"picked", detail::vars_to_json(tr.stage1.picked)},
      {"deleted_clause_mass", tr.stage1.deleted_clause_mass},
  };
  json s2;
  s2["case"] = to_string(tr.stage2.kind);
  s2["q"] = tr.stage2.q.str();
  if (tr.stage2.kind == Stage2Case::identity)
    s2["tau2"] = nullptr;
  else
    s2["tau2"] = tr.stage2.tau2;
  if (tr.stage2.kind == Stage2Case::sunflower)
    s2["opt_tilde"] = tr.stage2.opt_tilde.str();
  else
    s2["opt_tilde"] = nullptr;
  s2["deleted"] = detail::vars_to_json(tr.stage2.deleted);
  j["stage2"] = std::move(s2);
  j["stage3"] = {
      {"s", format_rational(tr.stage3.s)},
      {"applied", tr.stage3.applied},
      {"opt_tilde", tr.stage3.opt_tilde.str()},
  };
  return j;
}

inline KernelTrace trace_from_json(const json& j) {
  using detail::field;
  KernelTrace tr;
  if (!field(j, "stage0_deleted").is_number_unsigned())
    throw parse_error("stage0_deleted must be a non-negative integer");
  tr.stage0_deleted = field(j, "stage0_deleted").get<Count>();

  const json& s1 = field(j, "stage1");
  tr.stage1.tau = detail::rational_from_json(field(s1, "tau"), "stage1.tau");
  tr.stage1.picked = detail::vars_from_json(field(s1, "picked"));
  if (!field(s1, "deleted_clause_mass").is_number_unsigned())
    throw parse_error("stage1.deleted_clause_mass must be a non-negative integer");
  tr.stage1.deleted_clause_mass = field(s1, "deleted_clause_mass").get<Count>();

  const json& s2 = field(j, "stage2");
  const std::string kind = field(s2, "case").get<std::string>();
  if (kind == "identity")
    tr.stage2.kind = Stage2Case::identity;
  else if (kind == "I")
    tr.stage2.kind = Stage2Case::low_degree;
  else if (kind == "II")
    tr.stage2.kind = Stage2Case::sunflower;
  else
    throw parse_error("stage2.case must be identity, I or II");
  tr.stage2.q = detail::bigint_from_json(field(s2, "q"), "stage2.q");
  if (tr.stage2.kind != Stage2Case::identity) {
    if (!field(s2, "tau2").is_number_unsigned())
      throw parse_error("stage2.tau2 must be a non-negative integer");
    tr.stage2.tau2 = field(s2, "tau2").get<Count>();
  }
  if (tr.stage2.kind == Stage2Case::sunflower)
    tr.stage2.opt_tilde =
        detail::bigint_from_json(field(s2, "opt_tilde"), "stage2.opt_tilde");
  tr.stage2.deleted = detail::vars_from_json(field(s2, "deleted"));

  const json& s3 = field(j, "stage3");
  tr.stage3.s = detail::rational_from_json(field(s3, "s"), "stage3.s");
  if (!field(s3, "applied").is_boolean())
    throw parse_error("stage3.applied must be a boolean");
  tr.stage3.applied = field(s3, "applied").get<bool>();
  tr.stage3.opt_tilde =
      detail::bigint_from_json(field(s3, "opt_tilde"), "stage3.opt_tilde");
  return tr;
}

inline json formula_stats_to_json(const Formula& phi) {
  return json{
      {"n_vars", phi.n_vars},
      {"occurring_vars", occurring_vars(phi).size()},
      {"distinct_clauses", distinct_clause_count(phi)},
      {"clause_mass", clause_mass(phi)},
      {"negative_clause_mass", negative_clause_mass(phi)},
  };
}

inline json size_bounds_to_json(const SizeBounds& b) {
  json j;
  j["stage1_picked"] = b.stage1_picked;
  j["stage1_lhs"] = format_rational(b.stage1_lhs);
  j["stage1_rhs_harmonic"] = format_rational(b.stage1_rhs_harmonic);
  j["stage1_rhs_log"] = format_rational(b.stage1_rhs_log);
  j["stage1_ok"] = b.stage1_ok;
  j["kernel_occurring_vars"] = b.kernel_occurring;
  j["vars_bound"] = b.vars_bound.str();
  j["vars_ok"] = b.vars_ok;
  j["kernel_clause_mass"] = b.kernel_mass;
  j["mass_bound"] = b.mass_bound ? json(b.mass_bound->str()) : json(nullptr);
  j["mass_ok"] = b.mass_ok;
  return j;
}

// Full record of one kernelization run, as written by the command line tool.
inline json run_report_to_json(const KernelRun& run, const PipelineParams& p,
                               OracleKind oracle, double total_ms) {
  json j;
  j["input"] = formula_stats_to_json(run.phi[0]);
  j["kernel"] = formula_stats_to_json(run.phi[4]);
  j["params"] = {
      {"k", p.k},
      {"eps", format_rational(p.eps)},
      {"a", p.a},
      {"b", p.b},
      {"oracle", to_string(oracle)},
  };
  j["trace"] = trace_to_json(run.trace);
  j["bounds"] = size_bounds_to_json(compute_size_bounds(run, p));
  j["timings_ms"] = {{"total", total_ms}};
  return j;
}

}  // namespace kwsat
