#include "peakload/cli.hpp"

#include "peakload/errors.hpp"
#include "peakload/instance_io.hpp"
#include "peakload/poa.hpp"
#include "peakload/report.hpp"
#include "peakload/robust.hpp"
#include "peakload/subsidy.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace peakload {
namespace {

struct CommonFlags {
  std::string format = "text";
  bool no_timing = false;
};

struct RunResult {
  ReportJson result;
  int code = kExitOk;
  std::string message;  // written to err when code != 0
};

int exit_code_for(const Error& e) {
  if (const auto* s = dynamic_cast<const StatusError*>(&e)) {
    return s->status() == SolveStatus::optimal ? kExitCertificate : kExitInfeasible;
  }
  switch (e.code()) {
    case ErrorCode::empty_set:
    case ErrorCode::unbounded_set:
      return kExitInfeasible;
    case ErrorCode::not_equilibrium:
      return kExitNotEquilibrium;
    case ErrorCode::saddle_violated:
    case ErrorCode::numeric_breakdown:
      return kExitCertificate;
    default:
      return kExitInputError;
  }
}

std::uint64_t parse_seed(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s.front() == '-') {
    throw Error(ErrorCode::invalid_input, what + ": expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t resolve_seed(const LoadedInstance* inst, const std::optional<std::uint64_t>& flag) {
  if (const char* env = std::getenv(kSeedEnv)) return parse_seed(env, kSeedEnv);
  if (flag) return *flag;
  if (inst && inst->options.seed) return *inst->options.seed;
  return kDefaultSeed;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_input, what + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

const char* demand_mode(const MarketInstance& inst) { return inst.fixed_demand() ? "fixed" : "elastic"; }

ReportJson solution_json(const EquilibriumSolution& s) {
  ReportJson j;
  j["objective"] = to_json(s.objective);
  j["prices"] = to_json(s.prices);
  j["capacities"] = to_json(s.capacities);
  j["production"] = to_json(s.production);
  j["capacity_rents"] = to_json(s.capacity_rents);
  return j;
}

ReportJson risk_json(const LoadedInstance& li) {
  if (!li.risk_set) return nullptr;
  ReportJson j;
  j["kind"] = std::holds_alternative<VarSpec>(*li.risk) ? "var" : "coherent";
  j["scale"] = to_json(li.risk_set->scale);
  ReportJson deg = ReportJson::array();
  for (Index d : li.risk_set->degenerate) deg.push_back(d);
  j["degenerate_coordinates"] = deg;
  j["warnings"] = li.risk_set->warnings;
  return j;
}

// ---------------------------------------------------------------- solve

struct SolveFlags {
  std::string instance;
  std::string mode = "nominal";
  std::string mean;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
};

MatrixXd parse_mean(const std::string& text, const MarketInstance& inst) {
  const std::vector<double> v = parse_list(text, "--mean");
  const Index n = inst.num_producers();
  const Index periods = inst.periods;
  MatrixXd m(n, periods);
  if (static_cast<Index>(v.size()) == n) {
    for (Index i = 0; i < n; ++i) m.row(i).setConstant(v[static_cast<size_t>(i)]);
  } else if (static_cast<Index>(v.size()) == n * periods) {
    for (Index i = 0; i < n; ++i) {
      for (Index t = 0; t < periods; ++t) m(i, t) = v[static_cast<size_t>(i * periods + t)];
    }
  } else {
    throw Error(ErrorCode::invalid_input, "--mean: expected N or N*T comma-separated values");
  }
  return m;
}

RunResult run_solve(const SolveFlags& f, LoadedInstance& li, ReportJson& header) {
  const MarketInstance& inst = li.market;
  SolveOptions opt;
  opt.tol = li.options.tol;
  RunResult rr;
  ReportJson& r = rr.result;
  ReportJson cert;
  r["mode"] = f.mode;
  r["demand_mode"] = demand_mode(inst);
  if (f.mode == "nominal" || f.mode == "expected") {
    EquilibriumSolution s;
    if (f.mode == "nominal") {
      s = solve_nominal(inst, opt);
    } else {
      if (f.mean.empty()) throw Error(ErrorCode::invalid_input, "--mean is required with --mode expected");
      const MatrixXd mean = parse_mean(f.mean, inst);
      r["mean"] = to_json(mean);
      s = solve_expected(inst, mean, opt);
    }
    r["solution"] = solution_json(s);
    cert["solver"] = to_json(s.certificate);
    if (!s.certificate.ok) rr.code = kExitCertificate;
  } else if (f.mode == "robust" || f.mode == "robust-cp") {
    const bool cp = f.mode == "robust-cp";
    const RobustMarketResult res = cp ? solve_robust_cp(inst, opt) : solve_robust_market(inst, opt);
    r["value"] = to_json(res.value);
    r["solution"] = solution_json(res.solution);
    r["worst_u"] = to_json(res.worst_u);
    cert["solver"] = to_json(res.solution.certificate);
    if (!res.solution.certificate.ok) rr.code = kExitCertificate;
    if (cp) {
      r["worst_u_source"] = to_string(res.worst_u_source);
      r["saddle_gap"] = to_json(res.saddle_gap);
      const int samples = f.samples.value_or(li.options.sample_count.value_or(kDefaultAdversarySamples));
      const std::uint64_t seed = resolve_seed(&li, f.seed);
      const AdjustableCertificate ac = verify_adjustable_equivalence(inst, res, samples, seed, opt.tol);
      ReportJson a;
      a["passed"] = ac.passed;
      a["samples"] = samples;
      a["seed"] = seed;
      a["scenarios_checked"] = ac.scenarios.size();
      a["max_domination_violation"] = to_json(ac.max_domination_violation);
      a["worst_u_gap"] = to_json(ac.worst_u_gap);
      if (!ac.passed) a["failure"] = ac.failure;
      cert["adjustable"] = a;
      if (!ac.passed) {
        rr.code = kExitCertificate;
        rr.message = "adjustable certificate failed: " + ac.failure;
      }
    }
  } else {
    throw Error(ErrorCode::invalid_input, "--mode must be nominal, robust, robust-cp or expected");
  }
  if (rr.code == kExitCertificate && rr.message.empty()) rr.message = "solver certificate failed";
  r["certificates"] = cert;
  header["instance_digest"] = "sha256:" + li.digest;
  return rr;
}

// ---------------------------------------------------------------- poa

struct PoaFlags {
  std::string instance;
  std::string generate;
  std::optional<double> delta, rho, alpha, epsilon;
  Index producers = 2;
  std::string emit_instance;
};

ReportJson poa_json(const PoAReport& p) {
  ReportJson j;
  j["demand_mode"] = p.fixed_demand ? "fixed" : "elastic";
  j["ratio_orientation"] = p.fixed_demand ? "E/C" : "C/E";
  j["E"] = to_json(p.E);
  j["C"] = to_json(p.C);
  j["ratio"] = to_json(p.ratio);
  j["tau"] = to_json(p.tau);
  j["bound"] = p.bound ? to_json(*p.bound) : ReportJson(nullptr);
  j["rho"] = p.rho ? to_json(*p.rho) : ReportJson(nullptr);
  j["within_bound"] = p.within_bound ? ReportJson(*p.within_bound) : ReportJson(nullptr);
  j["zero_cost"] = p.zero_cost;
  j["order_ok"] = p.detail.order_ok;
  j["planner_saddle_gap"] = to_json(p.detail.planner.saddle_gap);
  return j;
}

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw Error(ErrorCode::invalid_input, std::string(flag) + " is required for this generator");
  return *v;
}

RunResult run_poa(const PoaFlags& f, ReportJson& header) {
  if (f.instance.empty() == f.generate.empty()) {
    throw Error(ErrorCode::invalid_input, "give exactly one of --instance or --generate");
  }
  RunResult rr;
  ReportJson& r = rr.result;
  MarketInstance inst;
  SolveOptions opt;
  std::optional<ElasticFamily> family;
  if (!f.instance.empty()) {
    const LoadedInstance li = load_instance(f.instance);
    inst = li.market;
    opt.tol = li.options.tol;
    header["instance_digest"] = "sha256:" + li.digest;
    r["risk"] = risk_json(li);
  } else {
    if (f.producers < 2 || f.producers > kMaxEnumerationDim) {
      throw Error(ErrorCode::invalid_input, "--producers must lie in [2, 12]");
    }
    ReportJson g;
    g["family"] = f.generate;
    if (f.generate == "tight-fixed") {
      g["delta"] = need(f.delta, "--delta");
      g["producers"] = f.producers;
      inst = gen_tight_instance_fixed(Polytope::simplex(f.producers), *f.delta);
    } else if (f.generate == "tight-restricted") {
      g["rho"] = need(f.rho, "--rho");
      g["delta"] = need(f.delta, "--delta");
      g["producers"] = f.producers;
      inst = gen_tight_instance_restricted(Polytope::simplex(f.producers), *f.rho, *f.delta);
    } else if (f.generate == "elastic-family") {
      g["alpha"] = need(f.alpha, "--alpha");
      g["epsilon"] = f.epsilon.value_or(kDefaultFamilyEpsilon);
      family = gen_elastic_family(*f.alpha, f.epsilon.value_or(kDefaultFamilyEpsilon));
      inst = family->instance;
    } else {
      throw Error(ErrorCode::invalid_input, "--generate must be tight-fixed, tight-restricted or elastic-family");
    }
    const std::string canonical = emit_json(instance_to_json(inst));
    header["instance_digest"] = "sha256:" + sha256_hex(nlohmann::json::parse(canonical).dump());
    r["generator"] = g;
    if (!f.emit_instance.empty()) {
      std::ofstream o(f.emit_instance, std::ios::binary);
      if (!o) throw Error(ErrorCode::invalid_input, "cannot write " + f.emit_instance);
      o << canonical;
    }
  }
  const PoAReport p = poa(inst, opt);
  r["poa"] = poa_json(p);
  if (f.generate == "tight-restricted") {
    r["poa"]["restricted_closed_form"] = to_json(restricted_closed_form(*f.rho, *f.delta, p.tau));
  }
  if (family) {
    r["poa"]["E_closed"] = to_json(family->E_closed);
    r["poa"]["C_closed"] = to_json(family->C_closed);
  }
  if (p.within_bound && !*p.within_bound) {
    rr.code = kExitCertificate;
    rr.message = "price-of-anarchy ratio exceeds its bound";
  }
  return rr;
}

// ---------------------------------------------------------------- subsidy

struct SubsidyFlags {
  std::string instance;
  std::optional<int> grid, samples;
  std::optional<std::uint64_t> seed;
  std::string eta;
};

ReportJson verification_json(const EquilibriumVerification& v) {
  ReportJson j;
  j["is_equilibrium"] = v.is_equilibrium;
  j["best_response_ok"] = v.best_response_ok;
  j["zero_profit_ok"] = v.zero_profit_ok;
  j["deviation_ok"] = v.deviation_ok;
  j["worst_case_profits"] = to_json(v.worst_case_profits);
  j["max_deviation_gain"] = to_json(v.max_deviation_gain);
  ReportJson viol = ReportJson::array();
  for (const auto& x : v.violations) {
    viol.push_back({{"check", x.check},
                    {"producer", x.producer},
                    {"scenario", x.scenario},
                    {"capacity", to_json(x.deviation)},
                    {"amount", to_json(x.amount)}});
  }
  j["violations"] = viol;
  return j;
}

RunResult run_subsidy(const SubsidyFlags& f, ReportJson& header) {
  const LoadedInstance li = load_instance(f.instance);
  header["instance_digest"] = "sha256:" + li.digest;
  const MarketInstance& inst = li.market;
  inst.elastic();
  SolveOptions opt;
  opt.tol = li.options.tol;
  const int samples = f.samples.value_or(li.options.sample_count.value_or(kDefaultAuditSamples));
  const int grid = f.grid.value_or(li.options.grid.value_or(kDefaultDeviationGrid));
  if (samples < 0) throw Error(ErrorCode::invalid_input, "--samples must be nonnegative");
  const std::uint64_t seed = resolve_seed(&li, f.seed);

  RunResult rr;
  ReportJson& r = rr.result;
  SubsidyBundle b;
  try {
    b = compute_subsidies(inst, samples, seed, opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_capacity) throw;
    r["no_capacity"] = true;
    r["eta"] = to_json(VectorXd::Zero(inst.num_producers()).eval());
    r["warning"] = e.what();
    return rr;
  }
  r["no_capacity"] = false;
  if (!f.eta.empty()) {
    const std::vector<double> eta = parse_list(f.eta, "--eta");
    if (static_cast<Index>(eta.size()) != inst.num_producers()) {
      throw Error(ErrorCode::invalid_input, "--eta: expected one value per producer");
    }
    r["computed_eta"] = to_json(b.eta);
    b.eta = Eigen::Map<const VectorXd>(eta.data(), static_cast<Index>(eta.size()));
    r["eta_overridden"] = true;
  }
  b.verification = verify_subsidized_equilibrium(inst, b, grid);
  r["planner_value"] = to_json(b.planner_value);
  r["y_star"] = to_json(b.y_star);
  r["eta"] = to_json(b.eta);
  r["transfer"] = to_json(b.transfer());
  ReportJson table = ReportJson::array();
  for (size_t k = 0; k < b.scenario_results.size(); ++k) {
    const FixedCapacityWelfareResult& s = b.scenario_results[k];
    table.push_back({{"u", to_json(s.u)},
                     {"prices", to_json(s.prices)},
                     {"production", to_json(s.production)},
                     {"welfare", to_json(s.objective)},
                     {"lemma_values", to_json(VectorXd(b.lemma_values.col(static_cast<Index>(k))))},
                     {"max_kkt_residual", to_json(s.max_kkt_residual())}});
  }
  r["scenarios"] = table;
  ReportJson audit;
  audit["samples"] = samples;
  audit["seed"] = seed;
  ReportJson flags = ReportJson::array();
  for (const auto& a : b.audit_flags) {
    flags.push_back({{"producer", a.producer}, {"u", to_json(a.u)}, {"value", to_json(a.value)},
                     {"excess", to_json(a.excess)}});
  }
  audit["flags"] = flags;
  r["audit"] = audit;
  r["grid"] = grid;
  r["verification"] = verification_json(b.verification);
  if (!b.verification.is_equilibrium) {
    rr.code = kExitNotEquilibrium;
    try {
      b.verification.require();
    } catch (const Error& e) {
      rr.message = e.what();
    }
  }
  return rr;
}

// ---------------------------------------------------------------- tau / validate-set

RunResult run_set(const std::string& path, bool tau_only, ReportJson& header) {
  const LoadedInstance li = load_instance(path);
  header["instance_digest"] = "sha256:" + li.digest;
  const Polytope& u = li.market.uncertainty;
  RunResult rr;
  ReportJson& r = rr.result;
  r["dim"] = u.dim();
  r["rows"] = u.num_rows();
  const ValidationReport v = validate(u);
  if (tau_only || (v.nonempty && v.bounded)) {
    const TauResult t = tau(u);
    r["tau"] = to_json(t.tau);
    r["witness"] = to_json(t.witness);
  } else {
    r["tau"] = nullptr;
    r["witness"] = nullptr;
  }
  ReportJson val;
  val["is_valid_uncertainty_set"] = v.is_valid_uncertainty_set;
  val["contains_zero"] = v.contains_zero;
  val["inside_unit_box"] = v.inside_unit_box;
  val["bounded"] = v.bounded;
  val["nonempty"] = v.nonempty;
  val["axis_maxima"] = to_json(v.axis_maxima);
  val["warnings"] = v.warnings;
  r["validation"] = val;
  if (v.nonempty && v.bounded && u.dim() <= kMaxEnumerationDim) {
    r["vertex_count"] = enumerate_vertices(u).size();
  } else {
    r["vertex_count"] = nullptr;
  }
  r["risk"] = risk_json(li);
  return rr;
}

void add_common(CLI::App* sub, CommonFlags& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  sub->add_flag("--no-timing", c.no_timing, "Omit wall-clock timing from the report");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust peak-load market equilibria, planner solves, price of anarchy and subsidies", "peakload"};
  app.require_subcommand(1);
  CommonFlags common;

  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "Solve a market instance");
  solve->add_option("--instance", sf.instance, "Instance file")->required();
  solve->add_option("--mode", sf.mode, "nominal | robust | robust-cp | expected")
      ->check(CLI::IsMember({"nominal", "robust", "robust-cp", "expected"}));
  solve->add_option("--mean", sf.mean, "Mean scenario for --mode expected: N or N*T comma-separated values");
  solve->add_option("--samples", sf.samples, "Adversary samples for the adjustable certificate");
  solve->add_option("--seed", sf.seed, "Sampling seed");
  add_common(solve, common);

  PoaFlags pf;
  auto* poa_cmd = app.add_subcommand("poa", "Price of anarchy for an instance or a generated family");
  poa_cmd->add_option("--instance", pf.instance, "Instance file");
  poa_cmd->add_option("--generate", pf.generate, "tight-fixed | tight-restricted | elastic-family");
  poa_cmd->add_option("--delta", pf.delta, "Generator delta in (0, 1)");
  poa_cmd->add_option("--rho", pf.rho, "Restricted-family rho > 0");
  poa_cmd->add_option("--alpha", pf.alpha, "Elastic-family demand intercept");
  poa_cmd->add_option("--epsilon", pf.epsilon, "Elastic-family cost perturbation");
  poa_cmd->add_option("--producers", pf.producers, "Producers in the generated simplex instance");
  poa_cmd->add_option("--emit-instance", pf.emit_instance, "Write the generated instance to this path");
  add_common(poa_cmd, common);

  SubsidyFlags bf;
  auto* sub = app.add_subcommand("subsidy", "Investment subsidies for an elastic-demand instance");
  sub->add_option("--instance", bf.instance, "Instance file")->required();
  sub->add_option("--grid", bf.grid, "Capacity deviation grid points")->check(CLI::Range(2, 1000000));
  sub->add_option("--samples", bf.samples, "Audit samples");
  sub->add_option("--seed", bf.seed, "Audit seed");
  sub->add_option("--eta", bf.eta, "Override the subsidies (comma-separated) before verification");
  add_common(sub, common);

  std::string tau_path, validate_path;
  auto* tau_cmd = app.add_subcommand("tau", "tau of the instance's uncertainty set");
  tau_cmd->add_option("--instance", tau_path, "Instance file")->required();
  add_common(tau_cmd, common);
  auto* val_cmd = app.add_subcommand("validate-set", "Validate the instance's uncertainty set");
  val_cmd->add_option("--instance", validate_path, "Instance file")->required();
  add_common(val_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  ReportJson report;
  report["report_version"] = "1";
  ReportJson echo = ReportJson::array();
  for (int i = 1; i < argc; ++i) echo.push_back(argv[i]);
  report["command"] = {{"name", chosen->get_name()}, {"args", echo}};
  report["instance_digest"] = nullptr;

  const auto start = std::chrono::steady_clock::now();
  RunResult rr;
  try {
    if (chosen == solve) {
      LoadedInstance li = load_instance(sf.instance);
      rr = run_solve(sf, li, report);
    } else if (chosen == poa_cmd) {
      rr = run_poa(pf, report);
    } else if (chosen == sub) {
      rr = run_subsidy(bf, report);
    } else if (chosen == tau_cmd) {
      rr = run_set(tau_path, true, report);
    } else {
      rr = run_set(validate_path, false, report);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  report["result"] = rr.result;
  if (!common.no_timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["timing"] = {{"wall_seconds", secs}};
  }
  out << (common.format == "json" ? emit_json(report) : emit_text(report));
  if (rr.code != kExitOk) err << "error: " << rr.message << "\n";
  return rr.code;
}

}  // namespace peakload
