// Command-line front end: tabulate / bounds / plan / asn / simulate.
// Exit codes: 0 success, 1 not auditable, 2 input error.

#include "stvaudit/stvaudit.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace stvaudit;

constexpr int kExitOk = 0;
constexpr int kExitNotAuditable = 1;
constexpr int kExitInputError = 2;

struct CommonInput {
  std::string path;
  int seats = 2;
  bool drop_empty = false;
};

Election load(const CommonInput& in) {
  ParseOptions opts;
  opts.fallback_seats = in.seats;
  opts.drop_empty = in.drop_empty;
  std::vector<std::string> warnings;
  Election el = load_election_file(in.path, opts, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return el;
}

CandidateId candidate_or_throw(const Election& el, const std::string& name) {
  const auto id = el.index_of(name);
  if (!id) throw std::runtime_error("unknown candidate: " + name);
  return *id;
}

CandidateSet set_of(const Election& el, const std::vector<std::string>& names) {
  CandidateSet s;
  for (const auto& n : names) s.add(candidate_or_throw(el, n));
  return s;
}

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    if (!contents.empty() && contents.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << contents;
}

int run_tabulate(const CommonInput& in, bool as_json, const std::string& out_path) {
  const Election el = load(in);
  const TabulationRecord rec = tabulate(el);
  if (as_json)
    write_output(out_path, tabulation_to_json(rec, el).dump(2));
  else
    write_output(out_path, render_round_table(rec, el));
  return kExitOk;
}

int run_bounds(const CommonInput& in, const std::string& kind,
               const std::vector<std::string>& args, const std::vector<std::string>& seated,
               const std::vector<std::string>& caps, const std::vector<std::string>& superior) {
  const Election el = load(in);
  const auto print = [](const Rational& v) {
    std::cout << format_ratio(v) << " (" << format_fixed(v, 4) << ")\n";
  };

  if (kind == "lower-basic" || kind == "upper-basic") {
    if (args.size() != 1) throw std::runtime_error(kind + " takes one candidate");
    const CandidateId c = candidate_or_throw(el, args[0]);
    print(Rational(kind == "lower-basic" ? lower_basic(c, el) : upper_basic(c, el)));
  } else if (kind == "upper-comp") {
    if (args.size() != 2) throw std::runtime_error("upper-comp takes two candidates: c cprime");
    print(Rational(upper_comp(candidate_or_throw(el, args[0]),
                              candidate_or_throw(el, args[1]), el)));
  } else if (kind == "lower-elim") {
    if (args.empty()) throw std::runtime_error("lower-elim takes: w [excluded...]");
    const CandidateId w = candidate_or_throw(el, args[0]);
    CandidateSet excluded;
    for (size_t i = 1; i < args.size(); ++i) excluded.add(candidate_or_throw(el, args[i]));
    print(Rational(lower_elim(w, excluded, el)));
  } else if (kind == "upper-complex") {
    if (args.size() != 2) throw std::runtime_error("upper-complex takes: c b");
    const CandidateId c = candidate_or_throw(el, args[0]);
    const CandidateId b = candidate_or_throw(el, args[1]);
    const CandidateSet w_set = set_of(el, seated);
    TransferCap tc;
    for (const auto& spec : caps) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw std::runtime_error("--cap expects name=ratio");
      tc.caps[candidate_or_throw(el, spec.substr(0, eq))] = parse_ratio(spec.substr(eq + 1));
    }
    print(upper_complex(c, b, w_set, tc, set_of(el, superior), el));
  } else {
    throw std::runtime_error("unknown bound kind: " + kind);
  }
  return kExitOk;
}

int run_plan(const CommonInput& in, const std::string& method, double alpha, double eps,
             const std::string& delta, const std::string& out_path, const std::string& asn_mode,
             int trials, std::uint64_t seed, bool override_winners) {
  const Election el = load(in);
  PlannerOptions opts;
  opts.alpha = alpha;
  opts.error_rate = eps;
  opts.delta = parse_ratio(delta);
  opts.asn_mode = asn_mode == "fast" ? AsnMode::fast : AsnMode::monte_carlo;
  opts.risk.trials = trials;
  opts.risk.seed = seed;
  opts.allow_winner_override = override_winners;

  const TabulationRecord rec = tabulate(el);
  const std::array<CandidateId, 2> reported{rec.winners[0], rec.winners[1]};

  const AutoPlanResult res = auto_plan(el, reported, opts);
  std::cout << render_comparison_row(res) << "\n";

  const AuditPlan* chosen = nullptr;
  if (method == "auto") {
    if (res.selected) chosen = &res.best();
  } else if (method == "general") {
    chosen = &res.general;
  } else if (method == "one-quota") {
    chosen = res.one_quota ? &*res.one_quota : nullptr;
  } else if (method == "two-quota") {
    chosen = res.two_quota ? &*res.two_quota : nullptr;
  } else {
    throw std::runtime_error("unknown method: " + method);
  }

  if (!chosen) {
    std::cerr << (method == "auto" ? "no method produced an auditable plan"
                                   : "method not applicable to this election")
              << "\n";
    return kExitNotAuditable;
  }

  nlohmann::json j = plan_to_json(*chosen, el);
  j["comparison"] = auto_result_comparison_json(res);
  write_output(out_path, j.dump(2));

  if (!chosen->auditable || std::isinf(chosen->overall_asn)) {
    if (chosen->failed_pair)
      std::cerr << "no auditable assertions for pair {" << el.name(chosen->failed_pair->first)
                << ", " << el.name(chosen->failed_pair->second) << "}\n";
    return kExitNotAuditable;
  }
  return kExitOk;
}

int run_asn(const std::string& margin, const std::string& upper, double alpha, double eps,
            long long ballots, bool fast, int trials, std::uint64_t seed) {
  AsnQuery q;
  q.diluted_margin = parse_ratio(margin);
  q.assorter_upper_bound = parse_ratio(upper);
  q.alpha = alpha;
  q.error_rate = eps;
  q.total_ballots = ballots;
  RiskOptions opts;
  opts.trials = trials;
  opts.seed = seed;
  const double asn = estimate_asn(q, fast ? AsnMode::fast : AsnMode::monte_carlo, opts);
  if (std::isinf(asn))
    std::cout << "+inf\n";
  else
    std::cout << asn << "\n";
  return kExitOk;
}

int run_simulate(const std::string& plan_path, const CommonInput& ballots,
                 const std::string& mvr_path, double eps, int trials, std::uint64_t seed,
                 long long max_draws, int jobs, const std::string& policy_name,
                 const std::string& out_path) {
  std::ifstream pin(plan_path);
  if (!pin) throw std::runtime_error("cannot open plan file: " + plan_path);
  nlohmann::json pj;
  pin >> pj;

  const Election cvrs = load(ballots);
  const AuditPlan plan = plan_from_json(pj, cvrs);

  EditPolicy policy = EditPolicy::mixed;
  if (policy_name == "swap") policy = EditPolicy::swap_only;
  else if (policy_name == "truncate") policy = EditPolicy::truncate_only;
  else if (policy_name == "substitute") policy = EditPolicy::substitute_only;
  else if (policy_name != "mixed") throw std::runtime_error("unknown edit policy: " + policy_name);

  Election mvrs = mvr_path.empty()
                      ? inject_errors(cvrs, eps, derive_seed(seed, 0x4d565253), policy)
                      : load(CommonInput{mvr_path, ballots.seats, ballots.drop_empty});

  const AuditSetup setup = prepare_audit(plan.assertions, cvrs, mvrs, eps);
  // Sanity: warn when the plan's stored margins do not match these ballots.
  for (size_t i = 0; i < setup.assertions.size(); ++i) {
    const double stored = to_double(plan.assertions[i].diluted_margin);
    if (std::abs(stored - setup.assertions[i].margin) > 1e-9)
      std::cerr << "warning: stored margin differs from the ballot file for "
                << describe(plan.assertions[i].assertion, cvrs) << "\n";
  }

  SimulationOptions opts;
  opts.trials = trials;
  opts.seed = seed;
  opts.max_draws = max_draws;
  opts.jobs = jobs;
  const SimulationReport rep = simulate_audits(setup, plan.alpha, opts);
  write_output(out_path, simulation_report_to_json(rep).dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assertion-based risk-limiting audits for 2-seat STV elections"};
  app.set_version_flag("--version", std::string("stvaudit ") + stvaudit::kVersion);
  app.require_subcommand(1);

  CommonInput input;
  std::string out_path;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("ballots", input.path, "ballot file (.ballots text or .json)")->required();
    cmd->add_option("--seats", input.seats, "seat count when the file has no header")
        ->default_val(2);
    cmd->add_flag("--drop-empty", input.drop_empty,
                  "drop empty ballots instead of counting them toward the total");
  };

  // tabulate
  auto* cmd_tab = app.add_subcommand("tabulate", "run the STV count and print the round table");
  bool tab_json = false;
  add_input(cmd_tab);
  cmd_tab->add_flag("--json", tab_json, "emit JSON instead of the text table");
  cmd_tab->add_option("--out", out_path, "output file (default stdout)");

  // bounds
  auto* cmd_bounds = app.add_subcommand("bounds", "print a tally bound (debugging aid)");
  std::string bound_kind;
  std::vector<std::string> bound_args, seated, caps, superior;
  add_input(cmd_bounds);
  cmd_bounds->add_option("kind", bound_kind,
                         "lower-basic | upper-basic | upper-comp | lower-elim | upper-complex")
      ->required();
  cmd_bounds->add_option("args", bound_args, "candidate arguments for the bound");
  cmd_bounds->add_option("--seated", seated, "assumed seated winners (upper-complex)");
  cmd_bounds->add_option("--cap", caps, "transfer cap name=ratio (upper-complex)");
  cmd_bounds->add_option("--superior", superior, "candidates g with AG(g,c) (upper-complex)");

  // plan
  auto* cmd_plan = app.add_subcommand("plan", "generate an audit plan");
  std::string method = "auto", delta = "0.01", asn_mode = "mc";
  double alpha = 0.10, eps = 0.002;
  int trials = 1000;
  std::uint64_t seed = 0x5741554449545331ull;
  bool override_winners = false;
  add_input(cmd_plan);
  cmd_plan->add_option("--method", method, "auto | general | one-quota | two-quota")
      ->default_val("auto");
  cmd_plan->add_option("--risk-limit", alpha, "risk limit alpha")->default_val(0.10);
  cmd_plan->add_option("--error-rate", eps, "expected error rate")->default_val(0.002);
  cmd_plan->add_option("--delta", delta, "one-quota cap increment")->default_val("0.01");
  cmd_plan->add_option("--asn-mode", asn_mode, "mc | fast")->default_val("mc");
  cmd_plan->add_option("--trials", trials, "Monte-Carlo trials per ASN")->default_val(1000);
  cmd_plan->add_option("--seed", seed, "ASN estimation seed");
  cmd_plan->add_flag("--override-winners", override_winners,
                     "plan even if the reported outcome disagrees with our tabulation");
  cmd_plan->add_option("--out", out_path, "plan JSON output (default stdout)");

  // asn
  auto* cmd_asn = app.add_subcommand("asn", "estimate the sample size for one margin");
  std::string margin, upper = "1";
  long long ballots_n = 0;
  bool fast = false;
  cmd_asn->add_option("--margin", margin, "diluted margin (ratio or decimal)")->required();
  cmd_asn->add_option("--upper-bound", upper, "assorter upper bound")->default_val("1");
  cmd_asn->add_option("--risk-limit", alpha, "risk limit alpha")->default_val(0.10);
  cmd_asn->add_option("--error-rate", eps, "expected error rate")->default_val(0.002);
  cmd_asn->add_option("--ballots", ballots_n, "total ballots (bounds the simulation)");
  cmd_asn->add_flag("--fast", fast, "closed-form approximation instead of Monte-Carlo");
  cmd_asn->add_option("--trials", trials, "Monte-Carlo trials")->default_val(1000);
  cmd_asn->add_option("--seed", seed, "Monte-Carlo seed");

  // simulate
  auto* cmd_sim = app.add_subcommand("simulate", "simulate ballot-comparison audits of a plan");
  std::string plan_path, mvr_path, policy = "mixed";
  long long max_draws = 0;
  int jobs = 1;
  cmd_sim->add_option("--plan", plan_path, "plan JSON from the plan subcommand")->required();
  cmd_sim->add_option("--ballots", input.path, "CVR ballot file")->required();
  cmd_sim->add_option("--seats", input.seats, "seat count when the file has no header")
      ->default_val(2);
  cmd_sim->add_flag("--drop-empty", input.drop_empty,
                    "drop empty ballots instead of counting them toward the total");
  cmd_sim->add_option("--mvrs", mvr_path, "explicit MVR ballot file (default: inject errors)");
  cmd_sim->add_option("--error-rate", eps, "MVR error rate when injecting")->default_val(0.002);
  cmd_sim->add_option("--policy", policy, "error edit policy: mixed|swap|truncate|substitute")
      ->default_val("mixed");
  cmd_sim->add_option("--trials", trials, "number of simulated audits")->default_val(1000);
  cmd_sim->add_option("--seed", seed, "master seed");
  cmd_sim->add_option("--max-draws", max_draws, "escalation threshold (default: all ballots)");
  cmd_sim->add_option("--jobs", jobs, "worker threads")->default_val(1);
  cmd_sim->add_option("--out", out_path, "report JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (cmd_tab->parsed()) return run_tabulate(input, tab_json, out_path);
    if (cmd_bounds->parsed())
      return run_bounds(input, bound_kind, bound_args, seated, caps, superior);
    if (cmd_plan->parsed())
      return run_plan(input, method, alpha, eps, delta, out_path, asn_mode, trials, seed,
                      override_winners);
    if (cmd_asn->parsed())
      return run_asn(margin, upper, alpha, eps, ballots_n, fast, trials, seed);
    if (cmd_sim->parsed())
      return run_simulate(plan_path, input, mvr_path, eps, trials, seed, max_draws, jobs, policy,
                          out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
