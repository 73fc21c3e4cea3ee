#pragma once

#include "stvaudit/assertions.hpp"
#include "stvaudit/planner.hpp"
#include "stvaudit/risk.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace stvaudit {

/// Expanded view of an election: one entry per physical ballot, holding the
/// index of its ranking. Expansion order is deterministic (stored ranking
/// order, multiplicities unrolled), which is what pairs CVRs with MVRs.
struct BallotPool {
  std::vector<int> ranking_index;
};

inline BallotPool expand(const Election& el) {
  BallotPool pool;
  pool.ranking_index.reserve(static_cast<size_t>(el.total_ballots()));
  for (size_t r = 0; r < el.ballots().size(); ++r)
    for (long long i = 0; i < el.ballots()[r].count; ++i)
      pool.ranking_index.push_back(static_cast<int>(r));
  return pool;
}

enum class EditPolicy { mixed, swap_only, truncate_only, substitute_only };

/// A copy of the election in which a Binomial(|B|, rate) number of ballots
/// received one random edit (adjacent swap, truncation, or ranking
/// substitution). The ballot count is preserved.
inline Election inject_errors(const Election& el, double rate, std::uint64_t seed,
                              EditPolicy policy = EditPolicy::mixed) {
  if (rate < 0 || rate > 1) throw std::invalid_argument("inject_errors: rate must be in [0,1]");
  const int nc = el.candidate_count();
  std::mt19937_64 rng(seed);

  std::vector<std::vector<CandidateId>> papers;
  papers.reserve(static_cast<size_t>(el.total_ballots()));
  for (const auto& rc : el.ballots())
    for (long long i = 0; i < rc.count; ++i) papers.push_back(rc.ranking.prefs);

  const auto n = static_cast<long long>(papers.size());
  long long edits = 0;
  if (rate >= 1.0) {
    edits = n;
  } else if (rate > 0) {
    std::binomial_distribution<long long> binom(n, rate);
    edits = binom(rng);
  }

  // Partial Fisher-Yates picks `edits` distinct ballots.
  std::vector<long long> order(papers.size());
  for (long long i = 0; i < n; ++i) order[i] = i;
  for (long long i = 0; i < edits; ++i) {
    std::uniform_int_distribution<long long> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  auto random_ranking = [&]() {
    std::uniform_int_distribution<int> len_dist(0, nc);
    const int len = len_dist(rng);
    std::vector<CandidateId> ids(nc);
    for (int i = 0; i < nc; ++i) ids[i] = i;
    for (int i = 0; i < len; ++i) {
      std::uniform_int_distribution<int> pick(i, nc - 1);
      std::swap(ids[i], ids[pick(rng)]);
    }
    ids.resize(len);
    return ids;
  };

  for (long long i = 0; i < edits; ++i) {
    auto& prefs = papers[order[i]];
    EditPolicy kind = policy;
    if (kind == EditPolicy::mixed) {
      std::uniform_int_distribution<int> pick(0, 2);
      switch (pick(rng)) {
        case 0: kind = EditPolicy::swap_only; break;
        case 1: kind = EditPolicy::truncate_only; break;
        default: kind = EditPolicy::substitute_only; break;
      }
      if (kind == EditPolicy::swap_only && prefs.size() < 2) kind = EditPolicy::truncate_only;
      if (kind == EditPolicy::truncate_only && prefs.empty()) kind = EditPolicy::substitute_only;
    }
    switch (kind) {
      case EditPolicy::swap_only: {
        if (prefs.size() < 2) break;  // nothing to swap
        std::uniform_int_distribution<size_t> at(0, prefs.size() - 2);
        const size_t i0 = at(rng);
        std::swap(prefs[i0], prefs[i0 + 1]);
        break;
      }
      case EditPolicy::truncate_only: {
        if (prefs.empty()) break;  // already empty
        std::uniform_int_distribution<size_t> keep(0, prefs.size() - 1);
        prefs.resize(keep(rng));
        break;
      }
      default:
        prefs = random_ranking();
        break;
    }
  }

  // Re-aggregate in first-appearance order so an edit-free copy round-trips.
  std::map<std::vector<CandidateId>, size_t> slot;
  std::vector<RankingCount> ballots;
  for (auto& p : papers) {
    const auto [it, inserted] = slot.try_emplace(p, ballots.size());
    if (inserted)
      ballots.push_back({Ballot{std::move(p)}, 1});
    else
      ++ballots[it->second].count;
  }
  return Election::create(el.names(), el.seats(), std::move(ballots));
}

/// One plan assertion with everything a comparison audit needs per draw.
struct PreparedAssertion {
  Assertion assertion;
  double upper_bound = 0;  // u
  double margin = 0;       // v, from the CVRs
  double lambda = kMaxLambda;
  std::vector<double> cvr_scores;  // per CVR ranking index
  std::vector<double> mvr_scores;  // per MVR ranking index
};

struct AuditSetup {
  const Election* cvrs = nullptr;
  const Election* mvrs = nullptr;
  BallotPool cvr_pool;
  BallotPool mvr_pool;
  std::vector<PreparedAssertion> assertions;
};

/// Builds score tables and tuned bets for every plan assertion. Throws when
/// the CVR and MVR sets cannot be paired (different candidates or counts).
inline AuditSetup prepare_audit(const std::vector<AssertionReport>& assertions,
                                const Election& cvrs, const Election& mvrs,
                                double error_rate) {
  if (cvrs.names() != mvrs.names())
    throw std::invalid_argument("audit: CVR and MVR candidate lists differ");
  if (cvrs.total_ballots() != mvrs.total_ballots())
    throw std::invalid_argument("audit: ballot-id mismatch between CVRs and MVRs");

  AuditSetup setup;
  setup.cvrs = &cvrs;
  setup.mvrs = &mvrs;
  setup.cvr_pool = expand(cvrs);
  setup.mvr_pool = expand(mvrs);

  for (const auto& report : assertions) {
    PreparedAssertion pa;
    pa.assertion = report.assertion;
    const Assorter assorter = to_assorter(to_linear(report.assertion, cvrs));
    pa.upper_bound = to_double(assorter.upper_bound());
    pa.margin = to_double(Rational(2 * assorter_mean(assorter, cvrs) - 1));
    const double b0 = overstatement_score(0.0, pa.upper_bound, pa.margin);
    const double b1 = overstatement_score(pa.upper_bound / 2.0, pa.upper_bound, pa.margin);
    pa.lambda = tuned_lambda(b0, b1, error_rate);
    if (pa.lambda <= 0) pa.lambda = kMaxLambda;  // degenerate margins still get a valid test
    pa.cvr_scores.reserve(cvrs.ballots().size());
    for (const auto& rc : cvrs.ballots())
      pa.cvr_scores.push_back(to_double(assorter.score(rc.ranking)));
    pa.mvr_scores.reserve(mvrs.ballots().size());
    for (const auto& rc : mvrs.ballots())
      pa.mvr_scores.push_back(to_double(assorter.score(rc.ranking)));
    setup.assertions.push_back(std::move(pa));
  }
  return setup;
}

struct AuditResult {
  bool certified = false;
  long long draws = 0;
};

/// One ballot-comparison audit: draws ballots uniformly with replacement,
/// feeds each assertion's overstatement into its sequential test, certifies
/// when every assertion's measured risk is at or below alpha, and escalates
/// at max_draws.
inline AuditResult run_audit(const AuditSetup& setup, double alpha, std::uint64_t seed,
                             long long max_draws) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("run_audit: alpha must be in (0,1)");
  const long long n = setup.cvrs->total_ballots();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> pick(0, n - 1);

  std::vector<SequentialTest> tests;
  std::vector<size_t> open;  // assertions not yet certified
  tests.reserve(setup.assertions.size());
  for (size_t i = 0; i < setup.assertions.size(); ++i) {
    tests.push_back(SequentialTest{setup.assertions[i].lambda});
    open.push_back(i);
  }

  for (long long draws = 1; draws <= max_draws; ++draws) {
    const long long id = pick(rng);
    for (size_t k = 0; k < open.size();) {
      const size_t i = open[k];
      const auto& pa = setup.assertions[i];
      const double omega = pa.cvr_scores[setup.cvr_pool.ranking_index[id]] -
                           pa.mvr_scores[setup.mvr_pool.ranking_index[id]];
      tests[i].update(overstatement_score(omega, pa.upper_bound, pa.margin));
      if (tests[i].certified(alpha)) {
        open[k] = open.back();
        open.pop_back();
      } else {
        ++k;
      }
    }
    if (open.empty()) return {true, draws};
  }
  return {false, max_draws};
}

struct SimulationOptions {
  int trials = 1000;
  std::uint64_t seed = 0x5741554449545331ull;
  long long max_draws = 0;  // 0 = total ballot count
  int jobs = 1;
};

struct SimulationReport {
  int trials = 0;
  long long certified = 0;
  double cert_rate = 0;
  double mean_draws = 0;            // escalated trials count at max_draws
  double mean_draws_certified = 0;  // over certified trials only
  std::map<std::string, double> quantiles;  // p25/p50/p75/p90 of draws
  long long max_draws = 0;
};

/// Seeded, embarrassingly parallel repetition of run_audit. Per-trial seeds
/// derive from the master seed, so the result is identical for any job count.
inline SimulationReport simulate_audits(const AuditSetup& setup, double alpha,
                                        const SimulationOptions& opts) {
  SimulationReport rep;
  rep.trials = std::max(0, opts.trials);
  rep.max_draws = opts.max_draws > 0 ? opts.max_draws : setup.cvrs->total_ballots();

  std::vector<AuditResult> results(rep.trials);
  const int jobs = std::max(1, opts.jobs);
  auto worker = [&](int first) {
    for (int t = first; t < rep.trials; t += jobs)
      results[t] = run_audit(setup, alpha, derive_seed(opts.seed, t), rep.max_draws);
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker, j);
    for (auto& th : pool) th.join();
  }

  double total = 0, total_certified = 0;
  std::vector<long long> draws;
  draws.reserve(results.size());
  for (const auto& r : results) {
    if (r.certified) {
      ++rep.certified;
      total_certified += static_cast<double>(r.draws);
    }
    total += static_cast<double>(r.draws);
    draws.push_back(r.draws);
  }
  if (rep.trials > 0) {
    rep.cert_rate = static_cast<double>(rep.certified) / rep.trials;
    rep.mean_draws = total / rep.trials;
    rep.mean_draws_certified = rep.certified ? total_certified / rep.certified : 0;
    std::sort(draws.begin(), draws.end());
    for (const auto& [label, q] : std::initializer_list<std::pair<const char*, double>>{
             {"p25", 0.25}, {"p50", 0.50}, {"p75", 0.75}, {"p90", 0.90}}) {
      const size_t idx = std::min(draws.size() - 1,
                                  static_cast<size_t>(q * static_cast<double>(draws.size())));
      rep.quantiles[label] = static_cast<double>(draws[idx]);
    }
  }
  return rep;
}

}  // namespace stvaudit
