#pragma once

#include "stvaudit/assertions.hpp"
#include "stvaudit/risk.hpp"
#include "stvaudit/tabulate.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace stvaudit {

enum class PlanMethod { general, one_quota, two_quota };

inline const char* method_name(PlanMethod m) {
  switch (m) {
    case PlanMethod::general: return "general";
    case PlanMethod::one_quota: return "one-quota";
    case PlanMethod::two_quota: return "two-quota";
  }
  return "?";
}

struct PlannerOptions {
  double alpha = 0.10;
  double error_rate = 0.002;
  Rational delta = make_rational(1, 100);
  AsnMode asn_mode = AsnMode::monte_carlo;
  RiskOptions risk{};
  /// Plan for a reported outcome even when our own tabulation disagrees.
  bool allow_winner_override = false;
};

struct AuditPlan {
  PlanMethod method = PlanMethod::general;
  std::vector<AssertionReport> assertions;
  /// max over member ASNs; +infinity when no auditable set exists.
  double overall_asn = kInfiniteAsn;
  /// Reported winners in seating order.
  std::array<CandidateId, 2> reported_winners{-1, -1};
  bool tie_sensitive = false;
  /// False when the method aborted without a sufficient assertion set.
  bool auditable = false;
  /// Diagnostic: the first alternate pair (or (w2, c) for one-quota) that
  /// could not be ruled out.
  std::optional<std::pair<CandidateId, CandidateId>> failed_pair;

  // One-quota bookkeeping.
  std::vector<Rational> cap_schedule;
  std::optional<Rational> chosen_cap;

  double alpha = 0.10;
  double error_rate = 0.002;
  Rational delta = make_rational(1, 100);

  CandidateSet winner_set() const {
    CandidateSet s;
    s.add(reported_winners[0]);
    s.add(reported_winners[1]);
    return s;
  }
};

struct NonWinnersResult {
  /// All ordered pairs (w,l) for which AG(w,l) holds on the ballots.
  std::vector<AgAssertion> ag;
  /// Candidates dominated by at least two others.
  CandidateSet nw;
  /// The two cheapest AG assertions per non-winner.
  std::vector<AssertionReport> nwa;

  bool ag_holds(CandidateId w, CandidateId l) const {
    for (const auto& a : ag)
      if (a.w == w && a.l == l) return true;
    return false;
  }
};

namespace plandetail {

/// Memoizes AssertionReports within one planning run; AG reports especially
/// are shared across many NL supports.
class ReportCache {
 public:
  ReportCache(const Election& el, AsnEstimator estimator)
      : el_(el), estimator_(std::move(estimator)) {}

  const AssertionReport& get(const Assertion& a) {
    const std::string key = describe(a, el_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, make_report(a, el_, std::cref(estimator_))).first;
    }
    return it->second;
  }

 private:
  const Election& el_;
  AsnEstimator estimator_;
  std::map<std::string, AssertionReport> cache_;
};

inline void add_unique(std::vector<AssertionReport>& out, const AssertionReport& r) {
  for (const auto& existing : out)
    if (existing.assertion == r.assertion) return;
  out.push_back(r);
}

inline double max_asn(const std::vector<AssertionReport>& reports) {
  double m = 0;
  for (const auto& r : reports) m = std::max(m, r.asn);
  return m;
}

inline AsnEstimator make_estimator(const Election& el, const PlannerOptions& opts) {
  return AsnEstimator{opts.alpha, opts.error_rate, opts.asn_mode, opts.risk,
                      el.total_ballots()};
}

inline void require_two_seats(const Election& el) {
  if (el.seats() != 2)
    throw std::invalid_argument("audit planning is restricted to 2-seat elections");
}

inline void verify_reported(const Election& el, const TabulationRecord& rec,
                            std::array<CandidateId, 2> reported, const PlannerOptions& opts) {
  CandidateSet claimed;
  claimed.add(reported[0]);
  claimed.add(reported[1]);
  if (!(claimed == rec.winner_set()) && !opts.allow_winner_override)
    throw std::invalid_argument(
        "reported winners disagree with our tabulation of the ballots");
}

}  // namespace plandetail

/// All holding AG relations, the candidates that clearly cannot win (two or
/// more dominators), and the two cheapest AG assertions verifying each.
inline NonWinnersResult non_winners(const Election& el, const PlannerOptions& opts = {}) {
  plandetail::require_two_seats(el);
  const int nc = el.candidate_count();
  plandetail::ReportCache cache(el, plandetail::make_estimator(el, opts));

  NonWinnersResult res;
  for (CandidateId w = 0; w < nc; ++w)
    for (CandidateId l = 0; l < nc; ++l) {
      if (w == l) continue;
      if (evaluate(Assertion(AgAssertion{w, l}), el)) res.ag.push_back({w, l});
    }

  for (CandidateId c = 0; c < nc; ++c) {
    std::vector<AssertionReport> dominators;
    for (const auto& a : res.ag)
      if (a.l == c) dominators.push_back(cache.get(Assertion(a)));
    if (dominators.size() < 2) continue;
    res.nw.add(c);
    std::sort(dominators.begin(), dominators.end(),
              [](const AssertionReport& x, const AssertionReport& y) {
                if (x.asn != y.asn) return x.asn < y.asn;
                return std::get<AgAssertion>(x.assertion).w < std::get<AgAssertion>(y.assertion).w;
              });
    plandetail::add_unique(res.nwa, dominators[0]);
    plandetail::add_unique(res.nwa, dominators[1]);
  }
  return res;
}

/// The general method: rule out every alternate winner pair, starting from the
/// non-winner assertions and adding, per remaining pair, the cheapest holding
/// NL (with its supporting AG assertions) over all choices of the surviving
/// candidate o and both hypothetical-winner contexts. Transfer caps are the
/// unconditional maximum S/(S+1).
inline AuditPlan find_auditable_assertions(const Election& el,
                                           std::array<CandidateId, 2> reported,
                                           const PlannerOptions& opts = {}) {
  plandetail::require_two_seats(el);
  const TabulationRecord rec = tabulate(el);
  plandetail::verify_reported(el, rec, reported, opts);

  const int nc = el.candidate_count();
  plandetail::ReportCache cache(el, plandetail::make_estimator(el, opts));
  const NonWinnersResult nwres = non_winners(el, opts);
  const Rational cap = max_transfer_value(el.seats());

  AuditPlan plan;
  plan.method = PlanMethod::general;
  plan.reported_winners = reported;
  plan.tie_sensitive = rec.tie_occurred;
  plan.alpha = opts.alpha;
  plan.error_rate = opts.error_rate;
  plan.delta = opts.delta;

  for (const auto& r : nwres.nwa) plandetail::add_unique(plan.assertions, r);
  double overall = plandetail::max_asn(plan.assertions);

  CandidateSet dw;
  dw.add(reported[0]);
  dw.add(reported[1]);

  for (CandidateId c1 = 0; c1 < nc; ++c1) {
    for (CandidateId c2 = c1 + 1; c2 < nc; ++c2) {
      CandidateSet pair;
      pair.add(c1);
      pair.add(c2);
      if (pair == dw) continue;
      if (!(pair & nwres.nw).empty()) continue;

      // Cheapest local assertion set; ties broken toward fewer supporting
      // assertions, then lower o, then the first-winner context.
      double best_asn = kInfiniteAsn;
      std::tuple<size_t, CandidateId, int> best_key{~size_t(0), nc, 2};
      std::vector<AssertionReport> best_la;

      for (CandidateId o = 0; o < nc; ++o) {
        if (pair.contains(o)) continue;
        CandidateSet o_dominated;
        for (const auto& a : nwres.ag)
          if (a.w == o) o_dominated.add(a.l);

        for (int ctx = 0; ctx < 2; ++ctx) {
          const CandidateId assumed = ctx == 0 ? c1 : c2;  // hypothetically seated
          const CandidateId target = ctx == 0 ? c2 : c1;   // shown to lose to o
          CandidateSet g;
          for (const auto& a : nwres.ag)
            if (a.l == target && a.w != assumed) g.add(a.w);

          NlAssertion nl{o, target, CandidateSet().with(assumed),
                         TransferCap{{{assumed, cap}}}, g, o_dominated.without(assumed)};
          if (!evaluate(Assertion(nl), el)) continue;

          std::vector<AssertionReport> la;
          la.push_back(cache.get(Assertion(nl)));
          for (CandidateId oo : o_dominated.to_vector())
            plandetail::add_unique(la, cache.get(Assertion(AgAssertion{o, oo})));
          for (CandidateId gg : g.to_vector())
            plandetail::add_unique(la, cache.get(Assertion(AgAssertion{gg, target})));

          const double lasn = plandetail::max_asn(la);
          const std::tuple<size_t, CandidateId, int> key{la.size(), o, ctx};
          if (lasn < best_asn || (lasn == best_asn && key < best_key)) {
            best_asn = lasn;
            best_key = key;
            best_la = std::move(la);
          }
        }
      }

      if (best_asn == kInfiniteAsn) {
        plan.auditable = false;
        plan.overall_asn = kInfiniteAsn;
        plan.failed_pair = {{c1, c2}};
        return plan;
      }
      overall = std::max(overall, best_asn);
      for (const auto& r : best_la) plandetail::add_unique(plan.assertions, r);
    }
  }

  plan.auditable = true;
  plan.overall_asn = overall;
  return plan;
}

/// Both reported winners reached a quota on first preferences: audit just the
/// two IQ assertions. nullopt when not applicable.
inline std::optional<AuditPlan> two_quota_plan(const Election& el,
                                               std::array<CandidateId, 2> reported,
                                               const PlannerOptions& opts = {}) {
  plandetail::require_two_seats(el);
  const TabulationRecord rec = tabulate(el);
  plandetail::verify_reported(el, rec, reported, opts);
  if (lower_basic(reported[0], el) < el.quota() || lower_basic(reported[1], el) < el.quota())
    return std::nullopt;

  plandetail::ReportCache cache(el, plandetail::make_estimator(el, opts));
  AuditPlan plan;
  plan.method = PlanMethod::two_quota;
  plan.reported_winners = reported;
  plan.tie_sensitive = rec.tie_occurred;
  plan.alpha = opts.alpha;
  plan.error_rate = opts.error_rate;
  plan.delta = opts.delta;
  plandetail::add_unique(plan.assertions, cache.get(Assertion(IqAssertion{reported[0]})));
  plandetail::add_unique(plan.assertions, cache.get(Assertion(IqAssertion{reported[1]})));
  plan.overall_asn = plandetail::max_asn(plan.assertions);
  plan.auditable = true;
  return plan;
}

namespace plandetail {

/// One candidate cap configuration of the one-quota method. include_ut is
/// false only at the 2/3 endpoint, where the cap is the unconditional maximum
/// and a UT assertion would be vacuous.
struct OneQuotaConfig {
  std::vector<AssertionReport> assertions;
  double asn = kInfiniteAsn;
  bool feasible = false;
  CandidateId failed_against = -1;
};

inline OneQuotaConfig one_quota_config(const Election& el, CandidateId w1, CandidateId w2,
                                       const Rational& cap, bool include_ut,
                                       const NonWinnersResult& nwres, ReportCache& cache) {
  OneQuotaConfig cfg;
  add_unique(cfg.assertions, cache.get(Assertion(IqAssertion{w1})));
  if (include_ut) add_unique(cfg.assertions, cache.get(Assertion(UtAssertion{w1, cap})));

  const int nc = el.candidate_count();
  for (CandidateId c = 0; c < nc; ++c) {
    if (c == w1 || c == w2) continue;
    CandidateSet o_dominated;
    for (const auto& a : nwres.ag)
      if (a.w == w2) o_dominated.add(a.l);
    CandidateSet g;
    for (const auto& a : nwres.ag)
      if (a.l == c && a.w != w1) g.add(a.w);

    NlAssertion nl{w2, c, CandidateSet().with(w1), TransferCap{{{w1, cap}}}, g,
                   o_dominated.without(w1)};
    if (!evaluate(Assertion(nl), el)) {
      cfg.failed_against = c;
      return cfg;
    }
    add_unique(cfg.assertions, cache.get(Assertion(nl)));
    for (CandidateId oo : o_dominated.to_vector())
      add_unique(cfg.assertions, cache.get(Assertion(AgAssertion{w2, oo})));
    for (CandidateId gg : g.to_vector())
      add_unique(cfg.assertions, cache.get(Assertion(AgAssertion{gg, c})));
  }
  cfg.feasible = true;
  cfg.asn = max_asn(cfg.assertions);
  return cfg;
}

}  // namespace plandetail

/// The one-quota method (applicable when exactly the first reported winner has
/// an initial quota): IQ(w1), UT(w1, cap) and an NL(w2, c, {w1}, ...) per
/// remaining candidate. The cap sweeps upward from the reported transfer value
/// in steps of delta while the overall ASN decreases; the 2/3 endpoint (where
/// the cap needs no UT) is always examined too, and the cheapest configuration
/// wins. nullopt when not applicable.
inline std::optional<AuditPlan> one_quota_plan(const Election& el,
                                               std::array<CandidateId, 2> reported,
                                               const PlannerOptions& opts = {}) {
  plandetail::require_two_seats(el);
  if (opts.delta <= 0) throw std::invalid_argument("one_quota_plan: delta must be positive");
  const TabulationRecord rec = tabulate(el);
  plandetail::verify_reported(el, rec, reported, opts);

  const CandidateId w1 = reported[0];
  const CandidateId w2 = reported[1];
  const bool iq1 = lower_basic(w1, el) >= el.quota();
  const bool iq2 = lower_basic(w2, el) >= el.quota();
  if (!iq1 || iq2) return std::nullopt;

  const auto tau_reported = rec.transfer_value_of(w1);
  if (!tau_reported) return std::nullopt;  // only under winner override
  const Rational tau_max = max_transfer_value(el.seats());

  plandetail::ReportCache cache(el, plandetail::make_estimator(el, opts));
  const NonWinnersResult nwres = non_winners(el, opts);

  AuditPlan plan;
  plan.method = PlanMethod::one_quota;
  plan.reported_winners = reported;
  plan.tie_sensitive = rec.tie_occurred;
  plan.alpha = opts.alpha;
  plan.error_rate = opts.error_rate;
  plan.delta = opts.delta;

  std::optional<plandetail::OneQuotaConfig> best;
  std::optional<Rational> best_cap;
  double prev_asn = kInfiniteAsn;

  auto consider = [&](const Rational& cap, bool include_ut) -> plandetail::OneQuotaConfig {
    auto cfg = plandetail::one_quota_config(el, w1, w2, cap, include_ut, nwres, cache);
    plan.cap_schedule.push_back(cap);
    // A configuration is selectable only at finite cost: just above the
    // reported transfer value the strict audited UT form can be false on the
    // CVRs (its margin is not positive), and such a configuration must never
    // be returned.
    if (cfg.feasible && std::isfinite(cfg.asn) && (!best || cfg.asn < best->asn)) {
      best = cfg;
      best_cap = cap;
    }
    return cfg;
  };

  for (long long k = 1;; ++k) {
    const Rational cap = *tau_reported + opts.delta * k;
    if (cap >= tau_max) break;
    const auto cfg = consider(cap, true);
    if (!cfg.feasible) {
      // U_complex is nondecreasing in the cap: once an NL fails, every larger
      // cap fails too, so the sweep ends here.
      plan.failed_pair = {{w2, cfg.failed_against}};
      break;
    }
    if (cfg.asn > prev_asn) break;  // ASN started increasing
    prev_asn = cfg.asn;
  }

  // Endpoint: cap = 2/3 is the unconditional maximum; no UT needed. Examining
  // it unconditionally means both ends of the stopping rule are always seen.
  {
    const auto cfg = consider(tau_max, false);
    if (!cfg.feasible && !plan.failed_pair) plan.failed_pair = {{w2, cfg.failed_against}};
  }

  if (!best) {
    plan.auditable = false;
    plan.overall_asn = kInfiniteAsn;
    return plan;
  }
  plan.assertions = best->assertions;
  plan.overall_asn = best->asn;
  plan.chosen_cap = best_cap;
  plan.auditable = true;
  plan.failed_pair.reset();
  return plan;
}

struct AutoPlanResult {
  std::optional<AuditPlan> two_quota;
  std::optional<AuditPlan> one_quota;
  AuditPlan general;
  std::optional<PlanMethod> selected;

  const AuditPlan& best() const {
    switch (selected.value()) {
      case PlanMethod::two_quota: return *two_quota;
      case PlanMethod::one_quota: return *one_quota;
      default: return general;
    }
  }

  /// Table-style cell: "--" not applicable, "+inf" no auditable set.
  std::optional<double> method_asn(PlanMethod m) const {
    const AuditPlan* p = nullptr;
    if (m == PlanMethod::two_quota) p = two_quota ? &*two_quota : nullptr;
    else if (m == PlanMethod::one_quota) p = one_quota ? &*one_quota : nullptr;
    else p = &general;
    if (!p) return std::nullopt;
    return p->overall_asn;
  }
};

/// Runs every applicable method and keeps the cheapest plan (ties resolved
/// toward the smaller assertion set: two-quota, then one-quota, then general).
inline AutoPlanResult auto_plan(const Election& el, std::array<CandidateId, 2> reported,
                                const PlannerOptions& opts = {}) {
  AutoPlanResult res;
  res.two_quota = two_quota_plan(el, reported, opts);
  res.one_quota = one_quota_plan(el, reported, opts);
  res.general = find_auditable_assertions(el, reported, opts);

  double best = kInfiniteAsn;
  auto offer = [&](PlanMethod m, const AuditPlan* p) {
    if (!p || !p->auditable) return;
    if (p->overall_asn < best) {
      best = p->overall_asn;
      res.selected = m;
    }
  };
  offer(PlanMethod::two_quota, res.two_quota ? &*res.two_quota : nullptr);
  offer(PlanMethod::one_quota, res.one_quota ? &*res.one_quota : nullptr);
  offer(PlanMethod::general, &res.general);
  if (res.selected && best == kInfiniteAsn) res.selected.reset();
  return res;
}

/// Independent structural check that a plan's assertions, if all true, rule
/// out every alternate winner pair: an IQ for a candidate outside the pair;
/// an AG dominator outside the pair; or an NL in one of the two hypothetical
/// contexts whose AG premises are in the plan and whose caps are either the
/// unconditional maximum or justified by IQ + UT on the capped winner.
inline bool check_sufficiency(const AuditPlan& plan, const Election& el) {
  if (el.seats() != 2) return false;
  const int nc = el.candidate_count();
  const CandidateSet dw = plan.winner_set();
  const Rational tau_max = max_transfer_value(el.seats());

  auto has_ag = [&](CandidateId w, CandidateId l) {
    for (const auto& r : plan.assertions)
      if (const auto* a = std::get_if<AgAssertion>(&r.assertion))
        if (a->w == w && a->l == l) return true;
    return false;
  };
  auto has_iq = [&](CandidateId c) {
    for (const auto& r : plan.assertions)
      if (const auto* a = std::get_if<IqAssertion>(&r.assertion))
        if (a->c == c) return true;
    return false;
  };
  auto has_ut_at_most = [&](CandidateId c, const Rational& cap) {
    for (const auto& r : plan.assertions)
      if (const auto* a = std::get_if<UtAssertion>(&r.assertion))
        if (a->c == c && a->cap <= cap) return true;
    return false;
  };
  auto caps_justified = [&](const TransferCap& caps) {
    for (const auto& [w, cap] : caps.caps) {
      if (cap >= tau_max) continue;
      if (!(has_iq(w) && has_ut_at_most(w, cap))) return false;
    }
    return true;
  };

  for (CandidateId a = 0; a < nc; ++a) {
    for (CandidateId b = a + 1; b < nc; ++b) {
      CandidateSet pair;
      pair.add(a);
      pair.add(b);
      if (pair == dw) continue;

      bool covered = false;
      for (CandidateId c = 0; c < nc && !covered; ++c)
        if (!pair.contains(c) && has_iq(c)) covered = true;
      for (CandidateId m : {a, b})
        for (CandidateId w = 0; w < nc && !covered; ++w)
          if (w != m && !pair.contains(w) && has_ag(w, m)) covered = true;

      for (const auto& r : plan.assertions) {
        if (covered) break;
        const auto* nl = std::get_if<NlAssertion>(&r.assertion);
        if (!nl) continue;
        if (!pair.contains(nl->l) || pair.contains(nl->w)) continue;
        if (!(nl->W == pair.without(nl->l))) continue;
        bool premises = caps_justified(nl->caps);
        for (CandidateId oo : nl->O.to_vector())
          premises = premises && has_ag(nl->w, oo);
        for (CandidateId gg : nl->G.to_vector())
          premises = premises && has_ag(gg, nl->l);
        if (premises) covered = true;
      }
      if (!covered) return false;
    }
  }
  return true;
}

}  // namespace stvaudit
