#pragma once

#include "stvaudit/ballot.hpp"
#include "stvaudit/rational.hpp"
#include "stvaudit/tabulate.hpp"

#include <map>
#include <stdexcept>

namespace stvaudit {

/// Per-candidate upper bounds on transfer values, keyed exactly by the
/// assumed-winner set W it accompanies. Each cap lies in [0, S/(S+1)].
struct TransferCap {
  std::map<CandidateId, Rational> caps;

  CandidateSet keys() const {
    CandidateSet s;
    for (const auto& [c, v] : caps) s.add(c);
    return s;
  }
  const Rational& at(CandidateId c) const { return caps.at(c); }
  bool operator==(const TransferCap&) const = default;
};

/// Number of first preferences for c: a lower bound on c's tally at all times.
inline long long lower_basic(CandidateId c, const Election& el) {
  long long n = 0;
  for (const auto& rc : el.ballots())
    if (!rc.ranking.empty() && rc.ranking.prefs.front() == c) n += rc.count;
  return n;
}

/// Number of ballots mentioning c anywhere: an upper bound on c's tally.
inline long long upper_basic(CandidateId c, const Election& el) {
  long long n = 0;
  for (const auto& rc : el.ballots())
    if (rc.ranking.mentions(c)) n += rc.count;
  return n;
}

/// Number of ballots on which c precedes c' (counting c' absent, c present):
/// the most ballots c's tally can hold before c' is eliminated.
inline long long upper_comp(CandidateId c, CandidateId cprime, const Election& el) {
  if (c == cprime) throw std::invalid_argument("upper_comp: candidates must differ");
  CandidateSet pair;
  pair.add(c);
  pair.add(cprime);
  long long n = 0;
  for (const auto& rc : el.ballots()) {
    const auto f = first_of_projection(rc.ranking.prefs, pair);
    if (f && *f == c) n += rc.count;
  }
  return n;
}

/// Number of ballots whose first preference after deleting O is w. A valid
/// lower bound on w's tally at any point w could be eliminated only when
/// AG(w,o) holds for every o in O; establishing that is the caller's job.
inline long long lower_elim(CandidateId w, CandidateSet O, const Election& el) {
  if (O.contains(w)) throw std::invalid_argument("lower_elim: w must not be in O");
  const CandidateSet keep = el.candidate_set() - O;
  long long n = 0;
  for (const auto& rc : el.ballots()) {
    const auto f = first_of_projection(rc.ranking.prefs, keep);
    if (f && *f == w) n += rc.count;
  }
  return n;
}

namespace detail {

/// Per-ballot case analysis for the complex upper bound on c's tally, in the
/// context: winners W all seated with transfer values capped by `caps`, b
/// eligible, AG(g,c) known for every g in G.
inline Rational upper_complex_ballot(const std::vector<CandidateId>& prefs, CandidateId c,
                                     CandidateId b, CandidateSet W, const TransferCap& caps,
                                     CandidateSet G) {
  // A candidate in G - W ahead of c blocks the ballot: it can be neither
  // eliminated before c nor seated.
  const CandidateSet blockers = G - W;
  if (!blockers.empty()) {
    for (CandidateId g : blockers.to_vector()) {
      const auto f = first_of_projection(prefs, CandidateSet().with(g).with(c));
      if (f && *f == g) return Rational(0);
    }
  }

  bool mentions_c = false;
  for (CandidateId p : prefs)
    if (p == c) { mentions_c = true; break; }
  if (!mentions_c) return Rational(0);

  const auto fbc = first_of_projection(prefs, CandidateSet().with(b).with(c));
  if (fbc && *fbc == b) return Rational(0);

  if (!prefs.empty() && W.contains(prefs.front())) {
    // Reaches c only via a transfer out of some preceding seated winner.
    Rational mt(-1);
    bool found = false;
    for (CandidateId p : prefs) {
      if (p == c) break;
      if (W.contains(p)) {
        const Rational& cap = caps.at(p);
        if (!found || cap > mt) mt = cap;
        found = true;
      }
    }
    // prefs.front() itself is a preceding member of W, so the set is nonempty.
    if (!found) throw std::logic_error("upper_complex: no W member precedes c");
    return mt;
  }

  return Rational(1);
}

}  // namespace detail

/// Complex upper bound on c's tally when comparing against alternate winner b,
/// under the assumptions of the TransferCap context. Preconditions: c,b not in
/// W, b != c, caps keyed exactly by W.
inline Rational upper_complex(CandidateId c, CandidateId b, CandidateSet W,
                              const TransferCap& caps, CandidateSet G, const Election& el) {
  if (c == b) throw std::invalid_argument("upper_complex: c and b must differ");
  if (W.contains(c) || W.contains(b))
    throw std::invalid_argument("upper_complex: c and b must not be assumed winners");
  if (!(caps.keys() == W))
    throw std::invalid_argument("upper_complex: caps must cover exactly W");
  const Rational max_tau = max_transfer_value(el.seats());
  for (const auto& [w, cap] : caps.caps)
    if (cap < 0 || cap > max_tau)
      throw std::invalid_argument("upper_complex: cap outside [0, S/(S+1)]");

  Rational total(0);
  for (const auto& rc : el.ballots()) {
    const Rational score = detail::upper_complex_ballot(rc.ranking.prefs, c, b, W, caps, G);
    if (score != 0) total += score * rc.count;
  }
  return total;
}

}  // namespace stvaudit
