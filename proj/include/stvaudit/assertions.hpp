#pragma once

#include "stvaudit/bounds.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace stvaudit {

/// c's first-preference tally reaches a quota. Audited in the strict linear
/// form L_basic(c) > |B|/(S+1), which on integers is equivalent to >= Q.
struct IqAssertion {
  CandidateId c;
  bool operator==(const IqAssertion&) const = default;
};

/// c's first-round transfer value stays below `cap`. Audited in the slightly
/// stricter form L_basic(c) < (|B|/(S+1)) / (1 - cap).
struct UtAssertion {
  CandidateId c;
  Rational cap;  // 0 < cap < S/(S+1)
  bool operator==(const UtAssertion&) const = default;
};

/// w's tally is always greater than l's: L_basic(w) > U_comp(l,w).
struct AgAssertion {
  CandidateId w;
  CandidateId l;
  bool operator==(const AgAssertion&) const = default;
};

/// w never loses to l in the context of seated winners W (transfer values
/// capped by `caps`), AG(g,l) for g in G, AG(w,o) for o in O:
/// L_elim(w,O) > U_complex(l,w,W,caps,G).
struct NlAssertion {
  CandidateId w;
  CandidateId l;
  CandidateSet W;
  TransferCap caps;
  CandidateSet G;
  CandidateSet O;
  bool operator==(const NlAssertion&) const = default;
};

using Assertion = std::variant<IqAssertion, UtAssertion, AgAssertion, NlAssertion>;

namespace detail {

inline void check_candidate(CandidateId c, const Election& el, const char* what) {
  if (c < 0 || c >= el.candidate_count())
    throw std::invalid_argument(std::string("assertion references unknown candidate (") + what +
                                ")");
}

inline void check_nl(const NlAssertion& a, const Election& el) {
  check_candidate(a.w, el, "NL winner");
  check_candidate(a.l, el, "NL loser");
  if (a.w == a.l) throw std::invalid_argument("NL: w and l must differ");
  if (a.W.contains(a.w) || a.W.contains(a.l))
    throw std::invalid_argument("NL: w and l must not be in W");
  if (a.O.contains(a.w)) throw std::invalid_argument("NL: w must not be in O");
  if (!(a.caps.keys() == a.W)) throw std::invalid_argument("NL: caps must cover exactly W");
}

}  // namespace detail

/// Truth of the assertion against the cast ballots, exact arithmetic, audited
/// (strict) forms throughout.
inline bool evaluate(const Assertion& assertion, const Election& el) {
  const int s1 = el.seats() + 1;
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IqAssertion>) {
          detail::check_candidate(a.c, el, "IQ candidate");
          return Rational(lower_basic(a.c, el)) * s1 > el.total_ballots();
        } else if constexpr (std::is_same_v<T, UtAssertion>) {
          detail::check_candidate(a.c, el, "UT candidate");
          if (a.cap <= 0 || a.cap >= max_transfer_value(el.seats()))
            throw std::invalid_argument("UT: cap must lie strictly in (0, S/(S+1))");
          return Rational(lower_basic(a.c, el)) * s1 * (1 - a.cap) < el.total_ballots();
        } else if constexpr (std::is_same_v<T, AgAssertion>) {
          detail::check_candidate(a.w, el, "AG winner");
          detail::check_candidate(a.l, el, "AG loser");
          if (a.w == a.l) throw std::invalid_argument("AG: w and l must differ");
          return lower_basic(a.w, el) > upper_comp(a.l, a.w, el);
        } else {
          detail::check_nl(a, el);
          return Rational(lower_elim(a.w, a.O, el)) >
                 upper_complex(a.l, a.w, a.W, a.caps, a.G, el);
        }
      },
      assertion);
}

/// Per-ballot coefficient rule f with range [lo, hi]: the audited assertion
/// holds iff the multiplicity-weighted sum of f over the ballots is positive.
struct LinearForm {
  Assertion assertion;
  int seats;
  CandidateSet all_candidates;
  Rational lo;
  Rational hi;

  Rational coeff(const Ballot& ballot) const {
    const int s1 = seats + 1;
    return std::visit(
        [&](const auto& a) -> Rational {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, IqAssertion>) {
            const bool hit = ballot.first() && *ballot.first() == a.c;
            return hit ? Rational(1) - make_rational(1, s1) : -make_rational(1, s1);
          } else if constexpr (std::is_same_v<T, UtAssertion>) {
            const Rational scale = Rational(1) / (Rational(1) - a.cap);  // 1/(1-cap)
            const bool hit = ballot.first() && *ballot.first() == a.c;
            return scale / s1 - (hit ? 1 : 0);
          } else if constexpr (std::is_same_v<T, AgAssertion>) {
            if (const auto f = ballot.first(); f && *f == a.w) return Rational(1);
            const auto p = first_of_projection(ballot.prefs,
                                               CandidateSet().with(a.w).with(a.l));
            if (p && *p == a.l) return Rational(-1);
            return Rational(0);
          } else {
            Rational v(0);
            const auto p = first_of_projection(ballot.prefs, all_candidates - a.O);
            if (p && *p == a.w) v += 1;
            v -= detail::upper_complex_ballot(ballot.prefs, a.l, a.w, a.W, a.caps, a.G);
            return v;
          }
        },
        assertion);
  }
};

inline LinearForm to_linear(const Assertion& assertion, const Election& el) {
  const int s1 = el.seats() + 1;
  LinearForm f{assertion, el.seats(), el.candidate_set(), Rational(0), Rational(0)};
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IqAssertion>) {
          f.lo = -make_rational(1, s1);
          f.hi = Rational(1) - make_rational(1, s1);
        } else if constexpr (std::is_same_v<T, UtAssertion>) {
          const Rational share = Rational(1) / ((Rational(1) - a.cap) * s1);
          f.lo = share - 1;
          f.hi = share;
        } else {
          f.lo = Rational(-1);
          f.hi = Rational(1);
        }
      },
      assertion);
  return f;
}

/// Raised when a linear form cannot be turned into an assorter because it is
/// nonnegative on every ballot (the assertion is vacuously true).
class DegenerateAssertion : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// SHANGRLA assorter: nonnegative per-ballot score whose mean over the cast
/// ballots exceeds 1/2 exactly when the source assertion holds. Neutral
/// ballots (f = 0) score exactly 1/2.
struct Assorter {
  LinearForm f;

  Rational score(const Ballot& ballot) const { return (f.coeff(ballot) - f.lo) / (-2 * f.lo); }
  Rational upper_bound() const { return (f.hi - f.lo) / (-2 * f.lo); }
};

inline Assorter to_assorter(LinearForm f) {
  if (f.lo >= 0)
    throw DegenerateAssertion("assertion is vacuously true (linear form never negative)");
  return Assorter{std::move(f)};
}

/// Mean of the assorter over every cast ballot, empty ballots included.
inline Rational assorter_mean(const Assorter& assorter, const Election& el) {
  Rational sum(0);
  for (const auto& rc : el.ballots()) sum += assorter.score(rc.ranking) * rc.count;
  return sum / el.total_ballots();
}

struct AssertionReport {
  Assertion assertion;
  bool holds_on_cvrs = false;
  Rational assorter_mean;
  Rational diluted_margin;  // 2*mean - 1; positive iff holds_on_cvrs
  Rational assorter_upper_bound;
  double asn = 0;  // +infinity when the margin is not positive
};

/// ASN oracle: margin and assorter upper bound to expected draws.
using AsnFn = std::function<double(const Rational& margin, const Rational& upper_bound)>;

inline AssertionReport make_report(const Assertion& assertion, const Election& el,
                                   const AsnFn& asn) {
  AssertionReport r;
  r.assertion = assertion;
  r.holds_on_cvrs = evaluate(assertion, el);
  const Assorter assorter = to_assorter(to_linear(assertion, el));
  r.assorter_mean = stvaudit::assorter_mean(assorter, el);
  r.diluted_margin = 2 * r.assorter_mean - 1;
  r.assorter_upper_bound = assorter.upper_bound();
  r.asn = asn(r.diluted_margin, r.assorter_upper_bound);
  return r;
}

inline std::string describe(const Assertion& assertion, const Election& el) {
  const auto names = [&](CandidateSet s) {
    std::string out = "{";
    bool first = true;
    for (CandidateId c : s.to_vector()) {
      if (!first) out += ",";
      out += el.name(c);
      first = false;
    }
    return out + "}";
  };
  return std::visit(
      [&](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, IqAssertion>) {
          os << "IQ(" << el.name(a.c) << ")";
        } else if constexpr (std::is_same_v<T, UtAssertion>) {
          os << "UT(" << el.name(a.c) << ", " << format_ratio(a.cap) << ")";
        } else if constexpr (std::is_same_v<T, AgAssertion>) {
          os << "AG(" << el.name(a.w) << ", " << el.name(a.l) << ")";
        } else {
          os << "NL(" << el.name(a.w) << ", " << el.name(a.l) << ", W=" << names(a.W)
             << ", caps={";
          bool first = true;
          for (const auto& [c, v] : a.caps.caps) {
            if (!first) os << ",";
            os << el.name(c) << ":" << format_ratio(v);
            first = false;
          }
          os << "}, G=" << names(a.G) << ", O=" << names(a.O) << ")";
        }
        return os.str();
      },
      assertion);
}

}  // namespace stvaudit
