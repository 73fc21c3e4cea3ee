#include "stvaudit/assertions.hpp"
#include "stvaudit/parse.hpp"
#include "stvaudit/risk.hpp"
#include "stvaudit/tabulate.hpp"

#include "../support/generators.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace stvaudit;
namespace st = stvaudit::testing;

namespace {

Election load_fixture(const std::string& name) {
  std::ifstream in(std::string(STVAUDIT_TEST_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_election_text(ss.str());
}

constexpr CandidateId kC1 = 0, kC2 = 1, kC3 = 2, kC4 = 3;

Rational linear_sum(const LinearForm& f, const Election& el) {
  Rational sum(0);
  for (const auto& rc : el.ballots()) sum += f.coeff(rc.ranking) * rc.count;
  return sum;
}

Assertion random_assertion(std::mt19937_64& rng, const Election& el) {
  const int nc = el.candidate_count();
  std::uniform_int_distribution<CandidateId> pick(0, nc - 1);
  std::uniform_int_distribution<int> kind(0, 3);
  while (true) {
    switch (kind(rng)) {
      case 0:
        return IqAssertion{pick(rng)};
      case 1: {
        std::uniform_int_distribution<int> num(1, 5);
        return UtAssertion{pick(rng), make_rational(num(rng), 9)};  // 1/9 .. 5/9 < 2/3
      }
      case 2: {
        const CandidateId w = pick(rng), l = pick(rng);
        if (w == l) continue;
        return AgAssertion{w, l};
      }
      default: {
        const CandidateId w = pick(rng), l = pick(rng), seated = pick(rng);
        if (w == l || w == seated || l == seated) continue;
        std::uniform_int_distribution<int> num(0, 6);
        TransferCap caps{{{seated, make_rational(num(rng), 9)}}};
        CandidateSet g, o;
        for (CandidateId c = 0; c < nc; ++c) {
          if (c != l && c != seated && (rng() & 1)) g.add(c);
          if (c != w && c != seated && (rng() & 1)) o.add(c);
        }
        return NlAssertion{w, l, CandidateSet().with(seated), caps, g, o};
      }
    }
  }
}

}  // namespace

TEST_CASE("evaluate: worked examples") {
  const Election ex1 = load_fixture("example1.ballots");
  CHECK(evaluate(Assertion(IqAssertion{kC1}), ex1));       // 9001 >= 7001
  CHECK_FALSE(evaluate(Assertion(IqAssertion{kC3}), ex1));  // 5000 < 7001
  CHECK(evaluate(Assertion(AgAssertion{kC1, kC2}), ex1));   // 9001 > 3000
  CHECK(evaluate(Assertion(AgAssertion{kC1, kC3}), ex1));   // 9001 > 8000
  CHECK_FALSE(evaluate(Assertion(AgAssertion{kC1, kC4}), ex1));  // 9001 < 12000

  const Election ex2 = load_fixture("example2.ballots");
  const NlAssertion nl{kC4, kC2, CandidateSet().with(kC1),
                       TransferCap{{{kC1, make_rational(3, 10)}}}, CandidateSet{},
                       CandidateSet{}};
  CHECK(evaluate(Assertion(nl), ex2));  // 20 > 15
  CHECK_FALSE(evaluate(Assertion(AgAssertion{kC4, kC2}), ex2));

  CHECK_THROWS_AS(evaluate(Assertion(IqAssertion{9}), ex1), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(Assertion(AgAssertion{kC1, kC1}), ex1), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(Assertion(UtAssertion{kC1, make_rational(2, 3)}), ex1),
                  std::invalid_argument);
}

TEST_CASE("linear sums on the worked profile") {
  const Election ex1 = load_fixture("example1.ballots");

  const LinearForm iq = to_linear(Assertion(IqAssertion{kC1}), ex1);
  CHECK(linear_sum(iq, ex1) == Rational(9001) - make_rational(21001, 3));
  CHECK(iq.lo == make_rational(-1, 3));
  CHECK(iq.hi == make_rational(2, 3));

  const LinearForm ag13 = to_linear(Assertion(AgAssertion{kC1, kC3}), ex1);
  CHECK(linear_sum(ag13, ex1) == 1001);  // 9001 - 8000
  const LinearForm ag12 = to_linear(Assertion(AgAssertion{kC1, kC2}), ex1);
  CHECK(linear_sum(ag12, ex1) == 6001);  // 9001 - 3000

  const Election ex2 = load_fixture("example2.ballots");
  const NlAssertion nl{kC4, kC2, CandidateSet().with(kC1),
                       TransferCap{{{kC1, make_rational(3, 10)}}}, CandidateSet{},
                       CandidateSet{}};
  const LinearForm nlf = to_linear(Assertion(nl), ex2);
  CHECK(linear_sum(nlf, ex2) == 5);  // 20 - 15
  CHECK(nlf.lo == Rational(-1));
  CHECK(nlf.hi == Rational(1));
}

TEST_CASE("assorter construction and scores") {
  const Election ex1 = load_fixture("example1.ballots");

  SECTION("always-greater scores are 1, 1/2, 0") {
    const Assorter a = to_assorter(to_linear(Assertion(AgAssertion{kC1, kC3}), ex1));
    CHECK(a.score(Ballot{{kC1}}) == Rational(1));
    CHECK(a.score(Ballot{{kC2}}) == make_rational(1, 2));  // neutral
    CHECK(a.score(Ballot{{}}) == make_rational(1, 2));     // empty is neutral
    CHECK(a.score(Ballot{{kC3, kC1}}) == Rational(0));
    CHECK(a.upper_bound() == Rational(1));
    CHECK(assorter_mean(a, ex1) == (make_rational(1001, 21001) + 1) / 2);
  }

  SECTION("degenerate forms are rejected") {
    LinearForm f = to_linear(Assertion(AgAssertion{kC1, kC3}), ex1);
    f.lo = Rational(0);
    CHECK_THROWS_AS(to_assorter(f), DegenerateAssertion);
  }

  SECTION("mean is exactly 1/2 when every coefficient is zero") {
    // AG between two candidates no ballot mentions.
    const Election pad = Election::create({"x", "y", "z"}, 1, {{Ballot{{0}}, 4}});
    const Assorter a = to_assorter(to_linear(Assertion(AgAssertion{1, 2}), pad));
    CHECK(assorter_mean(a, pad) == make_rational(1, 2));
    CHECK_FALSE(evaluate(Assertion(AgAssertion{1, 2}), pad));
  }
}

TEST_CASE("reports tie margins to truth") {
  const Election ex1 = load_fixture("example1.ballots");
  const AsnFn asn = [](const Rational& margin, const Rational&) {
    return margin > 0 ? 42.0 : kInfiniteAsn;
  };

  const AssertionReport good = make_report(Assertion(AgAssertion{kC1, kC3}), ex1, asn);
  CHECK(good.holds_on_cvrs);
  CHECK(good.diluted_margin == make_rational(1001, 21001));
  CHECK(good.asn == 42.0);

  const AssertionReport bad = make_report(Assertion(AgAssertion{kC4, kC1}), ex1, asn);
  CHECK_FALSE(bad.holds_on_cvrs);
  CHECK(bad.diluted_margin < 0);
  CHECK(std::isinf(bad.asn));
}

TEST_CASE("equivalence: evaluate iff assorter mean exceeds 1/2") {
  std::mt19937_64 rng(97);
  int checked = 0;
  while (checked < 4000) {
    const Election el = st::random_election(rng, 5, 60, 2);
    const Assertion a = random_assertion(rng, el);
    ++checked;
    const bool truth = evaluate(a, el);
    const Assorter assorter = to_assorter(to_linear(a, el));
    const Rational mean = assorter_mean(assorter, el);
    REQUIRE(truth == (mean > make_rational(1, 2)));
    // Scores stay within [0, upper bound].
    for (const auto& rc : el.ballots()) {
      const Rational s = assorter.score(rc.ranking);
      REQUIRE(s >= 0);
      REQUIRE(s <= assorter.upper_bound());
    }
  }
}

TEST_CASE("audited quota form matches the integer quota comparison") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 2000; ++i) {
    const Election el = st::random_election(rng, 5, 50, 2);
    for (CandidateId c = 0; c < el.candidate_count(); ++c) {
      const bool audited = evaluate(Assertion(IqAssertion{c}), el);
      CHECK(audited == (lower_basic(c, el) >= el.quota()));
    }
  }
}

TEST_CASE("UT audited form bounds the realized transfer value") {
  std::mt19937_64 rng(103);
  int confirmed = 0;
  while (confirmed < 500) {
    const Election el = st::random_election(rng, 4, 40, 2);
    const TabulationRecord rec = tabulate(el);
    for (CandidateId c = 0; c < el.candidate_count(); ++c) {
      if (lower_basic(c, el) < el.quota()) continue;  // UT paired with an initial quota
      const auto tau = rec.transfer_value_of(c);
      if (!tau) continue;
      for (int num = 1; num <= 5; ++num) {
        const Rational cap = make_rational(num, 9);
        if (evaluate(Assertion(UtAssertion{c, cap}), el)) {
          REQUIRE(*tau < cap);
          ++confirmed;
        }
      }
    }
  }
}
