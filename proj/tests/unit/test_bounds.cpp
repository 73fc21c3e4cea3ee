#include "stvaudit/assertions.hpp"
#include "stvaudit/bounds.hpp"
#include "stvaudit/parse.hpp"
#include "stvaudit/tabulate.hpp"

#include "../support/brute_bounds.hpp"
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

// candidate ids in the fixtures: c1=0, c2=1, c3=2, c4=3.
constexpr CandidateId kC1 = 0, kC2 = 1, kC3 = 2, kC4 = 3;

}  // namespace

TEST_CASE("first-preference and mention counts") {
  const Election ex1 = load_fixture("example1.ballots");
  CHECK(lower_basic(kC1, ex1) == 9001);
  CHECK(lower_basic(kC2, ex1) == 3000);
  CHECK(lower_basic(kC3, ex1) == 5000);
  CHECK(lower_basic(kC4, ex1) == 4000);

  CHECK(upper_basic(kC3, ex1) == 16001);  // 8001 + 3000 + 5000
  CHECK(upper_basic(kC1, ex1) == 13001);  // 8001 + 1000 + 4000

  const Election lone = Election::create({"x", "y"}, 1, {{Ballot{{0}}, 3}});
  CHECK(lower_basic(1, lone) == 0);
  CHECK(upper_basic(1, lone) == 0);
}

TEST_CASE("comparative upper bound") {
  const Election ex1 = load_fixture("example1.ballots");
  // Values recomputed per the definition (ballots where the first of the
  // projection onto the pair is the bounded candidate).
  CHECK(upper_comp(kC2, kC1, ex1) == 3000);   // only [c2,c3,c4]
  CHECK(upper_comp(kC2, kC4, ex1) == 3000);   // only [c2,c3,c4]
  CHECK(upper_comp(kC3, kC1, ex1) == 8000);   // [c2,c3,c4] + [c3,c4]
  CHECK(upper_comp(kC4, kC1, ex1) == 12000);  // [c2,c3,c4] + [c3,c4] + [c4,c1,c2]
  CHECK(upper_comp(kC4, kC3, ex1) == 4000);   // only [c4,c1,c2]
  CHECK(upper_comp(kC1, kC2, ex1) == 13001);
  CHECK(upper_comp(kC1, kC4, ex1) == 9001);
  CHECK_THROWS_AS(upper_comp(kC1, kC1, ex1), std::invalid_argument);

  for (CandidateId c = 0; c < 4; ++c)
    for (CandidateId cp = 0; cp < 4; ++cp) {
      if (c == cp) continue;
      CHECK(upper_comp(c, cp, ex1) == st::brute_upper_comp(c, cp, ex1));
      CHECK(lower_basic(c, ex1) <= upper_comp(c, cp, ex1));
      CHECK(upper_comp(c, cp, ex1) <= upper_basic(c, ex1));
    }
}

TEST_CASE("elimination-point lower bound") {
  const Election ex1 = load_fixture("example1.ballots");
  CHECK(lower_elim(kC3, CandidateSet().with(kC2), ex1) == 8000);  // 3000 + 5000
  CHECK(lower_elim(kC3, CandidateSet{}, ex1) == lower_basic(kC3, ex1));
  CHECK(lower_elim(kC1, CandidateSet().with(kC2), ex1) == 9001);
  CHECK(lower_elim(kC1, CandidateSet().with(kC2).with(kC3), ex1) == 9001);
  CHECK_THROWS_AS(lower_elim(kC1, CandidateSet().with(kC1), ex1), std::invalid_argument);

  SECTION("nondecreasing as the excluded set grows") {
    for (CandidateId w = 0; w < 4; ++w)
      for (std::uint64_t bits = 0; bits < 16; ++bits) {
        CandidateSet O(bits);
        if (O.contains(w)) continue;
        const long long base = lower_elim(w, O, ex1);
        CHECK(base == st::brute_lower_elim(w, O, ex1));
        for (CandidateId extra = 0; extra < 4; ++extra) {
          if (extra == w || O.contains(extra)) continue;
          CHECK(lower_elim(w, O.with(extra), ex1) >= base);
        }
      }
  }
}

TEST_CASE("complex upper bound: worked 60-ballot example") {
  const Election ex2 = load_fixture("example2.ballots");
  const TransferCap caps{{{kC1, make_rational(3, 10)}}};
  // 30 ballots [c1,c2] at cap 0.3 contribute 9; [c3,c1,c2] pass at full
  // value (4); [c2,c4] count 2; [c4,c1,c2] blocked by b = c4.
  const Rational u =
      upper_complex(kC2, kC4, CandidateSet().with(kC1), caps, CandidateSet{}, ex2);
  CHECK(u == 15);
  CHECK(lower_elim(kC4, CandidateSet{}, ex2) == 20);
}

TEST_CASE("complex upper bound: blocked piles and caps") {
  const Election ex1 = load_fixture("example1.ballots");
  // G containing c4 zeroes the 4000 [c4,c1,c2] ballots regardless of the cap.
  for (const Rational& cap : {Rational(0), make_rational(1, 3), make_rational(2, 3)}) {
    const Rational u = upper_complex(kC2, kC3, CandidateSet().with(kC1), TransferCap{{{kC1, cap}}},
                                     CandidateSet().with(kC1).with(kC4), ex1);
    CHECK(u == 3000);
  }

  SECTION("preconditions") {
    const TransferCap caps{{{kC1, make_rational(2, 3)}}};
    CHECK_THROWS_AS(upper_complex(kC2, kC2, CandidateSet().with(kC1), caps, {}, ex1),
                    std::invalid_argument);
    CHECK_THROWS_AS(upper_complex(kC1, kC2, CandidateSet().with(kC1), caps, {}, ex1),
                    std::invalid_argument);
    CHECK_THROWS_AS(upper_complex(kC2, kC1, CandidateSet().with(kC1), caps, {}, ex1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        upper_complex(kC2, kC3, CandidateSet().with(kC1).with(kC4), caps, {}, ex1),
        std::invalid_argument);
    CHECK_THROWS_AS(upper_complex(kC2, kC3, CandidateSet().with(kC1),
                                  TransferCap{{{kC1, Rational(1)}}}, {}, ex1),
                    std::invalid_argument);
  }
}

TEST_CASE("complex upper bound: monotone in caps, antitone in G") {
  std::mt19937_64 rng(41);
  int checked = 0;
  while (checked < 60) {
    const Election el = st::random_election(rng, 5, 40, 2);
    const int nc = el.candidate_count();
    std::uniform_int_distribution<CandidateId> pick(0, nc - 1);
    const CandidateId c = pick(rng), b = pick(rng), w = pick(rng);
    if (c == b || c == w || b == w) continue;
    ++checked;
    const CandidateSet W = CandidateSet().with(w);
    CandidateSet G;
    for (CandidateId g = 0; g < nc; ++g)
      if (g != c && (rng() & 1)) G.add(g);

    Rational prev(-1);
    for (int i = 0; i <= 4; ++i) {
      const Rational cap = make_rational(i, 6);  // 0 .. 2/3
      const Rational u = upper_complex(c, b, W, TransferCap{{{w, cap}}}, G, el);
      CHECK(u == st::brute_upper_complex(c, b, W, TransferCap{{{w, cap}}}, G, el));
      if (prev >= 0) CHECK(u >= prev);
      prev = u;
    }

    const TransferCap caps{{{w, make_rational(1, 3)}}};
    const Rational with_g = upper_complex(c, b, W, caps, G, el);
    for (CandidateId g : G.to_vector()) {
      const Rational without = upper_complex(c, b, W, caps, G.without(g), el);
      CHECK(with_g <= without);
    }
  }
}

TEST_CASE("complex bound dominates the realized tally when its assumptions hold") {
  // Semantic soundness sweep: enumerate small elections, take W as everyone
  // seated except (b,c), caps at the realized transfer values, G maximal.
  long long elections = 0, comparisons = 0;
  st::enumerate_elections(3, 2, st::all_rankings(3), 5, [&](const Election& el) {
    ++elections;
    const TabulationRecord rec = tabulate(el);
    const CandidateSet winners = rec.winner_set();
    const int nc = el.candidate_count();
    for (CandidateId c = 0; c < nc; ++c) {
      for (CandidateId b = 0; b < nc; ++b) {
        if (c == b) continue;
        const CandidateSet W = winners.without(b).without(c);
        TransferCap caps;
        for (CandidateId w : W.to_vector()) {
          const auto tau = rec.transfer_value_of(w);
          caps.caps[w] = tau ? *tau : Rational(0);
        }
        CandidateSet G;
        for (CandidateId g = 0; g < nc; ++g)
          if (g != c && evaluate(Assertion(AgAssertion{g, c}), el)) G.add(g);

        const Rational bound = upper_complex(c, b, W, caps, G, el);
        // Whenever b is still eligible in a round, c's tally is covered.
        for (const auto& round : rec.rounds) {
          if (!round.tallies.count(b)) continue;
          const auto it = round.tallies.find(c);
          if (it == round.tallies.end()) continue;
          ++comparisons;
          REQUIRE(it->second <= bound);
        }
      }
    }
  });
  CHECK(elections > 10000);
  CHECK(comparisons > 20000);
}
