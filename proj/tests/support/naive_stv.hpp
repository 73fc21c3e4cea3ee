#pragma once

// Straightforward per-paper STV reference count, kept deliberately separate
// from the library's grouped/incremental engine. Conventions match the
// engine: all quota achievers seat in one round (surpluses in decreasing
// tally order, id on ties), lowest id eliminated on tied minima, remaining
// candidates seated when they just fill the seats, and no redistribution
// once the last seat is taken.

#include "stvaudit/ballot.hpp"
#include "stvaudit/rational.hpp"

#include <algorithm>
#include <vector>

namespace stvaudit::testing {

struct NaiveResult {
  std::vector<CandidateId> winners;  // seating order
  Rational exhausted;
  bool tie = false;
};

inline NaiveResult naive_tabulate(const Election& el) {
  struct Paper {
    std::vector<CandidateId> prefs;
    int pos = 0;
    Rational value = Rational(1);
    bool held = false;  // sits with a seated candidate or left the count
  };

  const int nc = el.candidate_count();
  enum { kEligible, kSeated, kEliminated };
  std::vector<int> state(nc, kEligible);

  NaiveResult res;
  std::vector<Paper> papers;
  for (const auto& rc : el.ballots()) {
    for (long long i = 0; i < rc.count; ++i) {
      if (rc.ranking.empty()) {
        res.exhausted += 1;
        continue;
      }
      papers.push_back({rc.ranking.prefs, 0, Rational(1), false});
    }
  }

  int seats_left = el.seats();
  const long long quota = el.quota();

  auto holder = [&](const Paper& p) { return p.prefs[p.pos]; };
  auto tally_of = [&](CandidateId c) {
    Rational t(0);
    for (const auto& p : papers)
      if (!p.held && holder(p) == c) t += p.value;
    return t;
  };
  auto advance = [&](Paper& p) {
    while (p.pos + 1 < static_cast<int>(p.prefs.size())) {
      ++p.pos;
      if (state[holder(p)] == kEligible) return true;
    }
    return false;
  };

  while (seats_left > 0) {
    std::vector<CandidateId> eligible;
    for (CandidateId c = 0; c < nc; ++c)
      if (state[c] == kEligible) eligible.push_back(c);

    std::vector<Rational> tally(nc, Rational(0));
    for (CandidateId c : eligible) tally[c] = tally_of(c);

    std::vector<CandidateId> achievers;
    for (CandidateId c : eligible)
      if (tally[c] >= quota) achievers.push_back(c);

    if (!achievers.empty()) {
      std::sort(achievers.begin(), achievers.end(), [&](CandidateId a, CandidateId b) {
        return tally[a] != tally[b] ? tally[a] > tally[b] : a < b;
      });
      for (size_t i = 0; i + 1 < achievers.size(); ++i)
        if (tally[achievers[i]] == tally[achievers[i + 1]]) res.tie = true;
      for (CandidateId c : achievers) state[c] = kSeated;
      for (CandidateId c : achievers) {
        res.winners.push_back(c);
        --seats_left;
        if (seats_left == 0) break;
        long long pile = 0;
        for (const auto& p : papers)
          if (!p.held && holder(p) == c) ++pile;
        const Rational tau = Rational(tally[c] - quota) / pile;
        for (auto& p : papers) {
          if (p.held || holder(p) != c) continue;
          p.value = tau;
          if (!advance(p)) {
            res.exhausted += p.value;
            p.held = true;
          }
        }
      }
      // Papers still pointing at a seated candidate are retained by them.
      for (auto& p : papers)
        if (!p.held && state[holder(p)] != kEligible) p.held = true;
      continue;
    }

    if (static_cast<int>(eligible.size()) == seats_left) {
      for (CandidateId c : eligible) {
        state[c] = kSeated;
        res.winners.push_back(c);
        --seats_left;
      }
      continue;
    }

    CandidateId low = eligible.front();
    int ties = 0;
    for (CandidateId c : eligible)
      if (tally[c] < tally[low]) low = c;
    for (CandidateId c : eligible)
      if (tally[c] == tally[low]) ++ties;
    if (ties > 1) res.tie = true;
    state[low] = kEliminated;
    for (auto& p : papers) {
      if (p.held || holder(p) != low) continue;
      if (!advance(p)) {
        res.exhausted += p.value;
        p.held = true;
      }
    }
  }

  return res;
}

}  // namespace stvaudit::testing
