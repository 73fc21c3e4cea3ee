#pragma once

#include "stvaudit/ballot.hpp"
#include "stvaudit/rational.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace stvaudit {

/// Largest transfer value an S-seat election can produce under the
/// unweighted Gregory method: S/(S+1).
inline Rational max_transfer_value(int seats) {
  if (seats < 1) throw std::invalid_argument("max_transfer_value: seats must be >= 1");
  return make_rational(seats, seats + 1);
}

enum class ActionKind { ElectOnQuota, Eliminate, ElectRemaining };

struct RoundAction {
  ActionKind kind;
  CandidateId candidate;
  /// (V_c - Q) / |B_c|; present exactly when kind == ElectOnQuota.
  std::optional<Rational> transfer_value;
  /// V_c - Q at seating.
  std::optional<Rational> surplus;
  /// Number of ballot papers in the pile when it was seated or eliminated.
  std::optional<long long> pile_size;
};

struct Round {
  /// Tallies of the candidates eligible at the start of the round.
  std::map<CandidateId, Rational> tallies;
  std::vector<RoundAction> actions;
};

struct TabulationRecord {
  std::vector<Round> rounds;
  /// Winners in seating order (simultaneous quota winners ordered by
  /// decreasing tally, then id; remaining-seat winners by id).
  std::vector<CandidateId> winners;
  /// Tallies of the candidates still eligible when the count stopped.
  std::map<CandidateId, Rational> final_tallies;
  /// Total ballot value that left the count through exhaustion.
  Rational exhausted;
  /// Set when an elimination or a distribution ordering was decided by
  /// candidate id between equal tallies.
  bool tie_occurred = false;

  CandidateSet winner_set() const {
    CandidateSet s;
    for (CandidateId w : winners) s.add(w);
    return s;
  }

  /// Transfer value realized when `c` was seated on a quota, if it was.
  std::optional<Rational> transfer_value_of(CandidateId c) const {
    for (const auto& round : rounds)
      for (const auto& a : round.actions)
        if (a.kind == ActionKind::ElectOnQuota && a.candidate == c)
          return a.transfer_value;
    return std::nullopt;
  }
};

/// Runs the count: first preferences at value 1; each round seats every
/// candidate at or above the quota (distributing surpluses at the Gregory
/// value, Eq-style (V_c - Q)/|B_c|) or, failing that, eliminates the lowest
/// tally; when as many eligible candidates remain as seats, they are all
/// seated. Exact rational arithmetic throughout; pure function of the input.
inline TabulationRecord tabulate(const Election& election) {
  const int nc = election.candidate_count();
  const long long quota = election.quota();
  int seats_left = election.seats();

  enum class Status { Eligible, Seated, Eliminated };
  std::vector<Status> status(nc, Status::Eligible);

  // A pile entry is a bundle of identical papers: the ranking they share,
  // the position of the candidate currently holding them, and their value.
  struct PileEntry {
    int ranking;      // index into election.ballots()
    int pos;          // position of the holder within the ranking
    long long count;
    Rational value;
  };
  std::vector<std::vector<PileEntry>> piles(nc);
  std::vector<Rational> tally(nc, Rational(0));

  TabulationRecord rec;

  const auto& rankings = election.ballots();
  for (size_t r = 0; r < rankings.size(); ++r) {
    const auto& rc = rankings[r];
    if (rc.ranking.empty()) {
      rec.exhausted += rc.count;  // empty ballots count toward |B| but hold no candidate
      continue;
    }
    const CandidateId c = rc.ranking.prefs.front();
    piles[c].push_back({static_cast<int>(r), 0, rc.count, Rational(1)});
    tally[c] += rc.count;
  }

  auto next_eligible_pos = [&](const PileEntry& e) -> int {
    const auto& prefs = rankings[e.ranking].ranking.prefs;
    for (int p = e.pos + 1; p < static_cast<int>(prefs.size()); ++p)
      if (status[prefs[p]] == Status::Eligible) return p;
    return -1;
  };

  // Moves every paper in c's pile to its next eligible preference at the
  // value already stored on the entries; exhausts papers with none.
  auto distribute_pile = [&](CandidateId c) {
    std::vector<PileEntry> pile = std::move(piles[c]);
    piles[c].clear();
    for (auto& e : pile) {
      const int p = next_eligible_pos(e);
      if (p < 0) {
        rec.exhausted += e.value * e.count;
        continue;
      }
      const CandidateId to = rankings[e.ranking].ranking.prefs[p];
      e.pos = p;
      tally[to] += e.value * e.count;
      piles[to].push_back(std::move(e));
    }
  };

  while (seats_left > 0) {
    std::vector<CandidateId> eligible;
    for (CandidateId c = 0; c < nc; ++c)
      if (status[c] == Status::Eligible) eligible.push_back(c);
    assert(static_cast<int>(eligible.size()) >= seats_left);

    Round round;
    for (CandidateId c : eligible) round.tallies.emplace(c, tally[c]);

    std::vector<CandidateId> achievers;
    for (CandidateId c : eligible)
      if (tally[c] >= quota) achievers.push_back(c);

    if (!achievers.empty()) {
      // Larger surplus distributed first; id breaks exact ties.
      std::sort(achievers.begin(), achievers.end(), [&](CandidateId a, CandidateId b) {
        if (tally[a] != tally[b]) return tally[a] > tally[b];
        return a < b;
      });
      for (size_t i = 0; i + 1 < achievers.size(); ++i)
        if (tally[achievers[i]] == tally[achievers[i + 1]]) rec.tie_occurred = true;
      assert(static_cast<int>(achievers.size()) <= seats_left);

      for (CandidateId c : achievers) status[c] = Status::Seated;
      for (CandidateId c : achievers) {
        long long pile_count = 0;
        for (const auto& e : piles[c]) pile_count += e.count;
        const Rational surplus = tally[c] - quota;
        const Rational tau = pile_count > 0 ? Rational(surplus / pile_count) : Rational(0);

        rec.winners.push_back(c);
        round.actions.push_back({ActionKind::ElectOnQuota, c, tau, surplus, pile_count});
        --seats_left;

        if (seats_left > 0) {
          for (auto& e : piles[c]) e.value = tau;
          distribute_pile(c);
        }
        // Once the last seat is filled the count stops; the final winner's
        // pile is not redistributed (it retains its full value).
      }
      rec.rounds.push_back(std::move(round));
      continue;
    }

    if (static_cast<int>(eligible.size()) == seats_left) {
      for (CandidateId c : eligible) {
        status[c] = Status::Seated;
        rec.winners.push_back(c);
        round.actions.push_back({ActionKind::ElectRemaining, c, std::nullopt, std::nullopt,
                                 std::nullopt});
        --seats_left;
      }
      rec.rounds.push_back(std::move(round));
      continue;
    }

    // No quota reached: eliminate the lowest tally, lowest id on ties.
    CandidateId low = eligible.front();
    for (CandidateId c : eligible)
      if (tally[c] < tally[low]) low = c;
    int at_min = 0;
    for (CandidateId c : eligible)
      if (tally[c] == tally[low]) ++at_min;
    if (at_min > 1) rec.tie_occurred = true;

    long long pile_count = 0;
    for (const auto& e : piles[low]) pile_count += e.count;
    round.actions.push_back({ActionKind::Eliminate, low, std::nullopt, std::nullopt, pile_count});
    status[low] = Status::Eliminated;
    distribute_pile(low);
    rec.rounds.push_back(std::move(round));
  }

  for (CandidateId c = 0; c < nc; ++c)
    if (status[c] == Status::Eligible) rec.final_tallies.emplace(c, tally[c]);

  assert(static_cast<int>(rec.winners.size()) == election.seats());
  return rec;
}

}  // namespace stvaudit
