#pragma once

#include "stvaudit/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stvaudit {

/// Candidates are dense integer ids 0..n-1; names live on the Election.
using CandidateId = int;

/// Small set of candidate ids. Elections are capped at 64 candidates, which
/// comfortably covers real contests and keeps set operations branch-free.
class CandidateSet {
 public:
  CandidateSet() = default;
  explicit CandidateSet(std::uint64_t bits) : bits_(bits) {}
  static CandidateSet all(int count) {
    return CandidateSet(count >= 64 ? ~0ull : ((1ull << count) - 1));
  }

  bool contains(CandidateId c) const { return (bits_ >> c) & 1ull; }
  void add(CandidateId c) { bits_ |= 1ull << c; }
  void remove(CandidateId c) { bits_ &= ~(1ull << c); }
  CandidateSet with(CandidateId c) const { CandidateSet s = *this; s.add(c); return s; }
  CandidateSet without(CandidateId c) const { CandidateSet s = *this; s.remove(c); return s; }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcountll(bits_); }
  std::uint64_t bits() const { return bits_; }
  bool operator==(const CandidateSet&) const = default;

  CandidateSet operator&(CandidateSet o) const { return CandidateSet(bits_ & o.bits_); }
  CandidateSet operator|(CandidateSet o) const { return CandidateSet(bits_ | o.bits_); }
  CandidateSet operator-(CandidateSet o) const { return CandidateSet(bits_ & ~o.bits_); }

  std::vector<CandidateId> to_vector() const {
    std::vector<CandidateId> v;
    for (std::uint64_t b = bits_; b;) {
      const int c = __builtin_ctzll(b);
      v.push_back(c);
      b &= b - 1;
    }
    return v;
  }

 private:
  std::uint64_t bits_ = 0;
};

/// A preference sequence, most preferred first. May be empty or partial;
/// duplicates are invalid and rejected at construction/parse time.
struct Ballot {
  std::vector<CandidateId> prefs;

  bool empty() const { return prefs.empty(); }
  std::optional<CandidateId> first() const {
    if (prefs.empty()) return std::nullopt;
    return prefs.front();
  }
  bool mentions(CandidateId c) const {
    return std::find(prefs.begin(), prefs.end(), c) != prefs.end();
  }
  bool operator==(const Ballot&) const = default;
};

/// Largest subsequence of `prefs` containing only members of `keep`,
/// relative order preserved.
inline std::vector<CandidateId> project(const std::vector<CandidateId>& prefs,
                                        CandidateSet keep) {
  std::vector<CandidateId> out;
  out.reserve(prefs.size());
  for (CandidateId c : prefs)
    if (keep.contains(c)) out.push_back(c);
  return out;
}

inline Ballot project(const Ballot& ballot, CandidateSet keep) {
  return Ballot{project(ballot.prefs, keep)};
}

/// First element of the projection onto `keep`, without materializing it.
inline std::optional<CandidateId> first_of_projection(
    const std::vector<CandidateId>& prefs, CandidateSet keep) {
  for (CandidateId c : prefs)
    if (keep.contains(c)) return c;
  return std::nullopt;
}

/// Droop quota: floor(totalBallots / (seats + 1)) + 1.
inline long long droop_quota(long long total_ballots, int seats) {
  if (seats < 1) throw std::invalid_argument("droop_quota: seats must be >= 1");
  if (total_ballots < 0) throw std::invalid_argument("droop_quota: negative ballot count");
  return total_ballots / (seats + 1) + 1;
}

/// One distinct ranking with its multiplicity. Ballot files aggregate, and
/// every bound is linear in multiplicity, so the expanded form is never stored.
struct RankingCount {
  Ballot ranking;
  long long count = 0;
  bool operator==(const RankingCount&) const = default;
};

/// An STV election: candidate names, aggregated ballots, seat count and quota.
/// Immutable after construction; share freely across threads.
class Election {
 public:
  static constexpr int kMaxCandidates = 64;

  /// Validates every invariant and computes the quota. Throws
  /// std::invalid_argument on violation.
  static Election create(std::vector<std::string> names, int seats,
                         std::vector<RankingCount> ballots) {
    Election el;
    if (names.empty()) throw std::invalid_argument("election needs at least one candidate");
    if (static_cast<int>(names.size()) > kMaxCandidates)
      throw std::invalid_argument("more than 64 candidates are not supported");
    for (size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty()) throw std::invalid_argument("candidate name must be non-empty");
      for (size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j])
          throw std::invalid_argument("duplicate candidate name: " + names[i]);
    }
    if (seats < 1) throw std::invalid_argument("seats must be >= 1");
    if (seats > static_cast<int>(names.size()))
      throw std::invalid_argument("seats exceed candidate count");

    const int nc = static_cast<int>(names.size());
    long long total = 0;
    std::vector<RankingCount> merged;
    for (auto& rc : ballots) {
      if (rc.count <= 0) throw std::invalid_argument("ballot count must be positive");
      CandidateSet seen;
      for (CandidateId c : rc.ranking.prefs) {
        if (c < 0 || c >= nc) throw std::invalid_argument("ballot references unknown candidate");
        if (seen.contains(c)) throw std::invalid_argument("duplicate candidate within a ranking");
        seen.add(c);
      }
      total += rc.count;
      auto it = std::find_if(merged.begin(), merged.end(), [&](const RankingCount& m) {
        return m.ranking == rc.ranking;
      });
      if (it != merged.end())
        it->count += rc.count;
      else
        merged.push_back(std::move(rc));
    }
    if (total < 1) throw std::invalid_argument("election needs at least one ballot");

    el.names_ = std::move(names);
    el.seats_ = seats;
    el.ballots_ = std::move(merged);
    el.total_ = total;
    el.quota_ = droop_quota(total, seats);
    return el;
  }

  int candidate_count() const { return static_cast<int>(names_.size()); }
  CandidateSet candidate_set() const { return CandidateSet::all(candidate_count()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(CandidateId c) const { return names_.at(c); }
  std::optional<CandidateId> index_of(std::string_view name) const {
    for (size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<CandidateId>(i);
    return std::nullopt;
  }

  int seats() const { return seats_; }
  long long quota() const { return quota_; }
  long long total_ballots() const { return total_; }
  const std::vector<RankingCount>& ballots() const { return ballots_; }

  long long empty_ballot_count() const {
    long long n = 0;
    for (const auto& rc : ballots_)
      if (rc.ranking.empty()) n += rc.count;
    return n;
  }

 private:
  Election() = default;
  std::vector<std::string> names_;
  int seats_ = 0;
  std::vector<RankingCount> ballots_;
  long long total_ = 0;
  long long quota_ = 0;
};

}  // namespace stvaudit
