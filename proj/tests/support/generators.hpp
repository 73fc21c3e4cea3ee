#pragma once

// Exhaustive and random election generators plus ballot perturbation,
// shared by the property suites and the acceptance suite.

#include "stvaudit/ballot.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace stvaudit::testing {

inline std::vector<std::string> candidate_names(int nc) {
  static const std::vector<std::string> pool{"a", "b", "c", "d", "e", "f", "g", "h"};
  return {pool.begin(), pool.begin() + nc};
}

/// Every ranking over nc candidates (all ordered arrangements of all subsets),
/// by length then lexicographically. include_empty adds the empty ranking.
inline std::vector<std::vector<CandidateId>> all_rankings(int nc, bool include_empty = true,
                                                          int min_len = 1, int max_len = -1) {
  if (max_len < 0) max_len = nc;
  std::vector<std::vector<CandidateId>> out;
  if (include_empty && min_len <= 0) out.push_back({});
  std::vector<CandidateId> current;
  std::vector<bool> used(nc, false);
  std::function<void(int)> rec = [&](int len) {
    if (static_cast<int>(current.size()) >= std::max(1, min_len) &&
        static_cast<int>(current.size()) == len)
      out.push_back(current);
    if (static_cast<int>(current.size()) == len) return;
    for (CandidateId c = 0; c < nc; ++c) {
      if (used[c]) continue;
      used[c] = true;
      current.push_back(c);
      rec(len);
      current.pop_back();
      used[c] = false;
    }
  };
  for (int len = std::max(1, min_len); len <= max_len; ++len) rec(len);
  if (include_empty && min_len > 0) out.insert(out.begin(), {});
  return out;
}

/// Calls fn(Election) for every multiset of the given ranking types with a
/// total ballot count between 1 and max_total.
template <class Fn>
inline void enumerate_elections(int nc, int seats,
                                const std::vector<std::vector<CandidateId>>& types,
                                int max_total, Fn&& fn) {
  const auto names = candidate_names(nc);
  std::vector<int> counts(types.size(), 0);
  std::function<void(size_t, int)> rec = [&](size_t idx, int remaining) {
    if (idx == types.size()) {
      std::vector<RankingCount> ballots;
      for (size_t i = 0; i < types.size(); ++i)
        if (counts[i] > 0) ballots.push_back({Ballot{types[i]}, counts[i]});
      if (ballots.empty()) return;
      fn(Election::create(names, seats, std::move(ballots)));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[idx] = c;
      rec(idx + 1, remaining - c);
    }
    counts[idx] = 0;
  };
  rec(0, max_total);
}

inline std::vector<CandidateId> random_ranking(std::mt19937_64& rng, int nc, bool allow_empty) {
  std::uniform_int_distribution<int> len_dist(allow_empty ? 0 : 1, nc);
  const int len = len_dist(rng);
  std::vector<CandidateId> ids(nc);
  for (int i = 0; i < nc; ++i) ids[i] = i;
  for (int i = 0; i < len; ++i) {
    std::uniform_int_distribution<int> pick(i, nc - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(len);
  return ids;
}

inline Election random_election(std::mt19937_64& rng, int max_nc, long long max_ballots,
                                int seats = 2) {
  std::uniform_int_distribution<int> nc_dist(std::max(2, seats), max_nc);
  const int nc = nc_dist(rng);
  std::uniform_int_distribution<int> distinct_dist(1, std::min<int>(8, 2 * nc));
  const int distinct = distinct_dist(rng);
  std::uniform_int_distribution<long long> total_dist(1, max_ballots);

  std::map<std::vector<CandidateId>, long long> counts;
  long long total = total_dist(rng);
  long long assigned = 0;
  for (int i = 0; i < distinct && assigned < total; ++i) {
    std::uniform_int_distribution<long long> chunk(1, total - assigned);
    const long long n = i + 1 == distinct ? total - assigned : chunk(rng);
    counts[random_ranking(rng, nc, true)] += n;
    assigned += n;
  }
  std::vector<RankingCount> ballots;
  for (auto& [prefs, count] : counts) ballots.push_back({Ballot{prefs}, count});
  return Election::create(candidate_names(nc), seats, std::move(ballots));
}

/// Same candidates, same seats, same |B|; `edits` ballots redrawn or locally
/// edited. Edits mix adjacent swaps, truncation, substitution by a fresh
/// random ranking, and copying another cast ballot.
inline Election perturb(const Election& el, std::mt19937_64& rng, long long edits) {
  std::vector<std::vector<CandidateId>> papers;
  for (const auto& rc : el.ballots())
    for (long long i = 0; i < rc.count; ++i) papers.push_back(rc.ranking.prefs);
  const int nc = el.candidate_count();
  const long long n = static_cast<long long>(papers.size());
  std::uniform_int_distribution<long long> pos(0, n - 1);

  for (long long e = 0; e < edits; ++e) {
    auto& prefs = papers[pos(rng)];
    std::uniform_int_distribution<int> kind_dist(0, 3);
    switch (kind_dist(rng)) {
      case 0:
        if (prefs.size() >= 2) {
          std::uniform_int_distribution<size_t> at(0, prefs.size() - 2);
          const size_t i = at(rng);
          std::swap(prefs[i], prefs[i + 1]);
        }
        break;
      case 1:
        if (!prefs.empty()) {
          std::uniform_int_distribution<size_t> keep(0, prefs.size() - 1);
          prefs.resize(keep(rng));
        }
        break;
      case 2:
        prefs = random_ranking(rng, nc, true);
        break;
      default:
        prefs = papers[pos(rng)];
        break;
    }
  }

  std::map<std::vector<CandidateId>, long long> merged;
  for (auto& p : papers) ++merged[std::move(p)];
  std::vector<RankingCount> ballots;
  for (auto& [prefs, count] : merged) ballots.push_back({Ballot{prefs}, count});
  return Election::create(el.names(), el.seats(), std::move(ballots));
}

}  // namespace stvaudit::testing
