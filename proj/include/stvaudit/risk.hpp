#pragma once

#include "stvaudit/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace stvaudit {

constexpr double kInfiniteAsn = std::numeric_limits<double>::infinity();

/// Everything estimate_asn needs about one assertion and the audit setup.
struct AsnQuery {
  Rational diluted_margin;        // 2*mean - 1 on the CVRs
  Rational assorter_upper_bound;  // max attainable assorter score
  double alpha = 0.10;            // risk limit, in (0,1)
  double error_rate = 0.002;      // expected 1-vote overstatement rate, in [0,1)
  long long total_ballots = 0;    // 0 = unknown; only bounds the simulation
};

enum class AsnMode { monte_carlo, fast };

struct RiskOptions {
  int trials = 1000;
  std::uint64_t seed = 0x5741554449545331ull;
  long long max_draws = 0;  // 0 = derive from total_ballots
};

namespace riskdetail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace riskdetail

/// Derives a decorrelated child seed (per trial, per assertion, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t x = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
  riskdetail::splitmix64(x);
  return riskdetail::splitmix64(x);
}

/// Comparison-audit overstatement assorter: B = (1 - omega/u) / (2 - v/u),
/// where omega is the overstatement (CVR score minus MVR score), u the
/// assorter upper bound and v the diluted margin. Mean of B over the ballot
/// pairs exceeds 1/2 exactly when the assertion holds on the MVRs.
inline double overstatement_score(double omega, double u, double v) {
  return (1.0 - omega / u) / (2.0 - v / u);
}

/// ALPHA-style betting supermartingale with a fixed bet lambda in [0, 2):
/// M_n = prod(1 + lambda*(B_i - 1/2)). Under a false assertion E[B] <= 1/2 and
/// P(sup M >= 1/alpha) <= alpha. The cap keeps every factor strictly positive
/// for any attainable B >= 0.
constexpr double kMaxLambda = 1.99;

/// Bet maximizing expected log growth against the two-point alternative
/// {clean B = b0 w.p. 1-eps, one-vote overstatement B = b1 w.p. eps}.
/// Returns 0 when the alternative mean does not exceed 1/2 (errors overwhelm).
inline double tuned_lambda(double b0, double b1, double eps) {
  const double a0 = b0 - 0.5;
  const double a1 = b1 - 0.5;
  if (a0 <= 0) return 0.0;
  if (eps <= 0 || a1 >= 0) return kMaxLambda;
  const double abar = (1 - eps) * a0 + eps * a1;
  if (abar <= 0) return 0.0;
  return std::clamp(-abar / (a0 * a1), 1e-9, kMaxLambda);
}

/// Per-assertion sequential test state for a running audit.
struct SequentialTest {
  double lambda = kMaxLambda;
  double log_m = 0;
  double max_log_m = 0;

  void update(double b) {
    log_m += std::log1p(lambda * (b - 0.5));
    max_log_m = std::max(max_log_m, log_m);
  }
  /// Measured risk so far: min(1, 1/sup M).
  double risk() const { return std::min(1.0, std::exp(-max_log_m)); }
  bool certified(double alpha) const { return risk() <= alpha; }
};

namespace riskdetail {

struct Scores {
  double b0;      // clean draw
  double b1;      // one-vote overstatement (omega = u/2)
  double lambda;  // tuned to the error-rate alternative
  double growth;  // expected log growth per draw under the alternative
};

inline Scores prepare(const AsnQuery& q) {
  const double u = to_double(q.assorter_upper_bound);
  const double v = to_double(q.diluted_margin);
  Scores s{};
  s.b0 = overstatement_score(0.0, u, v);
  s.b1 = overstatement_score(u / 2.0, u, v);
  s.lambda = tuned_lambda(s.b0, s.b1, q.error_rate);
  if (s.lambda <= 0) {
    s.growth = -1;
    return s;
  }
  s.growth = (1 - q.error_rate) * std::log1p(s.lambda * (s.b0 - 0.5)) +
             q.error_rate * std::log1p(s.lambda * (s.b1 - 0.5));
  return s;
}

inline void validate(const AsnQuery& q) {
  if (!(q.alpha > 0 && q.alpha < 1))
    throw std::invalid_argument("estimate_asn: alpha must lie in (0,1)");
  if (!(q.error_rate >= 0 && q.error_rate < 1))
    throw std::invalid_argument("estimate_asn: error rate must lie in [0,1)");
  if (q.assorter_upper_bound <= 0)
    throw std::invalid_argument("estimate_asn: assorter upper bound must be positive");
}

}  // namespace riskdetail

/// Expected draws for the sequential test to certify the assertion when
/// errors occur at rate eps as 1-vote overstatements. Monte-Carlo over the
/// configured risk function by default (deterministic when eps = 0); the fast
/// mode is the Wald crossing-time approximation ceil(ln(1/alpha)/g).
/// +infinity when the margin is not positive or errors overwhelm it.
inline double estimate_asn(const AsnQuery& q, AsnMode mode = AsnMode::monte_carlo,
                           const RiskOptions& opts = {}) {
  riskdetail::validate(q);
  if (q.diluted_margin <= 0) return kInfiniteAsn;
  const auto s = riskdetail::prepare(q);
  if (s.growth <= 0) return kInfiniteAsn;

  const double target = std::log(1.0 / q.alpha);
  if (mode == AsnMode::fast || q.error_rate <= 0) {
    // With eps = 0 every draw is clean and the crossing count is exact.
    return std::ceil(target / s.growth);
  }

  const long long cap = opts.max_draws > 0
                            ? opts.max_draws
                            : std::max<long long>(200000, 20 * std::max<long long>(
                                                              q.total_ballots, 1));
  const int trials = std::max(1, opts.trials);
  const double clean_step = std::log1p(s.lambda * (s.b0 - 0.5));
  const double error_step = std::log1p(s.lambda * (s.b1 - 0.5));

  double total_draws = 0;
  int escalated = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(derive_seed(opts.seed, t));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double log_m = 0;
    long long n = 0;
    while (log_m < target && n < cap) {
      ++n;
      log_m += unif(rng) < q.error_rate ? error_step : clean_step;
    }
    if (log_m < target) ++escalated;
    total_draws += static_cast<double>(n);
  }
  if (escalated * 2 > trials) return kInfiniteAsn;
  return total_draws / trials;
}

/// estimate_asn bound to an (alpha, eps, mode) configuration; the shape the
/// assertion layer consumes.
struct AsnEstimator {
  double alpha = 0.10;
  double error_rate = 0.002;
  AsnMode mode = AsnMode::monte_carlo;
  RiskOptions options{};
  long long total_ballots = 0;

  double operator()(const Rational& margin, const Rational& upper_bound) const {
    if (margin <= 0) return kInfiniteAsn;
    return estimate_asn({margin, upper_bound, alpha, error_rate, total_ballots}, mode, options);
  }
};

}  // namespace stvaudit
