// Mean and variance of the signed attention-score sum for XOR_alpha tasks
// with beta irrelevant Bernoulli(p) bits, plus exhaustive and Monte-Carlo
// oracles for those moments.
//
// Setting: the query is fixed to a positive-class pattern. Every one of the
// 2^alpha active patterns appears r times in the support; item i contributes
// s_i * exp(tau * score(query, x_i)) with s_i = +1 for same-class items.
//
// Each feature adds a "match" or "mismatch" exponent to the score:
//   Dot (+/-1)           active +/-1,        irrelevant +/-1
//   Cosine (+/-1)        active +/-1/alpha,  irrelevant +/-1
//   SqEuclidean (1/0)    active 0 / -1,      irrelevant 0 / -1
//   Laplace              same as SqEuclidean on 1/0 codes
// Cosine normalises the active block only and keeps the irrelevant bits on
// the dot-product scale, which is the model the closed forms describe.
//
// Moments are evaluated in log space. ScoreStats::mean and ::variance
// overflow to +inf once their logs pass ~709.78; log_mean and log_variance
// stay finite.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyselect/core.hpp"
#include "polyselect/kernels.hpp"

namespace polyselect {

struct TheoryParams {
  std::size_t alpha = 1;
  std::size_t beta_irrelevant = 0;
  double p = 0.5;
  std::size_t r = 1;
  KernelKind kernel = KernelKind::Dot;
  double tau_inv = 1.0;

  /// Throws DomainError unless alpha >= 1, p in [0,1], r >= 1 and tau > 0.
  void validate() const;
  /// PlusMinus for Dot/Cosine, ZeroOne for SqEuclidean/Laplace.
  EncodingScheme encoding() const;
};

struct ScoreStats {
  double mean = 0.0;
  double variance = 0.0;
  double log_mean = 0.0;
  /// -inf when the variance is exactly zero.
  double log_variance = 0.0;
};

/// Probability that an irrelevant bit matches between two examples.
double pbar(double p);
double qbar(double p);

/// Per-feature score exponents (already multiplied by tau).
struct FeatureExponents {
  double active_match;
  double active_mismatch;
  double irrelevant_match;
  double irrelevant_mismatch;
};
FeatureExponents feature_exponents(const TheoryParams& params);

/// Score of one query/support pair under the theory's kernel model, before
/// tau. `active` lists the active coordinates (used by Cosine only).
double theory_score(KernelKind kind, std::span<const double> q, std::span<const double> s,
                    std::span<const std::size_t> active);

/// E and Var of one item's exp-score at active Hamming distance delta.
double expected_score(std::size_t delta, const TheoryParams& params);
double var_score(std::size_t delta, const TheoryParams& params);

/// The closed-form constants: c and d are the per-bit first and second
/// exp-moments, h the shared-query cross moment.
struct MomentConstants {
  double c, d, h;
  double m_alpha;  // e^{a+} - e^{a-}
  double v_alpha;  // e^{2a+} + e^{2a-}
};
MomentConstants moment_constants(const TheoryParams& params);

/// Moments of the signed sum with one query shared by every support item.
/// mean = r M^alpha c^beta;
/// var  = r V^alpha (d^beta - h^beta) + r^2 M^{2 alpha} (h^beta - c^{2 beta}).
ScoreStats support_sum_stats(const TheoryParams& params);

/// The textbook form that treats the items as independent:
/// var = r V^alpha (d^beta - c^{2 beta}). Exact when every item sees its
/// own query draw, and equal to the shared form at p = 0.5.
ScoreStats independent_sum_stats(const TheoryParams& params);

/// Rejected alternative for the mean with d^beta in place of c^beta; kept
/// so the oracle comparison can be reported.
double alternative_mean(const TheoryParams& params);

enum class QueryModel { Shared, Independent };

/// Exact moments by enumerating every irrelevant-bit configuration of the
/// query and support. Requires alpha <= 4, beta <= 6, r <= 3.
ScoreStats exhaustive_stats(const TheoryParams& params, QueryModel model = QueryModel::Shared);

struct MonteCarloResult {
  double mean = 0.0;
  double variance = 0.0;
  double misclass_rate = 0.0;
  std::size_t trials = 0;
  std::size_t misclassified = 0;
  double mean_se = 0.0;
  /// Binomial standard error of misclass_rate.
  double rate_se = 0.0;
};

/// Draws tasks with gen_boolean_task (one query each, task_seed per trial)
/// and records the signed sum. A trial counts as a miss when the sum is <= 0.
MonteCarloResult mc_misclassification(const TheoryParams& params, std::size_t trials, std::uint64_t seed);

struct SnrGrowth {
  std::vector<std::size_t> betas;
  /// sigma / mu under support_sum_stats at each beta.
  std::vector<double> ratio;
  /// 0.5 * ln(d / c^2).
  double asymptotic_slope = 0.0;
  /// Slope of ln(ratio) between the last two betas; NaN if undefined.
  double fitted_slope = 0.0;
};

SnrGrowth snr_growth(const TheoryParams& params, std::span<const std::size_t> betas);

/// Decision boundary of AND under dot-product attention with tau:
/// y = -(1 / (2 tau)) ln tanh(tau x), x > 0.
double and_boundary(double tau_inv, double x);

}  // namespace polyselect
