#include "polyselect/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyselect/tasks.hpp"

namespace polyselect {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// ln(x^beta - y^beta) for x >= y > 0; -inf when the difference vanishes.
double log_pow_diff(double log_x, double log_y, double beta) {
  if (beta == 0.0) return kNegInf;
  const double gap = beta * (log_y - log_x);
  if (gap >= 0.0) return kNegInf;
  return beta * log_x + std::log(-std::expm1(gap));
}

ScoreStats finish(double log_mean, double log_var) {
  ScoreStats s;
  s.log_mean = log_mean;
  s.log_variance = log_var;
  s.mean = std::exp(log_mean);
  s.variance = log_var == kNegInf ? 0.0 : std::exp(log_var);
  return s;
}

}  // namespace

void TheoryParams::validate() const {
  if (alpha < 1) throw DomainError("theory: alpha must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("theory: p outside [0, 1]");
  if (r < 1) throw DomainError("theory: r must be at least 1");
  if (!(tau_inv > 0.0) || !std::isfinite(tau_inv)) throw DomainError("theory: tau must be positive and finite");
}

EncodingScheme TheoryParams::encoding() const {
  return kernel == KernelKind::Dot || kernel == KernelKind::Cosine ? EncodingScheme::PlusMinus
                                                                   : EncodingScheme::ZeroOne;
}

double pbar(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("pbar: p outside [0, 1]");
  return p * p + (1.0 - p) * (1.0 - p);
}

double qbar(double p) { return 1.0 - pbar(p); }

FeatureExponents feature_exponents(const TheoryParams& params) {
  params.validate();
  const double t = params.tau_inv;
  switch (params.kernel) {
    case KernelKind::Dot:
      return {t, -t, t, -t};
    case KernelKind::Cosine: {
      const double a = t / static_cast<double>(params.alpha);
      return {a, -a, t, -t};
    }
    case KernelKind::SqEuclidean:
    case KernelKind::Laplace:
      return {0.0, -t, 0.0, -t};
  }
  throw DomainError("theory: unknown kernel");
}

double theory_score(KernelKind kind, std::span<const double> q, std::span<const double> s,
                    std::span<const std::size_t> active) {
  if (kind != KernelKind::Cosine) return similarity(kind, q, s);
  if (q.size() != s.size()) throw DomainError("theory_score: length mismatch");
  std::vector<bool> is_active(q.size(), false);
  for (auto a : active) {
    if (a >= q.size()) throw DomainError("theory_score: active index out of range");
    is_active[a] = true;
  }
  double dot_a = 0.0, qq = 0.0, ss = 0.0, dot_i = 0.0;
  for (std::size_t f = 0; f < q.size(); ++f) {
    if (is_active[f]) {
      dot_a += q[f] * s[f];
      qq += q[f] * q[f];
      ss += s[f] * s[f];
    } else {
      dot_i += q[f] * s[f];
    }
  }
  if (qq == 0.0 || ss == 0.0) throw DomainError("theory_score: zero active block under cosine");
  return dot_a / std::sqrt(qq * ss) + dot_i;
}

MomentConstants moment_constants(const TheoryParams& params) {
  const FeatureExponents e = feature_exponents(params);
  const double pb = pbar(params.p);
  const double qb = 1.0 - pb;
  const double p = params.p;
  const double em = std::exp(e.irrelevant_match);
  const double ex = std::exp(e.irrelevant_mismatch);
  MomentConstants k{};
  k.c = pb * em + qb * ex;
  k.d = pb * em * em + qb * ex * ex;
  // Conditional exp-moment given the query bit, then averaged in square.
  const double a_on = p * em + (1.0 - p) * ex;
  const double a_off = (1.0 - p) * em + p * ex;
  k.h = p * a_on * a_on + (1.0 - p) * a_off * a_off;
  k.m_alpha = std::exp(e.active_match) - std::exp(e.active_mismatch);
  k.v_alpha = std::exp(2.0 * e.active_match) + std::exp(2.0 * e.active_mismatch);
  return k;
}

namespace {

double active_exponent(std::size_t delta, const TheoryParams& params) {
  if (delta > params.alpha) throw DomainError("theory: delta exceeds alpha");
  const FeatureExponents e = feature_exponents(params);
  return static_cast<double>(params.alpha - delta) * e.active_match + static_cast<double>(delta) * e.active_mismatch;
}

}  // namespace

double expected_score(std::size_t delta, const TheoryParams& params) {
  const MomentConstants k = moment_constants(params);
  const double beta = static_cast<double>(params.beta_irrelevant);
  return std::exp(active_exponent(delta, params) + beta * std::log(k.c));
}

double var_score(std::size_t delta, const TheoryParams& params) {
  const MomentConstants k = moment_constants(params);
  const double beta = static_cast<double>(params.beta_irrelevant);
  const double lv = log_pow_diff(std::log(k.d), 2.0 * std::log(k.c), beta);
  return lv == kNegInf ? 0.0 : std::exp(2.0 * active_exponent(delta, params) + lv);
}

ScoreStats support_sum_stats(const TheoryParams& params) {
  const MomentConstants k = moment_constants(params);
  const double a = static_cast<double>(params.alpha);
  const double beta = static_cast<double>(params.beta_irrelevant);
  const double lr = std::log(static_cast<double>(params.r));
  const double lc = std::log(k.c), ld = std::log(k.d), lh = std::log(k.h);
  const double log_mean = lr + a * std::log(k.m_alpha) + beta * lc;
  const double own = lr + a * std::log(k.v_alpha) + log_pow_diff(ld, lh, beta);
  const double cross = 2.0 * lr + 2.0 * a * std::log(k.m_alpha) + log_pow_diff(lh, 2.0 * lc, beta);
  return finish(log_mean, log_add(own, cross));
}

ScoreStats independent_sum_stats(const TheoryParams& params) {
  const MomentConstants k = moment_constants(params);
  const double a = static_cast<double>(params.alpha);
  const double beta = static_cast<double>(params.beta_irrelevant);
  const double lr = std::log(static_cast<double>(params.r));
  const double log_mean = lr + a * std::log(k.m_alpha) + beta * std::log(k.c);
  const double log_var = lr + a * std::log(k.v_alpha) + log_pow_diff(std::log(k.d), 2.0 * std::log(k.c), beta);
  return finish(log_mean, log_var);
}

double alternative_mean(const TheoryParams& params) {
  const MomentConstants k = moment_constants(params);
  return static_cast<double>(params.r) * std::pow(k.m_alpha, static_cast<double>(params.alpha)) *
         std::pow(k.d, static_cast<double>(params.beta_irrelevant));
}

ScoreStats exhaustive_stats(const TheoryParams& params, QueryModel model) {
  params.validate();
  if (params.alpha > 4 || params.beta_irrelevant > 6 || params.r > 3) {
    throw DomainError("exhaustive_stats: enumeration bound is alpha <= 4, beta <= 6, r <= 3");
  }
  const std::size_t alpha = params.alpha;
  const std::size_t beta = params.beta_irrelevant;
  const std::size_t n = alpha + beta;
  const EncodingScheme enc = params.encoding();
  const double p = params.p;
  const double r = static_cast<double>(params.r);
  std::vector<std::size_t> active(alpha);
  for (std::size_t b = 0; b < alpha; ++b) active[b] = b;

  auto weight = [&](std::size_t bits) {
    double w = 1.0;
    for (std::size_t b = 0; b < beta; ++b) w *= (bits >> b) & 1U ? p : 1.0 - p;
    return w;
  };
  auto fill = [&](std::vector<int>& bits, std::size_t pattern, std::size_t irr) {
    for (std::size_t b = 0; b < alpha; ++b) bits[b] = static_cast<int>((pattern >> b) & 1U);
    for (std::size_t b = 0; b < beta; ++b) bits[alpha + b] = static_cast<int>((irr >> b) & 1U);
  };

  const std::size_t patterns = std::size_t{1} << alpha;
  const std::size_t configs = std::size_t{1} << beta;
  // The query's active block is all ones: a positive-class pattern.
  const std::size_t query_pattern = patterns - 1;
  std::vector<int> qbits(n), sbits(n);
  std::vector<double> sign(patterns);
  {
    fill(qbits, query_pattern, 0);
    const auto qv = encode_bits(qbits, EncodingScheme::PlusMinus);
    const int qclass = parity_class(parity(qv, active));
    for (std::size_t pat = 0; pat < patterns; ++pat) {
      fill(sbits, pat, 0);
      const auto sv = encode_bits(sbits, EncodingScheme::PlusMinus);
      sign[pat] = parity_class(parity(sv, active)) == qclass ? 1.0 : -1.0;
    }
  }

  double mean = 0.0;
  double second = 0.0;                        // shared model: E[S^2]
  std::vector<double> m1(patterns, 0.0);      // E[X_P]
  std::vector<double> m2(patterns, 0.0);      // E[X_P^2]
  std::vector<double> c1(patterns), c2(patterns);
  for (std::size_t qi = 0; qi < configs; ++qi) {
    const double wq = weight(qi);
    fill(qbits, query_pattern, qi);
    const auto qv = encode_bits(qbits, enc);
    std::fill(c1.begin(), c1.end(), 0.0);
    std::fill(c2.begin(), c2.end(), 0.0);
    for (std::size_t pat = 0; pat < patterns; ++pat) {
      for (std::size_t si = 0; si < configs; ++si) {
        fill(sbits, pat, si);
        const auto sv = encode_bits(sbits, enc);
        const double x = std::exp(params.tau_inv * theory_score(params.kernel, qv, sv, active));
        const double ws = weight(si);
        c1[pat] += ws * x;
        c2[pat] += ws * x * x;
      }
    }
    // Given the query the items are independent, so the conditional second
    // moment of the sum splits into a square plus per-item variances.
    double cond_sum = 0.0, cond_var = 0.0;
    for (std::size_t pat = 0; pat < patterns; ++pat) {
      cond_sum += r * sign[pat] * c1[pat];
      cond_var += r * (c2[pat] - c1[pat] * c1[pat]);
      m1[pat] += wq * c1[pat];
      m2[pat] += wq * c2[pat];
    }
    mean += wq * cond_sum;
    second += wq * (cond_sum * cond_sum + cond_var);
  }

  double variance = 0.0;
  if (model == QueryModel::Shared) {
    variance = second - mean * mean;
  } else {
    for (std::size_t pat = 0; pat < patterns; ++pat) variance += r * (m2[pat] - m1[pat] * m1[pat]);
  }
  variance = std::max(variance, 0.0);
  ScoreStats s;
  s.mean = mean;
  s.variance = variance;
  s.log_mean = std::log(mean);
  s.log_variance = variance > 0.0 ? std::log(variance) : kNegInf;
  return s;
}

MonteCarloResult mc_misclassification(const TheoryParams& params, std::size_t trials, std::uint64_t seed) {
  params.validate();
  if (trials < 1) throw DomainError("mc_misclassification: trials must be at least 1");
  BooleanTaskSpec spec;
  spec.n = params.alpha + params.beta_irrelevant;
  spec.alpha = params.alpha;
  spec.p = params.p;
  spec.r = params.r;
  spec.query_count = 1;
  spec.encoding = params.encoding();

  MonteCarloResult out;
  out.trials = trials;
  double mean = 0.0, m2 = 0.0;
  std::vector<double> scores;
  for (std::size_t t = 0; t < trials; ++t) {
    spec.seed = task_seed(seed, t);
    const Task task = gen_boolean_task(spec);
    const auto& active = task.meta->active_indices;
    const auto q = task.query.features().row(0);
    const int qlabel = task.query.labels()[0];
    const auto& sup = task.support;
    scores.resize(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i) {
      scores[i] = params.tau_inv * theory_score(params.kernel, q, sup.features().row(i), active);
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    double raw = 0.0, shifted = 0.0;
    for (std::size_t i = 0; i < sup.size(); ++i) {
      const double s = sup.labels()[i] == qlabel ? 1.0 : -1.0;
      raw += s * std::exp(scores[i]);
      shifted += s * std::exp(scores[i] - top);
    }
    const double delta = raw - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (raw - mean);
    if (shifted <= 0.0) ++out.misclassified;
  }
  const double nt = static_cast<double>(trials);
  out.mean = mean;
  out.variance = trials > 1 ? m2 / (nt - 1.0) : 0.0;
  out.mean_se = std::sqrt(out.variance / nt);
  out.misclass_rate = static_cast<double>(out.misclassified) / nt;
  out.rate_se = std::sqrt(out.misclass_rate * (1.0 - out.misclass_rate) / nt);
  return out;
}

SnrGrowth snr_growth(const TheoryParams& params, std::span<const std::size_t> betas) {
  SnrGrowth g;
  const MomentConstants k = moment_constants(params);
  g.asymptotic_slope = 0.5 * std::log(k.d / (k.c * k.c));
  for (std::size_t b : betas) {
    TheoryParams at = params;
    at.beta_irrelevant = b;
    const ScoreStats s = support_sum_stats(at);
    if (!(k.m_alpha > 0.0) || !std::isfinite(s.log_mean)) throw DomainError("snr_growth: mean is not positive");
    g.betas.push_back(b);
    g.ratio.push_back(s.log_variance == kNegInf ? 0.0 : std::exp(0.5 * s.log_variance - s.log_mean));
  }
  g.fitted_slope = std::numeric_limits<double>::quiet_NaN();
  const std::size_t m = g.ratio.size();
  if (m >= 2 && g.ratio[m - 1] > 0.0 && g.ratio[m - 2] > 0.0 && g.betas[m - 1] != g.betas[m - 2]) {
    g.fitted_slope = (std::log(g.ratio[m - 1]) - std::log(g.ratio[m - 2])) /
                     (static_cast<double>(g.betas[m - 1]) - static_cast<double>(g.betas[m - 2]));
  }
  return g;
}

double and_boundary(double tau_inv, double x) {
  if (!(tau_inv > 0.0)) throw DomainError("and_boundary: tau must be positive");
  if (!(x > 0.0)) throw DomainError("and_boundary: x must be positive");
  return -std::log(std::tanh(tau_inv * x)) / (2.0 * tau_inv);
}

}  // namespace polyselect
