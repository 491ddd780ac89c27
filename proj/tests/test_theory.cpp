#include <cmath>
#include <vector>

#include "doctest.h"
#include "polyselect/theory.hpp"

using namespace polyselect;

namespace {

TheoryParams params(std::size_t alpha, std::size_t beta, double p, std::size_t r) {
  TheoryParams t;
  t.alpha = alpha;
  t.beta_irrelevant = beta;
  t.p = p;
  t.r = r;
  return t;
}

// Brute force over the full joint distribution of every irrelevant bit
// (query and all support items) for the Dot kernel on +/-1 codes. The query
// has all active bits at +1; bit value +1 has probability p.
std::pair<double, double> joint_moments(std::size_t alpha, std::size_t beta, double p, std::size_t r, double tau) {
  const std::size_t items = r << alpha;
  const std::size_t bits = beta * (1 + items);
  double m1 = 0.0, m2 = 0.0;
  for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << bits); ++cfg) {
    double prob = 1.0;
    for (std::size_t b = 0; b < bits; ++b) prob *= (cfg >> b & 1) ? p : 1.0 - p;
    auto bit = [&](std::size_t b) { return (cfg >> b & 1) ? 1.0 : -1.0; };
    double sum = 0.0;
    for (std::size_t i = 0; i < items; ++i) {
      const std::size_t pattern = i & ((std::size_t{1} << alpha) - 1);
      double score = 0.0;
      int sign = 1;
      for (std::size_t a = 0; a < alpha; ++a) {
        const double v = (pattern >> a & 1) ? 1.0 : -1.0;
        score += v;
        sign *= v > 0 ? 1 : -1;
      }
      for (std::size_t b = 0; b < beta; ++b) score += bit(b) * bit(beta * (1 + i) + b);
      sum += sign * std::exp(tau * score);
    }
    m1 += prob * sum;
    m2 += prob * sum * sum;
  }
  return {m1, m2 - m1 * m1};
}

}  // namespace

TEST_CASE("bit match probabilities") {
  CHECK(pbar(0.3) == doctest::Approx(0.58));
  CHECK(qbar(0.3) == doctest::Approx(0.42));
  CHECK(pbar(0.5) == 0.5);
}

TEST_CASE("single-item expectation") {
  CHECK(expected_score(0, params(1, 1, 0.5, 1)) == doctest::Approx(4.194528049465324));
  // Irrelevant bits off: the score is deterministic.
  CHECK(expected_score(1, params(2, 0, 0.5, 1)) == doctest::Approx(1.0));
  CHECK(var_score(1, params(2, 0, 0.5, 1)) == doctest::Approx(0.0));
}

TEST_CASE("mean of the signed sum") {
  CHECK(support_sum_stats(params(2, 1, 0.5, 1)).mean == doctest::Approx(8.52458136096252));
  const auto s = support_sum_stats(params(1, 0, 0.5, 1));
  CHECK(s.mean == doctest::Approx(std::exp(1.0) - std::exp(-1.0)));
  CHECK(s.variance == 0.0);
  const double m1 = support_sum_stats(params(3, 4, 0.3, 1)).mean;
  CHECK(support_sum_stats(params(3, 4, 0.3, 7)).mean == doctest::Approx(7 * m1));
  CHECK(alternative_mean(params(2, 1, 0.5, 1)) > 20.0);
}

TEST_CASE("closed forms agree with a full-joint brute force") {
  struct Case {
    std::size_t alpha, beta, r;
    double p;
  };
  for (const Case c : {Case{1, 1, 1, 0.5}, Case{1, 1, 1, 0.3}, Case{1, 2, 1, 0.8}, Case{2, 1, 1, 0.3},
                       Case{1, 1, 2, 0.2}}) {
    CAPTURE(c.alpha);
    CAPTURE(c.beta);
    CAPTURE(c.r);
    CAPTURE(c.p);
    const auto [mean, var] = joint_moments(c.alpha, c.beta, c.p, c.r, 1.0);
    const auto closed = support_sum_stats(params(c.alpha, c.beta, c.p, c.r));
    const auto exact = exhaustive_stats(params(c.alpha, c.beta, c.p, c.r));
    CHECK(closed.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(closed.variance == doctest::Approx(var).epsilon(1e-10));
    CHECK(exact.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(exact.variance == doctest::Approx(var).epsilon(1e-10));
  }
}

TEST_CASE("exhaustive oracle matches both query models") {
  for (double p : {0.2, 0.5, 0.9}) {
    for (std::size_t beta : {0, 2, 5}) {
      const auto t = params(3, beta, p, 2);
      const auto shared = exhaustive_stats(t, QueryModel::Shared);
      const auto indep = exhaustive_stats(t, QueryModel::Independent);
      CHECK(shared.mean == doctest::Approx(support_sum_stats(t).mean).epsilon(1e-11));
      CHECK(shared.variance == doctest::Approx(support_sum_stats(t).variance).epsilon(1e-9));
      CHECK(indep.variance == doctest::Approx(independent_sum_stats(t).variance).epsilon(1e-9));
    }
  }
  // The two variance forms coincide only at p = 0.5.
  CHECK(support_sum_stats(params(2, 3, 0.5, 2)).variance ==
        doctest::Approx(independent_sum_stats(params(2, 3, 0.5, 2)).variance));
  CHECK(support_sum_stats(params(2, 3, 0.2, 2)).variance !=
        doctest::Approx(independent_sum_stats(params(2, 3, 0.2, 2)).variance));
}

TEST_CASE("other kernels agree with the exhaustive oracle") {
  for (KernelKind k : {KernelKind::Cosine, KernelKind::SqEuclidean, KernelKind::Laplace}) {
    auto t = params(2, 3, 0.3, 2);
    t.kernel = k;
    t.tau_inv = 1.5;
    const auto e = exhaustive_stats(t);
    const auto c = support_sum_stats(t);
    CHECK(c.mean == doctest::Approx(e.mean).epsilon(1e-11));
    CHECK(c.variance == doctest::Approx(e.variance).epsilon(1e-9));
  }
}

TEST_CASE("second moment exceeds squared first moment") {
  for (int i = 0; i <= 100; ++i) {
    const auto k = moment_constants(params(2, 1, i / 100.0, 1));
    if (i == 0 || i == 100) {
      CHECK(k.d == doctest::Approx(k.c * k.c));
    } else {
      CHECK(k.d > k.c * k.c);
    }
  }
}

TEST_CASE("relative spread grows with irrelevant features") {
  const std::vector<std::size_t> betas{0, 1, 2, 4, 8, 16, 32, 64};
  const auto g = snr_growth(params(3, 0, 0.5, 5), betas);
  for (std::size_t i = 1; i < g.ratio.size(); ++i) CHECK(g.ratio[i] > g.ratio[i - 1]);
  CHECK(g.fitted_slope == doctest::Approx(g.asymptotic_slope).epsilon(1e-3));
  // Irrelevant bits that always agree carry no noise.
  const auto flat = snr_growth(params(3, 0, 1.0, 5), betas);
  for (double r : flat.ratio) CHECK(r == 0.0);
}

TEST_CASE("large moments stay finite in log space") {
  const auto s = support_sum_stats(params(4, 2000, 0.5, 10));
  CHECK(std::isinf(s.mean));
  CHECK(std::isfinite(s.log_mean));
  CHECK(std::isfinite(s.log_variance));
}

TEST_CASE("AND boundary") {
  CHECK_THROWS_AS(and_boundary(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(and_boundary(1.0, -1.0), DomainError);
  for (double x : {0.1, 0.5, 1.0, 3.0}) {
    CHECK(and_boundary(1.0, x) == doctest::Approx(-0.5 * std::log(std::tanh(x))));
    CHECK(and_boundary(2.0, x) == doctest::Approx(0.5 * and_boundary(1.0, 2.0 * x)));
    CHECK(and_boundary(1.0, x) > 0.0);
  }
}

TEST_CASE("Monte-Carlo moments") {
  for (std::size_t beta : {0, 2, 4, 6}) {
    const auto t = params(2, beta, 0.5, 2);
    const auto mc = mc_misclassification(t, 20000, 3);
    const auto cf = support_sum_stats(t);
    CHECK(std::abs(mc.mean - cf.mean) < 4 * mc.mean_se + 1e-12);
    if (beta == 0) {
      CHECK(mc.misclassified == 0);
      CHECK(mc.variance == doctest::Approx(0.0));
    } else {
      CHECK(mc.variance == doctest::Approx(cf.variance).epsilon(0.1));
    }
  }
}

TEST_CASE("equivalent kernels give identical misclassifications") {
  // Dot on +/-1 with tau equals squared Euclidean on 0/1 with 2 tau up to a
  // constant shift, so the sign of every sum agrees.
  auto dot = params(3, 5, 0.4, 2);
  auto euc = dot;
  euc.kernel = KernelKind::SqEuclidean;
  euc.tau_inv = 2.0;
  const auto a = mc_misclassification(dot, 3000, 8);
  const auto b = mc_misclassification(euc, 3000, 8);
  CHECK(a.misclassified == b.misclassified);
  CHECK(a.misclassified > 0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(support_sum_stats(params(0, 1, 0.5, 1)), DomainError);
  CHECK_THROWS_AS(support_sum_stats(params(1, 1, 1.5, 1)), DomainError);
  CHECK_THROWS_AS(support_sum_stats(params(1, 1, 0.5, 0)), DomainError);
  CHECK_THROWS_AS(exhaustive_stats(params(5, 1, 0.5, 1)), DomainError);
  CHECK_THROWS_AS(exhaustive_stats(params(2, 7, 0.5, 1)), DomainError);
  CHECK_THROWS_AS(exhaustive_stats(params(2, 1, 0.5, 4)), DomainError);
  auto t = params(1, 1, 0.5, 1);
  t.tau_inv = 0.0;
  CHECK_THROWS_AS(t.validate(), DomainError);
}
