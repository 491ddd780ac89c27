#include <cmath>

#include "doctest.h"
#include "polyselect/kernels.hpp"

using namespace polyselect;

TEST_CASE("similarity kernels on small vectors") {
  const std::vector<double> q{1, 2}, s{3, -1};
  CHECK(similarity(KernelKind::Dot, q, s) == 1.0);
  CHECK(similarity(KernelKind::SqEuclidean, q, s) == -13.0);
  CHECK(similarity(KernelKind::Laplace, q, s) == -5.0);
  CHECK(similarity(KernelKind::Cosine, q, s) == doctest::Approx(1.0 / std::sqrt(50.0)));
  const std::vector<double> z{0, 0};
  CHECK_THROWS_AS(similarity(KernelKind::Cosine, q, z), DomainError);
  const std::vector<double> shorter{1};
  CHECK_THROWS_AS(similarity(KernelKind::Dot, q, shorter), DomainError);
}

TEST_CASE("parse_kernel round-trips names") {
  for (KernelKind k : {KernelKind::Dot, KernelKind::Cosine, KernelKind::SqEuclidean, KernelKind::Laplace}) {
    CHECK(parse_kernel(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_kernel("rbf"), UsageError);
}

TEST_CASE("softmax is stable for large scores") {
  const std::vector<double> big{1000.0, 1000.0, 0.0};
  const auto p = softmax(big, 1.0);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(p[2] == 0.0);
  const std::vector<double> small{0.0, std::log(3.0)};
  const auto q = softmax(small, 1.0);
  CHECK(q[1] == doctest::Approx(0.75));
  // Halving the scores at tau = 2 gives the same distribution.
  const std::vector<double> half{0.0, std::log(3.0) / 2.0};
  CHECK(softmax(half, 2.0)[1] == doctest::Approx(0.75));
}

TEST_CASE("attention probabilities are row-stochastic") {
  const LabeledSet support(Matrix::from_rows({{1, 0}, {0, 1}, {-1, 0}}), {0, 1, 2}, 3);
  const Matrix queries = Matrix::from_rows({{1, 0}, {0.2, 0.3}, {-5, 5}});
  for (KernelKind k : {KernelKind::Dot, KernelKind::Cosine, KernelKind::SqEuclidean, KernelKind::Laplace}) {
    const auto probs = attend(queries, support, {k, 1.5});
    for (std::size_t i = 0; i < probs.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(probs(i, c) >= 0.0);
        sum += probs(i, c);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention is polythetic on XOR of two inputs") {
  const LabeledSet support(Matrix::from_rows({{-1, -1}, {1, 1}, {-1, 1}, {1, -1}}), {0, 0, 1, 1}, 2);
  const Task task{support, support, std::nullopt};
  CHECK(attend_classify(task, {KernelKind::Dot, 1.0}).accuracy(support.labels()) == 1.0);
}

TEST_CASE("low temperature approaches nearest neighbour") {
  const LabeledSet support(Matrix::from_rows({{0.0}, {1.0}}), {0, 1}, 2);
  const auto probs = attend(Matrix::from_rows({{0.6}}), support, {KernelKind::SqEuclidean, 500.0});
  CHECK(probs(0, 1) > 1.0 - 1e-12);
}

TEST_CASE("confidence field requires two features") {
  const LabeledSet three(Matrix::from_rows({{1, 0, 0}, {0, 1, 0}}), {0, 1}, 2);
  CHECK_THROWS_AS(confidence_field(three, {}, GridSpec{}), DomainError);
  const LabeledSet two(Matrix::from_rows({{1, 0}, {0, 1}}), {0, 1}, 2);
  GridSpec g;
  g.x_steps = 3;
  g.y_steps = 2;
  const auto f = confidence_field(two, {}, g);
  CHECK(f.xs.size() == 3);
  CHECK(f.ys.size() == 2);
  CHECK(f.p1.rows() == 2);
  CHECK(f.p1.cols() == 3);
  // Symmetric point: equal similarity to both support examples.
  GridSpec one;
  one.x_min = one.x_max = 0.5;
  one.y_min = one.y_max = 0.5;
  one.x_steps = one.y_steps = 1;
  CHECK(confidence_field(two, {}, one).p1(0, 0) == doctest::Approx(0.5));
}
