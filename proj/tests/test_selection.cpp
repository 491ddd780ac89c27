#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "polyselect/selection.hpp"
#include "polyselect/tasks.hpp"

using namespace polyselect;

namespace {

Matrix random_block(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = 4.0 * rng.uniform() - 2.0;
  return m;
}

}  // namespace

TEST_CASE("standardisation uses population statistics") {
  const LabeledSet s(Matrix::from_rows({{1, 5}, {3, 5}}), {0, 1}, 2);
  const auto st = standardize(s);
  CHECK(st.stats.mean == std::vector<double>{2, 5});
  CHECK(st.stats.std[0] == 1.0);
  CHECK(st.stats.std[1] == 0.0);
  CHECK(st.support.features()(0, 0) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(st.support.features()(0, 1) == 0.0);
  const LabeledSet one(Matrix::from_rows({{1.0}}), {0}, 1);
  CHECK_THROWS_AS(standardize(one), DomainError);
}

TEST_CASE("self-attention keeps rows inside the per-coordinate hull") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 2 + rng.below(10), cols = 1 + rng.below(6);
    const Matrix x = random_block(rng, rows, cols);
    const Matrix y = self_attention_round(x, 1.0);
    for (std::size_t f = 0; f < cols; ++f) {
      const auto col = x.column(f);
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      for (std::size_t i = 0; i < rows; ++i) {
        CHECK(y(i, f) >= *lo - 1e-12);
        CHECK(y(i, f) <= *hi + 1e-12);
      }
    }
  }
}

TEST_CASE("singleton classes and constant coordinates are fixed points") {
  const Matrix one = Matrix::from_rows({{0.3, -7.0}});
  CHECK(self_attention_round(one, 3.0) == one);
  Matrix x = Matrix::from_rows({{1, 0.25}, {-1, 0.25}, {0.5, 0.25}});
  for (int r = 0; r < 5; ++r) x = self_attention_round(x, 1.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(x(i, 1) - 0.25) < 1e-12);
}

TEST_CASE("column dispersion") {
  const Matrix x = Matrix::from_rows({{0, 1}, {2, 1}, {4, 1}});
  CHECK(column_dispersion(x, Dispersion::MeanAbsoluteDeviation) == std::vector<double>{4.0 / 3.0, 0.0});
  CHECK(column_dispersion(x, Dispersion::StandardDeviation)[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
}

TEST_CASE("zero rounds score the standardised support") {
  const LabeledSet s(Matrix::from_rows({{1, 0}, {3, 0}, {5, 0}, {7, 0}}), {0, 0, 1, 1}, 2);
  SelectionConfig c;
  c.repetitions = 0;
  const auto f = feature_scores(s, c);
  CHECK(f.values[0] == doctest::Approx(std::sqrt(4.0 / 5.0)).epsilon(1e-6));  // MAD of standardised (1,3,5,7)
  CHECK(f.values[1] == 0.0);
  const auto traj = score_trajectory(s, c);
  CHECK(traj.size() == 1);
}

TEST_CASE("score trajectory has one row per round") {
  BooleanTaskSpec b;
  b.n = 6;
  b.alpha = 2;
  b.r = 4;
  b.seed = 1;
  const Task t = gen_boolean_task(b);
  SelectionConfig c;
  c.repetitions = 3;
  const auto traj = score_trajectory(t.support, c);
  CHECK(traj.size() == 4);
  CHECK(traj.back() == feature_scores(t.support, c).values);
}

TEST_CASE("active features score highest with enough repetitions") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BooleanTaskSpec b;
    b.n = 7;
    b.alpha = 3;
    b.r = 10;
    b.seed = seed;
    const Task t = gen_boolean_task(b);
    SelectionConfig c;
    c.tau_inv = 2.0;
    c.repetitions = 5;
    const auto mask = top_k_mask(feature_scores(t.support, c).values, 3);
    bool all = true;
    for (auto a : t.meta->active_indices) all = all && mask[a] == 1.0;
    hits += all;
  }
  CHECK(hits >= 18);
}

TEST_CASE("top-k mask and weight modes") {
  const std::vector<double> s{0.5, 0.9, 0.9, 0.1};
  CHECK(top_k_mask(s, 1) == std::vector<double>{0, 1, 0, 0});
  CHECK(top_k_mask(s, 3) == std::vector<double>{1, 1, 1, 0});
  CHECK_THROWS_AS(top_k_mask(s, 0), DomainError);
  CHECK_THROWS_AS(top_k_mask(s, 5), DomainError);

  SelectionConfig c;
  FeatureScores f{{1.0, 3.0}};
  CHECK(selection_weights(f, c) == std::vector<double>{1.0, 3.0});
  c.mode = SelectionMode::SoftRescaleNormalized;
  CHECK(selection_weights(f, c) == std::vector<double>{0.5, 1.5});
  FeatureScores zero{{0.0, 0.0}};
  CHECK(selection_weights(zero, c) == std::vector<double>{1.0, 1.0});
  c.mode = SelectionMode::TopK;
  c.top_k = 3;
  CHECK_THROWS_AS(selection_weights(f, c), DomainError);
}

TEST_CASE("selection uses support statistics for the query") {
  const Task t{LabeledSet(Matrix::from_rows({{0, 10}, {2, 10}}), {0, 1}, 2),
               LabeledSet(Matrix::from_rows({{4, 10}}), {1}, 2), std::nullopt};
  SelectionConfig c;
  const Task out = apply_selection(t, FeatureScores{{2.0, 1.0}}, c);
  CHECK(out.query.features()(0, 0) == doctest::Approx(6.0).epsilon(1e-7));  // (4-1)/1 * 2
  CHECK(out.query.features()(0, 1) == 0.0);
  c.space = RescaleSpace::Raw;
  CHECK(apply_selection(t, FeatureScores{{2.0, 1.0}}, c).query.features()(0, 0) == 8.0);
}

TEST_CASE("parse names") {
  CHECK(parse_dispersion("mad") == Dispersion::MeanAbsoluteDeviation);
  CHECK(parse_selection_mode("topk") == SelectionMode::TopK);
  CHECK_THROWS_AS(parse_dispersion("iqr"), UsageError);
}
