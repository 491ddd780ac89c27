#include "doctest.h"
#include "polyselect/prototypes.hpp"
#include "polyselect/tasks.hpp"

using namespace polyselect;

TEST_CASE("prototypes are class means") {
  const LabeledSet s(Matrix::from_rows({{0, 0}, {2, 2}, {10, 0}}), {0, 0, 1}, 2);
  const PrototypeSet p = build_prototypes(s);
  CHECK(p.means(0, 0) == 1.0);
  CHECK(p.means(0, 1) == 1.0);
  CHECK(p.means(1, 0) == 10.0);
  const auto probs = proto_classify(Matrix::from_rows({{9, 0}}), p);
  CHECK(probs.predicted(0) == 1);
}

TEST_CASE("empty class is rejected") {
  const LabeledSet s(Matrix::from_rows({{0.0}, {1.0}}), {0, 0}, 2);
  CHECK_THROWS_AS(build_prototypes(s), DomainError);
}

TEST_CASE("threshold functions are solved by prototypes") {
  // AND on +/-1 inputs: the class means differ, so the prototype rule works.
  const LabeledSet s(Matrix::from_rows({{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}), {0, 0, 0, 1}, 2);
  const Task t{s, s, std::nullopt};
  CHECK(proto_classify(t).accuracy(s.labels()) == 1.0);
}

TEST_CASE("balanced XOR support collapses the prototypes") {
  for (std::size_t alpha = 2; alpha <= 4; ++alpha) {
    BooleanTaskSpec spec;
    spec.n = alpha;
    spec.alpha = alpha;
    spec.r = 1;
    spec.seed = 3;
    const PrototypeSet p = build_prototypes(gen_boolean_task(spec).support);
    for (std::size_t f = 0; f < alpha; ++f) CHECK(std::abs(p.means(0, f) - p.means(1, f)) < 1e-12);
  }
}
