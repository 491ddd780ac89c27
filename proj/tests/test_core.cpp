#include <set>

#include "doctest.h"
#include "polyselect/core.hpp"
#include "polyselect/task_io.hpp"

using namespace polyselect;

TEST_CASE("one_hot places a single 1 per row") {
  const std::vector<int> labels{0, 2, 1};
  const Matrix v = one_hot(labels, 3);
  CHECK(v.rows() == 3);
  CHECK(v(0, 0) == 1.0);
  CHECK(v(1, 2) == 1.0);
  CHECK(v(2, 1) == 1.0);
  double total = 0.0;
  for (double x : v.values()) total += x;
  CHECK(total == 3.0);
  const std::vector<int> bad{0, 3};
  CHECK_THROWS_AS(one_hot(bad, 3), DomainError);
}

TEST_CASE("bit encodings round-trip") {
  const std::vector<int> bits{1, 0, 0, 1};
  const auto pm = encode_bits(bits, EncodingScheme::PlusMinus);
  CHECK(pm == std::vector<double>{1, -1, -1, 1});
  const auto zo = encode_bits(bits, EncodingScheme::ZeroOne);
  CHECK(zo == std::vector<double>{1, 0, 0, 1});
  CHECK(decode_bits(pm, EncodingScheme::PlusMinus) == bits);
  CHECK(decode_bits(zo, EncodingScheme::ZeroOne) == bits);
  const std::vector<double> junk{0.5};
  CHECK_THROWS_AS(decode_bits(junk, EncodingScheme::ZeroOne), DomainError);
  const std::vector<int> notbits{2};
  CHECK_THROWS_AS(encode_bits(notbits, EncodingScheme::PlusMinus), DomainError);
}

TEST_CASE("labelled set validation") {
  CHECK_THROWS_AS(LabeledSet(Matrix(2, 2), {0, 1, 0}, 2), DomainError);
  CHECK_THROWS_AS(LabeledSet(Matrix(2, 2), {0, 2}, 2), DomainError);
  Matrix m(1, 1);
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(LabeledSet(m, {0}, 1), DomainError);
  const LabeledSet s(Matrix(3, 2), {1, 0, 1}, 2);
  CHECK(s.members(1) == std::vector<std::size_t>{0, 2});
  CHECK(s.class_counts() == std::vector<std::size_t>{1, 2});
}

TEST_CASE("string labels densify in first-appearance order") {
  const std::vector<std::string> raw{"cat", "dog", "cat", "eel"};
  std::vector<std::string> names;
  CHECK(densify_labels(raw, &names) == std::vector<int>{0, 1, 0, 2});
  CHECK(names == std::vector<std::string>{"cat", "dog", "eel"});
}

TEST_CASE("task seed is a frozen splitmix64 derivation") {
  // Values from an independent 64-bit integer implementation.
  CHECK(task_seed(0, 0) == 16294208416658607535ULL);
  CHECK(task_seed(42, 7) == 14769051326987775908ULL);
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(task_seed(5, i));
  CHECK(seen.size() == 1000);
}

TEST_CASE("rng draws are reproducible and in range") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(1);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto v = r.below(5);
    REQUIRE(v < 5);
    ++counts[v];
  }
  for (int c : counts) CHECK(c > 850);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  const auto s = r.sample_without_replacement(10, 10);
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 10);
  CHECK_THROWS_AS(r.sample_without_replacement(3, 4), DomainError);
}

TEST_CASE("argmax ties go to the lowest index") {
  const std::vector<double> v{0.2, 0.4, 0.4, 0.1};
  CHECK(argmax(v) == 1);
}

TEST_CASE("task json round-trip") {
  Task t{LabeledSet(Matrix::from_rows({{1, -1}, {-1, 1}}), {0, 1}, 2),
         LabeledSet(Matrix::from_rows({{1, 1}}), {1}, 2),
         TaskMeta{{1}, 1, 1, 0.25, 1, EncodingScheme::PlusMinus, 99}};
  const Task back = task_from_json(task_to_json(t));
  CHECK(back == t);

  const auto j = nlohmann::json::parse(R"({"support":{"features":[[0],[1]],"labels":["b","a"]},
                                           "query":{"features":[[1]],"labels":["a"]}})");
  const Task s = task_from_json(j);
  CHECK(s.support.labels() == std::vector<int>{0, 1});
  CHECK(s.query.labels() == std::vector<int>{1});
  CHECK_THROWS_AS(task_from_json(nlohmann::json::parse(R"({"support":{}})")), DomainError);
}
