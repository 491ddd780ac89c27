#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "polyselect/boolefn.hpp"

using namespace polyselect;

TEST_CASE("truth tables round-trip through masks and hex") {
  const auto f = BooleanFunction::from_mask(3, 0x96);
  CHECK(f.mask() == 0x96);
  CHECK(f == xor_function(3));
  CHECK(BooleanFunction::from_hex(f.to_hex(), 3) == f);
  CHECK(f.complement().mask() == 0x69);
  CHECK(and_function(2).mask() == 0x8);
  CHECK(cube_corner(3, 5) == std::vector<int>{1, -1, 1});
  CHECK_THROWS(BooleanFunction(2, std::vector<bool>(3)));
}

TEST_CASE("threshold counts for small n") {
  CHECK(count_threshold(0) == 2);
  CHECK(count_threshold(1) == 4);
  CHECK(count_threshold(2) == 14);
  CHECK(count_threshold(3) == 104);
}

TEST_CASE("witnesses certify and XOR has none") {
  for (std::uint64_t m : threshold_set(3)) {
    const auto f = BooleanFunction::from_mask(3, m);
    const auto w = is_threshold(f);
    REQUIRE(w);
    CHECK(w->certifies(f));
  }
  for (std::size_t n = 2; n <= 5; ++n) CHECK_FALSE(is_threshold(xor_function(n)));
  CHECK(is_threshold(and_function(5)));
}

TEST_CASE("best threshold agreement of XOR") {
  CHECK(xor_max_accuracy(2) == 3);
  CHECK(xor_max_accuracy(3) == 6);
  CHECK(xor_max_accuracy(4) == 11);
  CHECK(xor_max_accuracy(5) == 22);
  for (std::size_t n = 2; n <= 3; ++n) {
    const auto best = best_threshold_agreement(xor_function(n));
    CHECK(best.agreement == xor_max_accuracy(n));
    CHECK(best.witness.certifies(best.best));
    const auto rep = verify_xor_worst(n);
    CHECK(rep.holds);
    CHECK(rep.minimum == xor_max_accuracy(n));
  }
}

TEST_CASE("two-variable statistics") {
  const auto st = threshold_stats(2);
  CHECK(st.threshold_count == 14);
  CHECK(st.function_count == 16);
  CHECK(st.solved_fraction == 0.875);
  CHECK(st.mean_best_accuracy == 0.96875);
}

TEST_CASE("threshold set cache file") {
  const auto dir = std::filesystem::temp_directory_path() / "polyselect_cache_test";
  std::filesystem::remove_all(dir);
  const auto file = dir / "n3.txt";
  const auto& a = threshold_set(3, file);
  CHECK(std::filesystem::exists(file));
  const auto& b = threshold_set(3, file);
  CHECK(a == b);
  CHECK(a.size() == 104);
  std::filesystem::remove_all(dir);
}
