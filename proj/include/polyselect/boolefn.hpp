// Exact Boolean threshold-function analysis.
//
// Corners of the n-cube are indexed little-endian: bit b of index i maps to
// coordinate b as 0 -> -1, 1 -> +1. A function is a threshold function when
// some rational (w, t) gives f(x) = 1 <=> w.x > t on every corner.
//
// Feasibility is decided by a Phase-1 simplex over GMP rationals on the
// dual system (find y >= 0, sum y = 1, with the signed lifted corners
// summing to zero). A positive Phase-1 optimum certifies separability and
// its dual multipliers give the witness; a zero optimum certifies that no
// separating hyperplane exists.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polyselect/core.hpp"

namespace polyselect {

class BooleanFunction {
 public:
  /// table.size() must be exactly 2^n.
  BooleanFunction(std::size_t n, std::vector<bool> table);

  /// Truth table from the low 2^n bits of `mask` (n <= 6).
  static BooleanFunction from_mask(std::size_t n, std::uint64_t mask);
  /// Hex string of the truth-table integer (bit i = f(corner i)). When n is
  /// omitted it is inferred from the digit count (1 digit -> n<=2, ...).
  static BooleanFunction from_hex(const std::string& hex, std::optional<std::size_t> n = std::nullopt);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return table_.size(); }
  bool operator()(std::size_t corner) const { return table_[corner]; }
  const std::vector<bool>& table() const noexcept { return table_; }

  /// Requires n <= 6.
  std::uint64_t mask() const;
  std::string to_hex() const;
  BooleanFunction complement() const;

  friend bool operator==(const BooleanFunction&, const BooleanFunction&) = default;

 private:
  std::size_t n_;
  std::vector<bool> table_;
};

/// Coordinates of corner `index` as +/-1 values.
std::vector<int> cube_corner(std::size_t n, std::size_t index);

/// XOR over all n inputs: true on corners with an odd number of +1 coordinates.
BooleanFunction xor_function(std::size_t n);
BooleanFunction and_function(std::size_t n);

struct ThresholdWitness {
  std::vector<mpq_class> weights;
  mpq_class threshold;

  /// Exact check of w.x > t <=> f(x) on every corner.
  bool certifies(const BooleanFunction& f) const;
  std::vector<std::string> weight_strings() const;
  std::string threshold_string() const;
};

/// Exact decision for n <= 8. The witness is scaled to coprime integers and
/// re-verified before it is returned.
std::optional<ThresholdWitness> is_threshold(const BooleanFunction& f);

/// Truth-table masks of all threshold functions of n <= 4 variables, in
/// increasing mask order. Memoised in-process.
const std::vector<std::uint64_t>& threshold_set(std::size_t n);

/// threshold_set(n) backed by a text cache file: read when present and
/// well-formed, otherwise enumerated and written.
const std::vector<std::uint64_t>& threshold_set(std::size_t n, const std::filesystem::path& cache_file);

/// Number of threshold functions of n <= 4 variables.
std::uint64_t count_threshold(std::size_t n);

struct ThresholdApproximation {
  /// Corners on which the best threshold function agrees with f.
  std::uint64_t agreement = 0;
  BooleanFunction best;
  ThresholdWitness witness;
};

/// Best agreement of any threshold function with f (n <= 4), exact.
ThresholdApproximation best_threshold_agreement(const BooleanFunction& f);

/// Closed-form best agreement for XOR_n: 2^(n-1) + C(n-1, floor((n-1)/2)).
std::uint64_t xor_max_accuracy(std::size_t n);

struct XorWorstReport {
  bool holds = false;
  std::uint64_t minimum = 0;
  std::uint64_t expected = 0;
  /// Masks of every function attaining the minimum.
  std::vector<std::uint64_t> worst;
};

/// Exhaustively checks that no function of n <= 4 variables is harder to
/// approximate by a threshold function than XOR_n.
XorWorstReport verify_xor_worst(std::size_t n);

struct ThresholdStats {
  double solved_fraction = 0.0;
  double mean_best_accuracy = 0.0;
  std::uint64_t threshold_count = 0;
  std::uint64_t function_count = 0;
};

ThresholdStats threshold_stats(std::size_t n);

}  // namespace polyselect
