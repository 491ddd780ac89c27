// Synthetic task generators: XOR binary strings, XOR on the sphere, and
// categorical tuple tasks built from one-hot blocks.
#pragma once

#include <cstdint>
#include <span>
#include <variant>

#include "polyselect/core.hpp"

namespace polyselect {

/// Product of x_i over `active` for a +/-1 vector.
int parity(std::span<const double> x_pm, std::span<const std::size_t> active);
/// Fixed label mapping: parity -1 -> class 1, +1 -> class 0.
int parity_class(int chi);

struct BooleanTaskSpec {
  std::size_t n = 10;
  std::size_t alpha = 3;
  double p = 0.5;
  std::size_t r = 5;
  std::size_t query_count = 32;
  EncodingScheme encoding = EncodingScheme::PlusMinus;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Support: every one of the 2^alpha active patterns exactly r times (rows
/// shuffled), irrelevant bits iid Bernoulli(p). Queries: iid pattern and
/// irrelevant bits. Labels: parity over the active indices.
Task gen_boolean_task(const BooleanTaskSpec& spec);

struct SphereTaskSpec {
  std::size_t sample_count = 64;
  std::size_t query_count = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Class of a point on the sphere: sign(x)*sign(y) < 0 -> 1, else 0.
int sphere_class(double x, double y);

/// Points uniform on the unit 2-sphere; points with |x| or |y| < 1e-6 are redrawn.
Task gen_sphere_task(const SphereTaskSpec& spec);

enum class TupleAttribute { Symbol, Color };

struct MonotheticRule {
  std::size_t slot = 0;
  TupleAttribute attribute = TupleAttribute::Color;
};

/// Class = [attribute_a at slot_a takes its second rule value] XOR
///         [attribute_b at slot_b takes its second rule value].
struct PolytheticRule {
  std::size_t slot_a = 0;
  TupleAttribute attribute_a = TupleAttribute::Symbol;
  std::size_t slot_b = 1;
  TupleAttribute attribute_b = TupleAttribute::Color;
};

struct TupleTaskSpec {
  std::size_t positions = 4;
  std::size_t symbols_per_slot = 10;
  std::size_t colors_per_slot = 3;
  std::variant<MonotheticRule, PolytheticRule> rule = PolytheticRule{};
  /// Examples per group; polythetic tasks have two groups per class,
  /// monothetic tasks one.
  std::size_t support_per_group = 24;
  std::size_t query_per_group = 8;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t feature_count() const { return positions * (symbols_per_slot + colors_per_slot); }
};

/// Each example is the concatenation, per position, of a one-hot symbol
/// block and a one-hot colour block.
Task gen_tuple_task(const TupleTaskSpec& spec);

}  // namespace polyselect
