#include "polyselect/tasks.hpp"

#include <cmath>
#include <numbers>

namespace polyselect {

int parity(std::span<const double> x_pm, std::span<const std::size_t> active) {
  if (active.empty()) throw DomainError("parity over an empty index set");
  int chi = 1;
  for (std::size_t i : active) {
    if (i >= x_pm.size()) throw DomainError("parity: index out of range");
    if (x_pm[i] < 0.0) chi = -chi;
  }
  return chi;
}

int parity_class(int chi) { return chi < 0 ? 1 : 0; }

void BooleanTaskSpec::validate() const {
  if (alpha < 1 || alpha > n) throw DomainError("boolean task: need 1 <= alpha <= n");
  if (alpha > 20) throw DomainError("boolean task: alpha too large to enumerate 2^alpha variants");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("boolean task: p outside [0, 1]");
  if (r < 1) throw DomainError("boolean task: r must be at least 1");
  if (query_count < 1) throw DomainError("boolean task: query_count must be at least 1");
}

Task gen_boolean_task(const BooleanTaskSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<std::size_t> active = rng.sample_without_replacement(spec.n, spec.alpha);
  std::vector<bool> is_active(spec.n, false);
  for (auto a : active) is_active[a] = true;

  const std::size_t variants = std::size_t{1} << spec.alpha;
  // Row draw: the active bits come from the pattern, every other bit is
  // Bernoulli(p). Bits are held as +/-1 until the final encoding.
  auto make_row = [&](std::size_t pattern, std::span<double> out_pm) {
    for (std::size_t f = 0; f < spec.n; ++f) {
      if (!is_active[f]) out_pm[f] = rng.bernoulli(spec.p) ? 1.0 : -1.0;
    }
    for (std::size_t b = 0; b < spec.alpha; ++b) out_pm[active[b]] = (pattern >> b) & 1U ? 1.0 : -1.0;
  };

  std::vector<std::size_t> patterns;
  patterns.reserve(variants * spec.r);
  for (std::size_t v = 0; v < variants; ++v) {
    for (std::size_t c = 0; c < spec.r; ++c) patterns.push_back(v);
  }
  rng.shuffle(patterns);

  auto build = [&](const std::vector<std::size_t>& pats) {
    Matrix pm(pats.size(), spec.n);
    std::vector<int> labels(pats.size());
    for (std::size_t i = 0; i < pats.size(); ++i) {
      make_row(pats[i], pm.row(i));
      labels[i] = parity_class(parity(pm.row(i), active));
    }
    if (spec.encoding == EncodingScheme::ZeroOne) {
      for (double& v : pm.values()) v = v > 0.0 ? 1.0 : 0.0;
    }
    return LabeledSet(std::move(pm), std::move(labels), 2);
  };

  LabeledSet support = build(patterns);
  std::vector<std::size_t> query_patterns(spec.query_count);
  for (auto& q : query_patterns) q = rng.below(variants);
  LabeledSet query = build(query_patterns);

  TaskMeta meta{active, spec.alpha, spec.n - spec.alpha, spec.p, spec.r, spec.encoding, spec.seed};
  return Task{std::move(support), std::move(query), std::move(meta)};
}

void SphereTaskSpec::validate() const {
  if (sample_count < 4) throw DomainError("sphere task: sample_count must be at least 4");
  if (query_count < 1) throw DomainError("sphere task: query_count must be at least 1");
}

int sphere_class(double x, double y) { return (x < 0.0) != (y < 0.0) ? 1 : 0; }

Task gen_sphere_task(const SphereTaskSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  // Archimedes: z uniform on [-1, 1] and a uniform azimuth give a uniform
  // point on the sphere.
  auto draw = [&](std::size_t count) {
    Matrix pts(count, 3);
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
      double x = 0.0, y = 0.0, z = 0.0;
      do {
        z = 2.0 * rng.uniform() - 1.0;
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        x = rho * std::cos(phi);
        y = rho * std::sin(phi);
      } while (std::abs(x) < 1e-6 || std::abs(y) < 1e-6);
      pts(i, 0) = x;
      pts(i, 1) = y;
      pts(i, 2) = z;
      labels[i] = sphere_class(x, y);
    }
    return LabeledSet(std::move(pts), std::move(labels), 2);
  };
  LabeledSet support = draw(spec.sample_count);
  LabeledSet query = draw(spec.query_count);
  return Task{std::move(support), std::move(query), std::nullopt};
}

void TupleTaskSpec::validate() const {
  if (positions < 2) throw DomainError("tuple task: positions must be at least 2");
  if (symbols_per_slot < 2 || colors_per_slot < 2) throw DomainError("tuple task: need at least two symbols and two colours per slot");
  if (support_per_group < 1 || query_per_group < 1) throw DomainError("tuple task: group sizes must be positive");
  if (const auto* m = std::get_if<MonotheticRule>(&rule)) {
    if (m->slot >= positions) throw DomainError("tuple task: rule references a missing slot");
  } else {
    const auto& p = std::get<PolytheticRule>(rule);
    if (p.slot_a >= positions || p.slot_b >= positions) throw DomainError("tuple task: rule references a missing slot");
    if (p.slot_a == p.slot_b && p.attribute_a == p.attribute_b) {
      throw DomainError("tuple task: polythetic rule needs two distinct (slot, attribute) pairs");
    }
  }
}

Task gen_tuple_task(const TupleTaskSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t block = spec.symbols_per_slot + spec.colors_per_slot;
  auto cardinality = [&](TupleAttribute a) { return a == TupleAttribute::Symbol ? spec.symbols_per_slot : spec.colors_per_slot; };
  auto offset = [&](std::size_t slot, TupleAttribute a) {
    return slot * block + (a == TupleAttribute::Symbol ? 0 : spec.symbols_per_slot);
  };
  // Two distinct values per rule attribute, drawn once per task.
  auto two_values = [&](TupleAttribute a) { return rng.sample_without_replacement(cardinality(a), 2); };

  struct Fixed {
    std::size_t slot;
    TupleAttribute attr;
    std::size_t value;
  };
  // groups[g] = (class, pinned attribute values)
  std::vector<std::pair<int, std::vector<Fixed>>> groups;
  if (const auto* m = std::get_if<MonotheticRule>(&spec.rule)) {
    const auto vals = two_values(m->attribute);
    for (int c = 0; c < 2; ++c) groups.push_back({c, {{m->slot, m->attribute, vals[static_cast<std::size_t>(c)]}}});
  } else {
    const auto& p = std::get<PolytheticRule>(spec.rule);
    const auto va = two_values(p.attribute_a);
    const auto vb = two_values(p.attribute_b);
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        groups.push_back({static_cast<int>(a ^ b), {{p.slot_a, p.attribute_a, va[a]}, {p.slot_b, p.attribute_b, vb[b]}}});
      }
    }
  }

  auto build = [&](std::size_t per_group) {
    std::vector<std::size_t> order;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t i = 0; i < per_group; ++i) order.push_back(g);
    }
    rng.shuffle(order);
    Matrix x(order.size(), spec.feature_count());
    std::vector<int> labels(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& [cls, fixed] = groups[order[i]];
      for (std::size_t slot = 0; slot < spec.positions; ++slot) {
        for (TupleAttribute a : {TupleAttribute::Symbol, TupleAttribute::Color}) {
          std::size_t value = rng.below(cardinality(a));
          for (const auto& fx : fixed) {
            if (fx.slot == slot && fx.attr == a) value = fx.value;
          }
          x(i, offset(slot, a) + value) = 1.0;
        }
      }
      labels[i] = cls;
    }
    return LabeledSet(std::move(x), std::move(labels), 2);
  };

  LabeledSet support = build(spec.support_per_group);
  LabeledSet query = build(spec.query_per_group);
  return Task{std::move(support), std::move(query), std::nullopt};
}

}  // namespace polyselect
