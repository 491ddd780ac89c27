#include "polyselect/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace polyselect {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DomainError("ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto rr = row(r);
    out.emplace_back(rr.begin(), rr.end());
  }
  return out;
}

std::string to_string(EncodingScheme scheme) {
  return scheme == EncodingScheme::PlusMinus ? "plus_minus" : "zero_one";
}

EncodingScheme parse_encoding(const std::string& name) {
  if (name == "plus_minus" || name == "pm" || name == "plusminus") return EncodingScheme::PlusMinus;
  if (name == "zero_one" || name == "01" || name == "zeroone") return EncodingScheme::ZeroOne;
  throw UsageError("unknown encoding '" + name + "' (expected plus_minus or zero_one)");
}

LabeledSet::LabeledSet(FeatureMatrix features, std::vector<int> labels, int k)
    : features_(std::move(features)), labels_(std::move(labels)), k_(k) {
  if (features_.rows() < 1 || features_.cols() < 1) throw DomainError("feature matrix must be non-empty");
  if (labels_.size() != features_.rows()) throw DomainError("label count does not match feature rows");
  if (k_ < 1) throw DomainError("class count must be positive");
  for (int y : labels_) {
    if (y < 0 || y >= k_) throw DomainError("label " + std::to_string(y) + " outside [0, k)");
  }
  for (double v : features_.values()) {
    if (!std::isfinite(v)) throw DomainError("non-finite feature value");
  }
}

std::vector<std::size_t> LabeledSet::members(int c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == c) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> LabeledSet::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(k_), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void Task::validate() const {
  if (support.dim() != query.dim()) throw DomainError("support and query feature counts differ");
  if (support.k() != query.k()) throw DomainError("support and query class counts differ");
}

Matrix one_hot(std::span<const int> labels, int k) {
  if (k < 1) throw DomainError("one_hot: k must be positive");
  Matrix v(labels.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw DomainError("one_hot: label outside [0, k)");
    v(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  return v;
}

std::vector<double> encode_bits(std::span<const int> bits, EncodingScheme scheme) {
  std::vector<double> out;
  out.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw DomainError("encode_bits: input is not binary");
    if (scheme == EncodingScheme::PlusMinus) {
      out.push_back(b == 1 ? 1.0 : -1.0);
    } else {
      out.push_back(static_cast<double>(b));
    }
  }
  return out;
}

std::vector<int> decode_bits(std::span<const double> values, EncodingScheme scheme) {
  const double one = 1.0;
  const double zero = scheme == EncodingScheme::PlusMinus ? -1.0 : 0.0;
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values) {
    if (v == one) {
      out.push_back(1);
    } else if (v == zero) {
      out.push_back(0);
    } else {
      throw DomainError("decode_bits: value is not a code word");
    }
  }
  return out;
}

std::vector<int> densify_labels(std::span<const std::string> labels, std::vector<std::string>* names) {
  std::unordered_map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    auto [it, inserted] = ids.emplace(l, static_cast<int>(ids.size()));
    if (inserted && names) names->push_back(l);
    out.push_back(it->second);
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t task_seed(std::uint64_t global_seed, std::uint64_t task_index) noexcept {
  return splitmix64(global_seed + (task_index + 1) * 0x9E3779B97F4A7C15ULL);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("Rng::below: bound must be positive");
  // Reject the short tail so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  if (k > n) throw DomainError("cannot sample more items than the population");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates from the front.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace polyselect
