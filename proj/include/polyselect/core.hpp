// Shared data model: matrices, labelled sets, tasks, encodings and seeding.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyselect {

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed command lines, recipes and config files.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::vector<double> column(std::size_t c) const;
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Examples by features. Invariants (finite, non-empty) are enforced by
/// LabeledSet rather than by the alias itself.
using FeatureMatrix = Matrix;

enum class EncodingScheme { PlusMinus, ZeroOne };

std::string to_string(EncodingScheme scheme);
EncodingScheme parse_encoding(const std::string& name);

/// Features plus dense class ids in [0, k).
class LabeledSet {
 public:
  LabeledSet() = default;
  /// Throws DomainError unless features are finite and non-empty, labels
  /// match the row count and every label is below k.
  LabeledSet(FeatureMatrix features, std::vector<int> labels, int k);

  const FeatureMatrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return features_.cols(); }

  /// Row indices of every example in class c, in order.
  std::vector<std::size_t> members(int c) const;
  /// Number of examples per class.
  std::vector<std::size_t> class_counts() const;

  friend bool operator==(const LabeledSet&, const LabeledSet&) = default;

 private:
  FeatureMatrix features_;
  std::vector<int> labels_;
  int k_ = 0;
};

/// Generation metadata for Boolean (XOR) tasks.
struct TaskMeta {
  std::vector<std::size_t> active_indices;
  std::size_t alpha = 0;
  std::size_t beta_irrelevant = 0;
  double p = 0.5;
  std::size_t r = 1;
  EncodingScheme encoding = EncodingScheme::PlusMinus;
  std::uint64_t seed = 0;

  friend bool operator==(const TaskMeta&, const TaskMeta&) = default;
};

struct Task {
  LabeledSet support;
  LabeledSet query;
  std::optional<TaskMeta> meta;

  /// Throws DomainError if support and query disagree on width or k.
  void validate() const;

  friend bool operator==(const Task&, const Task&) = default;
};

/// One row per label with a single 1 in that label's column.
Matrix one_hot(std::span<const int> labels, int k);

std::vector<double> encode_bits(std::span<const int> bits, EncodingScheme scheme);
std::vector<int> decode_bits(std::span<const double> values, EncodingScheme scheme);

/// Maps arbitrary external labels to dense ids in order of first appearance.
std::vector<int> densify_labels(std::span<const std::string> labels, std::vector<std::string>* names = nullptr);

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Per-task seed: splitmix64(global_seed + (task_index + 1) * 0x9E3779B97F4A7C15).
std::uint64_t task_seed(std::uint64_t global_seed, std::uint64_t task_index) noexcept;

/// Seedable generator with platform-stable derived draws. Wraps mt19937_64
/// for the raw stream; the conversions below are hand-written because the
/// standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound), bound > 0, rejection-sampled.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  /// k distinct values from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace polyselect
