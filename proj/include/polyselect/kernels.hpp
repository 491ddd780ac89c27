// Attention similarity kernels, temperature softmax and the attentional
// classifier: probabilities = softmax_rows(tau * S(Q, K)) * onehot(labels).
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "polyselect/core.hpp"

namespace polyselect {

enum class KernelKind { Dot, Cosine, SqEuclidean, Laplace };

std::string to_string(KernelKind kind);
KernelKind parse_kernel(const std::string& name);

struct AttentionConfig {
  KernelKind kind = KernelKind::Dot;
  /// Multiplies scores inside the softmax (the inverse temperature).
  double tau_inv = 1.0;

  void validate() const;
};

/// Dot: q.s; Cosine: q.s/(|q||s|); SqEuclidean: -|q-s|^2; Laplace: -|q-s|_1.
/// Throws DomainError on length mismatch or a zero vector under Cosine.
double similarity(KernelKind kind, std::span<const double> q, std::span<const double> s);

/// Scores of every query row against every key row.
Matrix similarity_matrix(KernelKind kind, const Matrix& queries, const Matrix& keys);

/// Row i becomes exp(tau*(x_i - max x_i)) / sum; never overflows.
Matrix softmax_rows(const Matrix& scores, double tau_inv);
std::vector<double> softmax(std::span<const double> scores, double tau_inv);

/// Row-stochastic |Q| x k matrix of class probabilities.
class ClassProbabilities {
 public:
  ClassProbabilities() = default;
  explicit ClassProbabilities(Matrix probs) : probs_(std::move(probs)) {}

  const Matrix& matrix() const noexcept { return probs_; }
  std::size_t rows() const noexcept { return probs_.rows(); }
  std::size_t classes() const noexcept { return probs_.cols(); }
  double operator()(std::size_t i, std::size_t c) const { return probs_(i, c); }

  /// Row argmax, ties to the lowest class id.
  int predicted(std::size_t i) const;
  std::vector<int> predictions() const;
  /// Fraction of rows whose prediction equals the given label.
  double accuracy(std::span<const int> labels) const;

 private:
  Matrix probs_;
};

/// Attends from each query row over the support set.
ClassProbabilities attend(const Matrix& queries, const LabeledSet& support, const AttentionConfig& config);
ClassProbabilities attend_classify(const Task& task, const AttentionConfig& config);

struct GridSpec {
  double x_min = -2.0;
  double x_max = 2.0;
  double y_min = -2.0;
  double y_max = 2.0;
  std::size_t x_steps = 101;
  std::size_t y_steps = 101;
};

struct ConfidenceField {
  std::vector<double> xs;
  std::vector<double> ys;
  /// p1(j, i) = P(class 1) at (xs[i], ys[j]).
  Matrix p1;
};

/// Evaluates P(class 1) on every grid point for a two-feature support set.
ConfidenceField confidence_field(const LabeledSet& support, const AttentionConfig& config, const GridSpec& grid);

/// CSV with header x,y,p1; one row per grid point, x varying fastest.
void write_confidence_csv(const std::filesystem::path& path, const ConfidenceField& field);

}  // namespace polyselect
