#include "polyselect/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "format.hpp"

namespace polyselect {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Dot: return "dot";
    case KernelKind::Cosine: return "cosine";
    case KernelKind::SqEuclidean: return "sq_euclidean";
    case KernelKind::Laplace: return "laplace";
  }
  return "?";
}

KernelKind parse_kernel(const std::string& name) {
  if (name == "dot") return KernelKind::Dot;
  if (name == "cosine" || name == "cos") return KernelKind::Cosine;
  if (name == "sq_euclidean" || name == "sqeuclidean" || name == "euclid" || name == "l2") return KernelKind::SqEuclidean;
  if (name == "laplace" || name == "l1") return KernelKind::Laplace;
  throw UsageError("unknown kernel '" + name + "' (expected dot, cosine, sq_euclidean or laplace)");
}

void AttentionConfig::validate() const {
  if (!(tau_inv > 0.0) || !std::isfinite(tau_inv)) throw DomainError("tau_inv must be positive and finite");
}

double similarity(KernelKind kind, std::span<const double> q, std::span<const double> s) {
  if (q.size() != s.size()) throw DomainError("similarity: vector lengths differ");
  switch (kind) {
    case KernelKind::Dot: {
      double acc = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) acc += q[i] * s[i];
      return acc;
    }
    case KernelKind::Cosine: {
      double dot = 0.0, qq = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        dot += q[i] * s[i];
        qq += q[i] * q[i];
        ss += s[i] * s[i];
      }
      if (qq == 0.0 || ss == 0.0) throw DomainError("cosine similarity of a zero vector");
      return dot / (std::sqrt(qq) * std::sqrt(ss));
    }
    case KernelKind::SqEuclidean: {
      double acc = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double d = q[i] - s[i];
        acc += d * d;
      }
      return -acc;
    }
    case KernelKind::Laplace: {
      double acc = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) acc += std::abs(q[i] - s[i]);
      return -acc;
    }
  }
  return 0.0;
}

Matrix similarity_matrix(KernelKind kind, const Matrix& queries, const Matrix& keys) {
  Matrix out(queries.rows(), keys.rows());
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    for (std::size_t j = 0; j < keys.rows(); ++j) out(i, j) = similarity(kind, queries.row(i), keys.row(j));
  }
  return out;
}

std::vector<double> softmax(std::span<const double> scores, double tau_inv) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double top = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(tau_inv * (scores[i] - top));
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

Matrix softmax_rows(const Matrix& scores, double tau_inv) {
  Matrix out(scores.rows(), scores.cols());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto row = softmax(scores.row(i), tau_inv);
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

int ClassProbabilities::predicted(std::size_t i) const {
  return static_cast<int>(argmax(probs_.row(i)));
}

std::vector<int> ClassProbabilities::predictions() const {
  std::vector<int> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = predicted(i);
  return out;
}

double ClassProbabilities::accuracy(std::span<const int> labels) const {
  if (labels.size() != rows()) throw DomainError("accuracy: label count does not match rows");
  if (labels.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows(); ++i) hits += predicted(i) == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rows());
}

ClassProbabilities attend(const Matrix& queries, const LabeledSet& support, const AttentionConfig& config) {
  config.validate();
  if (queries.cols() != support.dim()) throw DomainError("attend: query and support widths differ");
  const Matrix weights = softmax_rows(similarity_matrix(config.kind, queries, support.features()), config.tau_inv);
  const auto k = static_cast<std::size_t>(support.k());
  Matrix probs(queries.rows(), k);
  // weights * onehot(labels), without materialising the one-hot matrix.
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    for (std::size_t j = 0; j < support.size(); ++j) {
      probs(i, static_cast<std::size_t>(support.labels()[j])) += weights(i, j);
    }
  }
  return ClassProbabilities(std::move(probs));
}

ClassProbabilities attend_classify(const Task& task, const AttentionConfig& config) {
  task.validate();
  return attend(task.query.features(), task.support, config);
}

ConfidenceField confidence_field(const LabeledSet& support, const AttentionConfig& config, const GridSpec& grid) {
  if (support.dim() != 2) throw DomainError("confidence_field requires a two-feature support set");
  if (support.k() < 2) throw DomainError("confidence_field requires at least two classes");
  if (grid.x_steps < 1 || grid.y_steps < 1) throw DomainError("confidence_field: empty grid");
  auto axis = [](double lo, double hi, std::size_t steps) {
    std::vector<double> v(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      v[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    return v;
  };
  ConfidenceField field{axis(grid.x_min, grid.x_max, grid.x_steps), axis(grid.y_min, grid.y_max, grid.y_steps), {}};
  Matrix points(grid.x_steps * grid.y_steps, 2);
  for (std::size_t j = 0; j < grid.y_steps; ++j) {
    for (std::size_t i = 0; i < grid.x_steps; ++i) {
      points(j * grid.x_steps + i, 0) = field.xs[i];
      points(j * grid.x_steps + i, 1) = field.ys[j];
    }
  }
  const ClassProbabilities probs = attend(points, support, config);
  field.p1 = Matrix(grid.y_steps, grid.x_steps);
  for (std::size_t j = 0; j < grid.y_steps; ++j) {
    for (std::size_t i = 0; i < grid.x_steps; ++i) field.p1(j, i) = probs(j * grid.x_steps + i, 1);
  }
  return field;
}

void write_confidence_csv(const std::filesystem::path& path, const ConfidenceField& field) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "x,y,p1\n";
  for (std::size_t j = 0; j < field.ys.size(); ++j) {
    for (std::size_t i = 0; i < field.xs.size(); ++i) {
      out << fmt_double(field.xs[i]) << ',' << fmt_double(field.ys[j]) << ',' << fmt_double(field.p1(j, i)) << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace polyselect
