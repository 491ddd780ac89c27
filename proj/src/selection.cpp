#include "polyselect/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "format.hpp"

namespace polyselect {

std::string to_string(Dispersion d) {
  return d == Dispersion::MeanAbsoluteDeviation ? "mad" : "std";
}

std::string to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::SoftRescale: return "soft";
    case SelectionMode::SoftRescaleNormalized: return "soft_norm";
    case SelectionMode::TopK: return "topk";
  }
  return "?";
}

Dispersion parse_dispersion(const std::string& name) {
  if (name == "mad") return Dispersion::MeanAbsoluteDeviation;
  if (name == "std" || name == "sd") return Dispersion::StandardDeviation;
  throw UsageError("unknown dispersion '" + name + "' (expected mad or std)");
}

SelectionMode parse_selection_mode(const std::string& name) {
  if (name == "soft") return SelectionMode::SoftRescale;
  if (name == "soft_norm") return SelectionMode::SoftRescaleNormalized;
  if (name == "topk") return SelectionMode::TopK;
  throw UsageError("unknown selection mode '" + name + "' (expected soft, soft_norm or topk)");
}

void SelectionConfig::validate(std::size_t n) const {
  if (!(epsilon > 0.0)) throw DomainError("selection epsilon must be positive");
  if (!(tau_inv > 0.0) || !std::isfinite(tau_inv)) throw DomainError("selection tau_inv must be positive and finite");
  if (mode == SelectionMode::TopK && (top_k < 1 || top_k > n)) {
    throw DomainError("top-k: k=" + std::to_string(top_k) + " outside [1, " + std::to_string(n) + "]");
  }
}

Matrix Standardization::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw DomainError("standardization width mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t f = 0; f < x.cols(); ++f) out(i, f) = (x(i, f) - mean[f]) / (std[f] + epsilon);
  }
  return out;
}

Standardization fit_standardization(const Matrix& support, double epsilon) {
  const std::size_t rows = support.rows();
  const std::size_t cols = support.cols();
  Standardization st{std::vector<double>(cols, 0.0), std::vector<double>(cols, 0.0), epsilon};
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t f = 0; f < cols; ++f) st.mean[f] += support(i, f);
  }
  for (double& m : st.mean) m /= static_cast<double>(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t f = 0; f < cols; ++f) {
      const double d = support(i, f) - st.mean[f];
      st.std[f] += d * d;
    }
  }
  for (double& s : st.std) s = std::sqrt(s / static_cast<double>(rows));
  return st;
}

StandardizedSupport standardize(const LabeledSet& support, double epsilon) {
  if (support.size() < 2) throw DomainError("standardize: need at least two support rows");
  if (!(epsilon > 0.0)) throw DomainError("standardize: epsilon must be positive");
  Standardization st = fit_standardization(support.features(), epsilon);
  return {LabeledSet(st.apply(support.features()), support.labels(), support.k()), std::move(st)};
}

Matrix self_attention_round(const Matrix& x, double tau_inv) {
  if (x.rows() <= 1) return x;
  const Matrix weights = softmax_rows(similarity_matrix(KernelKind::Dot, x, x), tau_inv);
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t j = 0; j < x.rows(); ++j) {
      const double w = weights(i, j);
      const auto src = x.row(j);
      for (std::size_t f = 0; f < x.cols(); ++f) dst[f] += w * src[f];
    }
  }
  return out;
}

LabeledSet within_class_attention(const LabeledSet& set, double tau_inv, std::size_t rounds) {
  Matrix features = set.features();
  for (int c = 0; c < set.k(); ++c) {
    const auto idx = set.members(c);
    if (idx.empty()) continue;
    Matrix block(idx.size(), set.dim());
    for (std::size_t i = 0; i < idx.size(); ++i) std::ranges::copy(features.row(idx[i]), block.row(i).begin());
    for (std::size_t r = 0; r < rounds; ++r) block = self_attention_round(block, tau_inv);
    for (std::size_t i = 0; i < idx.size(); ++i) std::ranges::copy(block.row(i), features.row(idx[i]).begin());
  }
  return LabeledSet(std::move(features), set.labels(), set.k());
}

std::vector<double> column_dispersion(const Matrix& x, Dispersion kind) {
  std::vector<double> out(x.cols(), 0.0);
  if (x.rows() == 0) return out;
  const double n = static_cast<double>(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, f);
    mean /= n;
    double acc = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double d = x(i, f) - mean;
      acc += kind == Dispersion::MeanAbsoluteDeviation ? std::abs(d) : d * d;
    }
    out[f] = kind == Dispersion::MeanAbsoluteDeviation ? acc / n : std::sqrt(acc / n);
  }
  return out;
}

namespace {

std::vector<double> pooled_scores(const LabeledSet& set, const SelectionConfig& config) {
  if (config.pooling == ScorePooling::PooledSupport) return column_dispersion(set.features(), config.dispersion);
  std::vector<double> acc(set.dim(), 0.0);
  int classes = 0;
  for (int c = 0; c < set.k(); ++c) {
    const auto idx = set.members(c);
    if (idx.empty()) continue;
    Matrix block(idx.size(), set.dim());
    for (std::size_t i = 0; i < idx.size(); ++i) std::ranges::copy(set.features().row(idx[i]), block.row(i).begin());
    const auto d = column_dispersion(block, config.dispersion);
    for (std::size_t f = 0; f < d.size(); ++f) acc[f] += d[f];
    ++classes;
  }
  for (double& v : acc) v /= static_cast<double>(classes);
  return acc;
}

}  // namespace

FeatureScores score_standardized(const LabeledSet& standardized, const SelectionConfig& config) {
  config.validate(standardized.dim());
  const LabeledSet attended = within_class_attention(standardized, config.tau_inv, config.repetitions);
  return {pooled_scores(attended, config)};
}

FeatureScores feature_scores(const LabeledSet& support, const SelectionConfig& config) {
  return score_standardized(standardize(support, config.epsilon).support, config);
}

std::vector<std::vector<double>> score_trajectory(const LabeledSet& support, const SelectionConfig& config) {
  config.validate(support.dim());
  LabeledSet current = standardize(support, config.epsilon).support;
  std::vector<std::vector<double>> out;
  out.push_back(pooled_scores(current, config));
  for (std::size_t r = 0; r < config.repetitions; ++r) {
    current = within_class_attention(current, config.tau_inv, 1);
    out.push_back(pooled_scores(current, config));
  }
  return out;
}

std::vector<double> top_k_mask(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) throw DomainError("top-k: k outside [1, n]");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> mask(scores.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) mask[order[i]] = 1.0;
  return mask;
}

std::vector<double> selection_weights(const FeatureScores& scores, const SelectionConfig& config) {
  const std::size_t n = scores.values.size();
  config.validate(n);
  switch (config.mode) {
    case SelectionMode::SoftRescale:
      return scores.values;
    case SelectionMode::SoftRescaleNormalized: {
      const double l1 = std::accumulate(scores.values.begin(), scores.values.end(), 0.0,
                                        [](double a, double b) { return a + std::abs(b); });
      // All-zero scores carry no ranking; leave the features as they are.
      if (l1 == 0.0) return std::vector<double>(n, 1.0);
      std::vector<double> out(n);
      for (std::size_t f = 0; f < n; ++f) out[f] = scores.values[f] / l1 * static_cast<double>(n);
      return out;
    }
    case SelectionMode::TopK:
      return top_k_mask(scores.values, config.top_k);
  }
  return scores.values;
}

Task apply_selection(const Task& task, const FeatureScores& scores, const SelectionConfig& config) {
  task.validate();
  if (scores.values.size() != task.support.dim()) throw DomainError("apply_selection: score count does not match features");
  const auto weights = selection_weights(scores, config);

  Matrix support = task.support.features();
  Matrix query = task.query.features();
  if (config.space == RescaleSpace::Standardized) {
    const Standardization st = fit_standardization(support, config.epsilon);
    support = st.apply(support);
    query = st.apply(query);
  }
  for (Matrix* m : {&support, &query}) {
    for (std::size_t i = 0; i < m->rows(); ++i) {
      auto row = m->row(i);
      for (std::size_t f = 0; f < row.size(); ++f) row[f] *= weights[f];
    }
  }
  return Task{LabeledSet(std::move(support), task.support.labels(), task.support.k()),
              LabeledSet(std::move(query), task.query.labels(), task.query.k()), task.meta};
}

ClassProbabilities fs_classify(const Task& task, const AttentionConfig& attn, const SelectionConfig& sel) {
  task.validate();
  const FeatureScores scores = feature_scores(task.support, sel);
  return attend_classify(apply_selection(task, scores, sel), attn);
}

void write_scores_csv(const std::filesystem::path& path, const FeatureScores& scores) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "feature_index,score\n";
  for (std::size_t f = 0; f < scores.values.size(); ++f) out << f << ',' << fmt_double(scores.values[f]) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace polyselect
