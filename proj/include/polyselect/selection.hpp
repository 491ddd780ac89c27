// Within-class self-attention feature scoring and the select-then-attend
// pipeline: standardise support -> iterate class-wise self-attention ->
// score features by residual dispersion -> rescale or mask -> classify.
//
// Scores are high for features whose variation survives the within-class
// self-attention (the discriminative ones) and low for features that wash
// out towards their class mean.
#pragma once

#include <filesystem>
#include <vector>

#include "polyselect/core.hpp"
#include "polyselect/kernels.hpp"

namespace polyselect {

enum class Dispersion { MeanAbsoluteDeviation, StandardDeviation };
enum class SelectionMode { SoftRescale, SoftRescaleNormalized, TopK };
/// Which features the scores multiply before classification.
enum class RescaleSpace { Standardized, Raw };
/// PooledSupport scores each feature over the whole updated support;
/// PerClassMean averages per-class dispersions (experimental).
enum class ScorePooling { PooledSupport, PerClassMean };

std::string to_string(Dispersion d);
std::string to_string(SelectionMode m);
Dispersion parse_dispersion(const std::string& name);
SelectionMode parse_selection_mode(const std::string& name);

struct SelectionConfig {
  double epsilon = 1e-8;
  double tau_inv = 1.0;
  std::size_t repetitions = 10;
  Dispersion dispersion = Dispersion::MeanAbsoluteDeviation;
  SelectionMode mode = SelectionMode::SoftRescale;
  /// Only read when mode == TopK.
  std::size_t top_k = 1;
  RescaleSpace space = RescaleSpace::Standardized;
  ScorePooling pooling = ScorePooling::PooledSupport;

  /// Throws DomainError on epsilon <= 0, tau <= 0 or top_k outside [1, n].
  void validate(std::size_t n) const;
};

struct FeatureScores {
  std::vector<double> values;
};

struct Standardization {
  std::vector<double> mean;
  /// Population standard deviation per feature.
  std::vector<double> std;
  double epsilon = 1e-8;

  /// (x - mean) / (std + epsilon), row-wise.
  Matrix apply(const Matrix& x) const;
};

/// Statistics over all support rows regardless of class.
Standardization fit_standardization(const Matrix& support, double epsilon);

struct StandardizedSupport {
  LabeledSet support;
  Standardization stats;
};

/// Requires at least two support rows.
StandardizedSupport standardize(const LabeledSet& support, double epsilon = 1e-8);

/// X <- softmax_rows(tau X X^T) X. A single row is returned unchanged.
Matrix self_attention_round(const Matrix& class_features, double tau_inv);

/// Applies `rounds` self-attention rounds within every class of the set.
LabeledSet within_class_attention(const LabeledSet& set, double tau_inv, std::size_t rounds);

/// Per-column dispersion (population statistics).
std::vector<double> column_dispersion(const Matrix& x, Dispersion kind);

/// Scores computed from a set that is already standardised.
FeatureScores score_standardized(const LabeledSet& standardized, const SelectionConfig& config);

/// Full scoring: standardise, attend within classes, measure dispersion.
FeatureScores feature_scores(const LabeledSet& support, const SelectionConfig& config);

/// Scores after 0, 1, ..., R rounds (row r = scores after r rounds).
std::vector<std::vector<double>> score_trajectory(const LabeledSet& support, const SelectionConfig& config);

/// Per-feature multipliers for the configured mode: s, s/|s|_1*n, or a
/// 0/1 mask of the top_k highest scores (ties to the lowest index).
std::vector<double> selection_weights(const FeatureScores& scores, const SelectionConfig& config);
std::vector<double> top_k_mask(std::span<const double> scores, std::size_t k);

/// Standardises support and query with support statistics (or leaves them
/// raw, per config.space) and multiplies every feature by its weight.
Task apply_selection(const Task& task, const FeatureScores& scores, const SelectionConfig& config);

ClassProbabilities fs_classify(const Task& task, const AttentionConfig& attn, const SelectionConfig& sel);

/// CSV with header feature_index,score.
void write_scores_csv(const std::filesystem::path& path, const FeatureScores& scores);

}  // namespace polyselect
