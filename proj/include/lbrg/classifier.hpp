#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lbrg/labels.hpp"

namespace lbrg {

// Row-major dense matrix, the minimal thing the trainers need.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) {
    return {data.data() + i * cols, cols};
  }
};

struct TrainingMeta {
  int iterations_run = 0;
  double final_loss = 0.0;
  double l2_strength = 0.0;
  bool degenerate = false;       // single-class targets, constant output
  bool threshold_warning = false;  // no validation positives, kept 0.5
  std::vector<double> loss_history;  // objective after each accepted step
};

// One binary logistic regression over classifier-space embeddings.
struct LabelClassifier {
  int label_index = 0;
  std::vector<double> weights;
  double bias = 0.0;
  double threshold = 0.5;  // strictly inside (0, 1)
  TrainingMeta training_meta;

  double probability(std::span<const double> x) const;
  bool decide(std::span<const double> x) const;
};

// Mean binary cross-entropy plus (l2/2)*|w|^2 (bias unregularized), with
// probabilities clamped to [1e-9, 1-1e-9] before the logs.
double bce_l2_loss(const Matrix& X, const std::vector<std::uint8_t>& y,
                   std::span<const double> weights, double bias,
                   double l2_strength);

// Analytic gradient of bce_l2_loss; grad_weights must have size X.cols.
void bce_l2_gradient(const Matrix& X, const std::vector<std::uint8_t>& y,
                     std::span<const double> weights, double bias,
                     double l2_strength, std::span<double> grad_weights,
                     double& grad_bias);

inline constexpr int kDefaultMaxIterations = 500;
inline constexpr double kDefaultL2Strength = 1.0;
inline constexpr double kGradientTolerance = 1e-6;

// Full-batch gradient descent with backtracking line search from zero
// initialization; the objective is convex, so the optimum is solver
// independent. Stops at gradient norm <= 1e-6 or max_iterations. Targets
// with a single class yield a constant-probability classifier at the
// empirical base rate, flagged degenerate.
LabelClassifier train_label_classifier(const Matrix& X,
                                       const std::vector<std::uint8_t>& y,
                                       double l2_strength = kDefaultL2Strength,
                                       int max_iterations =
                                           kDefaultMaxIterations);

// Candidate thresholds are midpoints between consecutive distinct sorted
// probabilities plus 0.5; returns the one maximizing F1 of (prob >= t)
// against y, ties toward the smallest. With no positives in y, F1 is
// undefined everywhere: returns 0.5 and sets *warning.
double tune_threshold(const std::vector<double>& probabilities,
                      const std::vector<std::uint8_t>& y_val,
                      bool* warning = nullptr);

// Per-dimension standardization fitted on the training split and reused for
// validation tuning and inference.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at 1e-12, constant dims pass through

  static Standardizer fit(const Matrix& X);
  Matrix apply(const Matrix& X) const;
  std::vector<double> apply(std::span<const float> x) const;
};

struct ClassifierEnsemble {
  Standardizer standardizer;
  std::vector<LabelClassifier> classifiers;  // exactly 14, canonical order

  std::size_t feature_dim() const { return standardizer.mean.size(); }
};

// Thresholded per-label decisions over a raw classifier-space vector, with
// the Other bit derived from the 14 decisions.
BinaryLabelVector predict_binary_labels(const ClassifierEnsemble& ensemble,
                                        std::span<const float> classifier_vec);

struct EnsembleTrainOptions {
  double l2_strength = kDefaultL2Strength;
  int max_iterations = kDefaultMaxIterations;
  bool parallel = true;  // the 14 fits are independent
};

// Fits the 14 per-label classifiers on the training matrix and tunes each
// decision threshold for F1 on the validation matrix. Targets come from
// binarized extracted labels.
ClassifierEnsemble train_ensemble(const Matrix& train_X,
                                  const std::vector<BinaryLabelVector>& train_y,
                                  const Matrix& val_X,
                                  const std::vector<BinaryLabelVector>& val_y,
                                  const EnsembleTrainOptions& options = {});

struct LabelF1Row {
  std::string label;
  double f1 = 0.0;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  bool both_empty = false;  // no predicted and no actual positives
};

// Per-label F1 of predicted positives against binarized reference labels.
// Zero-division reports 0.00, with both_empty marking the vacuous case.
std::vector<LabelF1Row> evaluate_classifiers(
    const ClassifierEnsemble& ensemble, const Matrix& test_X,
    const std::vector<LabelVector>& test_labels);

inline constexpr uint32_t kEnsembleFormatVersion = 1;

// JSON with exact double round-trip, so reloaded ensembles predict
// bit-identically.
void save_ensemble(const std::filesystem::path& path,
                   const ClassifierEnsemble& ensemble);
ClassifierEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace lbrg
