#include "lbrg/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "lbrg/error.hpp"

namespace lbrg {

namespace {

constexpr double kProbClampLo = 1e-9;
constexpr double kProbClampHi = 1.0 - 1e-9;

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_prob(double p) { return std::clamp(p, kProbClampLo, kProbClampHi); }

double decision(const std::vector<double>& weights, double bias,
                std::span<const double> x) {
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
  return z;
}

double f1_score(int tp, int fp, int fn) {
  const int denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * tp / denom;
}

}  // namespace

double LabelClassifier::probability(std::span<const double> x) const {
  return clamp_prob(sigmoid(decision(weights, bias, x)));
}

bool LabelClassifier::decide(std::span<const double> x) const {
  return probability(x) >= threshold;
}

double bce_l2_loss(const Matrix& X, const std::vector<std::uint8_t>& y,
                   std::span<const double> weights, double bias,
                   double l2_strength) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto row = X.row(i);
    double z = bias;
    for (std::size_t j = 0; j < X.cols; ++j) z += weights[j] * row[j];
    const double p = clamp_prob(sigmoid(z));
    loss += y[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  loss /= static_cast<double>(X.rows);
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return loss + 0.5 * l2_strength * reg;
}

void bce_l2_gradient(const Matrix& X, const std::vector<std::uint8_t>& y,
                     std::span<const double> weights, double bias,
                     double l2_strength, std::span<double> grad_weights,
                     double& grad_bias) {
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  grad_bias = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto row = X.row(i);
    double z = bias;
    for (std::size_t j = 0; j < X.cols; ++j) z += weights[j] * row[j];
    const double residual = sigmoid(z) - (y[i] ? 1.0 : 0.0);
    for (std::size_t j = 0; j < X.cols; ++j) {
      grad_weights[j] += residual * row[j];
    }
    grad_bias += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(X.rows);
  for (std::size_t j = 0; j < X.cols; ++j) {
    grad_weights[j] = grad_weights[j] * inv_n + l2_strength * weights[j];
  }
  grad_bias *= inv_n;
}

LabelClassifier train_label_classifier(const Matrix& X,
                                       const std::vector<std::uint8_t>& y,
                                       double l2_strength,
                                       int max_iterations) {
  if (X.rows < 2 || X.rows != y.size()) {
    throw Error(ErrorKind::invalid_argument,
                "training needs n >= 2 aligned rows and targets");
  }
  for (double v : X.data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::invalid_argument,
                  "non-finite feature in training matrix");
    }
  }

  LabelClassifier clf;
  clf.weights.assign(X.cols, 0.0);
  clf.training_meta.l2_strength = l2_strength;

  const std::size_t positives =
      static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (positives == 0 || positives == y.size()) {
    // Single-class targets: constant classifier at the empirical base rate.
    const double rate =
        clamp_prob(static_cast<double>(positives) / static_cast<double>(y.size()));
    clf.bias = std::log(rate / (1.0 - rate));
    clf.training_meta.degenerate = true;
    clf.training_meta.final_loss = bce_l2_loss(X, y, clf.weights, clf.bias,
                                               l2_strength);
    return clf;
  }

  std::vector<double> grad(X.cols);
  std::vector<double> trial(X.cols);
  double loss = bce_l2_loss(X, y, clf.weights, clf.bias, l2_strength);
  double step = 1.0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    double grad_bias = 0.0;
    bce_l2_gradient(X, y, clf.weights, clf.bias, l2_strength, grad, grad_bias);

    double grad_sq = grad_bias * grad_bias;
    for (double g : grad) grad_sq += g * g;
    if (std::sqrt(grad_sq) <= kGradientTolerance) break;

    // Backtracking line search (Armijo); each accepted step strictly
    // decreases the objective.
    constexpr double kArmijo = 1e-4;
    step = std::min(step * 2.0, 1e4);
    double trial_loss = 0.0;
    double trial_bias = 0.0;
    while (true) {
      for (std::size_t j = 0; j < X.cols; ++j) {
        trial[j] = clf.weights[j] - step * grad[j];
      }
      trial_bias = clf.bias - step * grad_bias;
      trial_loss = bce_l2_loss(X, y, trial, trial_bias, l2_strength);
      if (trial_loss <= loss - kArmijo * step * grad_sq) break;
      step *= 0.5;
      if (step < 1e-16) break;
    }
    if (step < 1e-16) break;  // no descent possible at double precision

    clf.weights.swap(trial);
    clf.bias = trial_bias;
    loss = trial_loss;
    clf.training_meta.loss_history.push_back(loss);
    clf.training_meta.iterations_run = iter + 1;
  }
  clf.training_meta.final_loss = loss;
  return clf;
}

double tune_threshold(const std::vector<double>& probabilities,
                      const std::vector<std::uint8_t>& y_val, bool* warning) {
  if (probabilities.empty() || probabilities.size() != y_val.size()) {
    throw Error(ErrorKind::invalid_argument,
                "probabilities and targets must be aligned and non-empty");
  }
  if (warning != nullptr) *warning = false;
  if (std::count(y_val.begin(), y_val.end(), 1) == 0) {
    if (warning != nullptr) *warning = true;
    return 0.5;
  }

  std::vector<double> sorted(probabilities);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<double> candidates;
  candidates.reserve(sorted.size());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  }
  candidates.push_back(0.5);
  std::sort(candidates.begin(), candidates.end());

  double best_threshold = candidates.front();
  double best_f1 = -1.0;
  for (double t : candidates) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      const bool predicted = probabilities[i] >= t;
      if (predicted && y_val[i]) ++tp;
      if (predicted && !y_val[i]) ++fp;
      if (!predicted && y_val[i]) ++fn;
    }
    const double f1 = f1_score(tp, fp, fn);
    if (f1 > best_f1) {  // strict: ties keep the smallest threshold
      best_f1 = f1;
      best_threshold = t;
    }
  }
  return best_threshold;
}

Standardizer Standardizer::fit(const Matrix& X) {
  Standardizer s;
  s.mean.assign(X.cols, 0.0);
  s.stddev.assign(X.cols, 1.0);
  if (X.rows == 0) return s;
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto row = X.row(i);
    for (std::size_t j = 0; j < X.cols; ++j) s.mean[j] += row[j];
  }
  for (double& m : s.mean) m /= static_cast<double>(X.rows);
  std::vector<double> var(X.cols, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto row = X.row(i);
    for (std::size_t j = 0; j < X.cols; ++j) {
      const double d = row[j] - s.mean[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < X.cols; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(X.rows));
    s.stddev[j] = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
  if (X.cols != mean.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                "standardizer fitted on dimension " +
                    std::to_string(mean.size()) + ", got " +
                    std::to_string(X.cols));
  }
  Matrix out(X.rows, X.cols);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto src = X.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < X.cols; ++j) {
      dst[j] = (src[j] - mean[j]) / stddev[j];
    }
  }
  return out;
}

std::vector<double> Standardizer::apply(std::span<const float> x) const {
  if (x.size() != mean.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                "standardizer fitted on dimension " +
                    std::to_string(mean.size()) + ", got " +
                    std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = (static_cast<double>(x[j]) - mean[j]) / stddev[j];
  }
  return out;
}

BinaryLabelVector predict_binary_labels(const ClassifierEnsemble& ensemble,
                                        std::span<const float> classifier_vec) {
  const std::vector<double> x = ensemble.standardizer.apply(classifier_vec);
  BinaryLabelVector bits;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    bits.bits[i] = ensemble.classifiers[i].decide(x);
  }
  bits.fix_other();
  return bits;
}

ClassifierEnsemble train_ensemble(const Matrix& train_X,
                                  const std::vector<BinaryLabelVector>& train_y,
                                  const Matrix& val_X,
                                  const std::vector<BinaryLabelVector>& val_y,
                                  const EnsembleTrainOptions& options) {
  if (train_X.rows != train_y.size() || val_X.rows != val_y.size()) {
    throw Error(ErrorKind::invalid_argument,
                "features and labels must be aligned");
  }
  if (val_X.rows == 0) {
    throw Error(ErrorKind::invalid_argument,
                "threshold tuning needs a non-empty validation split");
  }

  ClassifierEnsemble ensemble;
  ensemble.standardizer = Standardizer::fit(train_X);
  const Matrix Xt = ensemble.standardizer.apply(train_X);
  const Matrix Xv = ensemble.standardizer.apply(val_X);

  auto fit_one = [&](std::size_t label) {
    std::vector<std::uint8_t> yt(Xt.rows);
    for (std::size_t i = 0; i < Xt.rows; ++i) yt[i] = train_y[i][label];
    LabelClassifier clf = train_label_classifier(
        Xt, yt, options.l2_strength, options.max_iterations);
    clf.label_index = static_cast<int>(label);

    std::vector<double> probs(Xv.rows);
    std::vector<std::uint8_t> yv(Xv.rows);
    for (std::size_t i = 0; i < Xv.rows; ++i) {
      probs[i] = clf.probability(Xv.row(i));
      yv[i] = val_y[i][label];
    }
    bool warn = false;
    clf.threshold = tune_threshold(probs, yv, &warn);
    clf.training_meta.threshold_warning = warn;
    return clf;
  };

  ensemble.classifiers.resize(kNumLabels);
  if (options.parallel) {
    std::vector<std::future<LabelClassifier>> futures;
    futures.reserve(kNumLabels);
    for (std::size_t label = 0; label < kNumLabels; ++label) {
      futures.push_back(
          std::async(std::launch::async, fit_one, label));
    }
    for (std::size_t label = 0; label < kNumLabels; ++label) {
      ensemble.classifiers[label] = futures[label].get();
    }
  } else {
    for (std::size_t label = 0; label < kNumLabels; ++label) {
      ensemble.classifiers[label] = fit_one(label);
    }
  }
  return ensemble;
}

std::vector<LabelF1Row> evaluate_classifiers(
    const ClassifierEnsemble& ensemble, const Matrix& test_X,
    const std::vector<LabelVector>& test_labels) {
  if (test_X.rows != test_labels.size()) {
    throw Error(ErrorKind::invalid_argument,
                "features and labels must be aligned");
  }
  const Matrix X = ensemble.standardizer.apply(test_X);

  std::vector<LabelF1Row> rows(kNumLabels);
  for (std::size_t label = 0; label < kNumLabels; ++label) {
    rows[label].label = kLabelNames[label];
  }
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto x = X.row(i);
    for (std::size_t label = 0; label < kNumLabels; ++label) {
      const bool predicted = ensemble.classifiers[label].decide(x);
      const bool actual = test_labels[i][label] == LabelState::positive;
      if (predicted && actual) ++rows[label].true_positives;
      if (predicted && !actual) ++rows[label].false_positives;
      if (!predicted && actual) ++rows[label].false_negatives;
    }
  }
  for (auto& row : rows) {
    row.f1 = f1_score(row.true_positives, row.false_positives,
                      row.false_negatives);
    row.both_empty = row.true_positives + row.false_positives == 0 &&
                     row.true_positives + row.false_negatives == 0;
  }
  return rows;
}

}  // namespace lbrg
