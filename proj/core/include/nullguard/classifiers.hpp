#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nullguard/common.hpp"

namespace nullguard {

enum class Loss { kLogistic, kHinge, kSquared };

/// Linear predictor trained by SGD. For k >= 3 classes, w holds one
/// one-vs-rest row per class (ascending class id); binary and regression
/// models are a single row. The intercept, when present, is not part of the
/// input-space direction and is ignored by projection construction.
struct LinearModel {
  Matrix w;
  std::optional<Vector> intercept;
  Loss loss = Loss::kLogistic;
  double l2 = 0.0;
  std::vector<int> classes;  // sorted distinct labels; empty for regression

  Index dim() const { return w.cols(); }
};

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.1;  // decayed as lr / sqrt(t)
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  bool zero_init = true;
  bool fit_intercept = false;
  bool shuffle = true;
};

/// One-vs-rest logistic regression; binary input yields a single row scoring
/// the higher class id. Deterministic given the config seed.
LinearModel fit_logistic(const Matrix& x, const std::vector<int>& z,
                         const TrainConfig& cfg);

/// Same contract as fit_logistic with L2-regularized hinge loss
/// (subgradient SGD).
LinearModel fit_svm(const Matrix& x, const std::vector<int>& z,
                    const TrainConfig& cfg);

/// Least-squares regressor (single row). Rejects constant targets, which
/// define no direction.
LinearModel fit_regressor(const Matrix& x, const std::vector<double>& z,
                          const TrainConfig& cfg);

/// Raw decision scores, one column per model row.
Matrix decision_scores(const LinearModel& m, const Matrix& x);

/// Predicted class labels. Binary: positive score selects the higher class.
/// Multiclass: argmax with ties broken toward the lowest class index.
/// Rejects regression models.
std::vector<int> predict(const LinearModel& m, const Matrix& x);

/// Continuous predictions of a squared-loss model.
Vector predict_values(const LinearModel& m, const Matrix& x);

double accuracy(const LinearModel& m, const Matrix& x,
                const std::vector<int>& z);

/// Accuracy of always answering the most frequent label.
double majority_accuracy(const std::vector<int>& z);

}  // namespace nullguard
