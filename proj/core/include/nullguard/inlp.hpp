#pragma once

#include <cstdint>
#include <vector>

#include "nullguard/classifiers.hpp"
#include "nullguard/common.hpp"
#include "nullguard/linalg.hpp"

namespace nullguard {

enum class ClassifierKind { kLogistic, kSvm, kRegressor };

struct InlpConfig {
  int max_iters = 35;
  ClassifierKind classifier = ClassifierKind::kLogistic;
  TrainConfig train_cfg;
  double stop_margin = 0.01;  // stop once dev accuracy <= majority + margin
  Index min_rank = 1;
  bool refined = false;
  std::uint64_t seed = 0;
  double svd_tol = kDefaultSvdTol;
};

struct InlpResult {
  ProjectionMatrix p;  // final nullspace projector (Eq.-style recomputation)
  std::vector<ProjectionMatrix> rowspace_projs;
  std::vector<LinearModel> classifiers;
  std::vector<double> dev_accuracy_trace;
  std::vector<Index> rank_history;  // rank of the nullspace after each step
  double majority = 0.0;
  int iterations_run = 0;
};

/// The INLP loop: repeatedly train a protected-attribute classifier on the
/// projected data, record its dev accuracy, and fold its row space into the
/// removed subspace. The running projector is always recomputed from the sum
/// of rowspace projectors, never by multiplying nullspace projectors.
/// Stops when the classifier no longer beats the majority baseline by more
/// than stop_margin, when max_iters is reached, or when another step would
/// push rank(P) below min_rank. A classifier that triggers the stop is
/// discarded, so the trace length equals iterations_run.
InlpResult run_inlp(const Dataset& train, const Dataset& dev,
                    const InlpConfig& cfg);

/// Refinement variant: each iteration trains the Z-classifier only on the
/// training rows of one uniformly drawn main-task class (classes with fewer
/// than two distinct Z values are excluded from the draw). Stopping is still
/// judged on the full dev set.
InlpResult run_inlp_refined(const Dataset& train, const Dataset& dev,
                            const InlpConfig& cfg);

/// g(x) = P x applied row-wise.
Matrix guard(const InlpResult& result, const Matrix& x);

}  // namespace nullguard
