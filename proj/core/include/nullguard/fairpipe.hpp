#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "nullguard/classifiers.hpp"
#include "nullguard/common.hpp"
#include "nullguard/inlp.hpp"

namespace nullguard {

/// Per-class true-positive-rate gaps between the two protected groups.
/// Classes where either group has no positive-support rows get no gap and
/// are listed in `undefined_classes`.
struct TprGaps {
  std::map<int, double> per_class;  // TPR(group 1) - TPR(group 0)
  std::vector<int> undefined_classes;
};

TprGaps tpr_gap(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                const std::vector<int>& z);

/// Root-mean-square over the defined per-class gaps.
double gap_rms(const std::map<int, double>& gaps);

/// Pearson correlation between per-class gaps and per-class group
/// proportions, over the classes present in both maps (>= 3 required).
double gap_proportion_correlation(const std::map<int, double>& gaps,
                                  const std::map<int, double>& proportions);

struct FairnessReport {
  TprGaps gaps_before;
  TprGaps gaps_after;
  double rms_gap_before = 0.0;
  double rms_gap_after = 0.0;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
  std::optional<double> gap_proportion_correlation_before;
  std::optional<double> gap_proportion_correlation_after;
  std::map<int, double> group1_proportion_by_class;  // over all provided rows
  Index projection_rank = 0;
  int inlp_iterations = 0;
};

struct SplitIndices {
  std::vector<Index> train;
  std::vector<Index> dev;
  std::vector<Index> test;
};

/// Shuffled proportional split of [0, n). Proportions are normalized; every
/// partition receives at least one row.
SplitIndices make_split(Index n, double train_frac, double dev_frac,
                        double test_frac, std::uint64_t seed);

struct FairPipelineOutput {
  InlpResult inlp;
  LinearModel final_model;
  FairnessReport report;
};

/// The fair-classification pipeline over precomputed features: train the
/// main-task classifier, guard the features against Z with (refined) INLP on
/// the train/dev split, retrain a fresh final linear layer on the guarded
/// features, and report TPR gaps on the test split before and after.
FairPipelineOutput fair_pipeline(const Matrix& features,
                                 const std::vector<int>& y,
                                 const std::vector<int>& z,
                                 const SplitIndices& split,
                                 const InlpConfig& inlp_cfg,
                                 const TrainConfig& train_cfg);

/// W' = W * P with the intercept unchanged: scoring with the debiased
/// weights equals scoring projected inputs with the original weights.
LinearModel debias_weights(const LinearModel& w, const ProjectionMatrix& p);

/// Features ranked by mean relative weight change across classes,
/// |delta w| / (|w_before| + 1e-12), descending.
std::vector<std::pair<std::string, double>> weight_change_ranking(
    const LinearModel& w_before, const LinearModel& w_after,
    const std::vector<std::string>& feature_names);

}  // namespace nullguard
