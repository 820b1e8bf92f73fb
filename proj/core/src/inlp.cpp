#include "nullguard/inlp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "nullguard/rng.hpp"

namespace nullguard {

namespace {

bool is_regression(const InlpConfig& cfg) {
  return cfg.classifier == ClassifierKind::kRegressor;
}

void validate_inputs(const Dataset& train, const Dataset& dev,
                     const InlpConfig& cfg) {
  require(cfg.max_iters >= 1, "run_inlp: max_iters must be >= 1");
  require(cfg.stop_margin >= 0.0, "run_inlp: stop_margin must be >= 0");
  require(cfg.min_rank >= 0, "run_inlp: min_rank must be >= 0");
  require(train.dim() == dev.dim(),
          "run_inlp: train and dev dimensionality differ (" +
              std::to_string(train.dim()) + " vs " + std::to_string(dev.dim()) +
              ")");
  require(dev.n() >= 1, "run_inlp: dev set is empty");
  require_finite(train.x, "run_inlp train");
  require_finite(dev.x, "run_inlp dev");

  if (is_regression(cfg)) {
    require(train.z_values.size() == static_cast<std::size_t>(train.n()),
            "run_inlp: continuous targets missing or wrong length");
    require(dev.z_values.size() == static_cast<std::size_t>(dev.n()),
            "run_inlp: dev continuous targets missing or wrong length");
  } else {
    require(train.z.size() == static_cast<std::size_t>(train.n()),
            "run_inlp: z labels missing or wrong length");
    require(dev.z.size() == static_cast<std::size_t>(dev.n()),
            "run_inlp: dev z labels missing or wrong length");
    const std::set<int> distinct(train.z.begin(), train.z.end());
    require(distinct.size() >= 2, "run_inlp: z has a single class");
  }
}

// Squared Pearson correlation between prediction and target; the regression
// analogue of probe accuracy (the majority baseline is 0: predicting a
// constant carries no information about Z).
double regression_score(const Vector& pred, const std::vector<double>& target) {
  const Index n = pred.size();
  if (n < 2) return 0.0;
  double mean_p = 0.0, mean_t = 0.0;
  for (Index i = 0; i < n; ++i) {
    mean_p += pred(i);
    mean_t += target[static_cast<std::size_t>(i)];
  }
  mean_p /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  double spt = 0.0, spp = 0.0, stt = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double dp = pred(i) - mean_p;
    const double dt = target[static_cast<std::size_t>(i)] - mean_t;
    spt += dp * dt;
    spp += dp * dp;
    stt += dt * dt;
  }
  if (spp <= 0.0 || stt <= 0.0) return 0.0;
  const double r = spt / std::sqrt(spp * stt);
  return r * r;
}

// Row-normalized copy of the classifier weights; rows with negligible norm
// are dropped (they span nothing). Scale does not change the row space and
// unit rows keep the SVD cutoff meaningful.
Matrix normalized_rows(const Matrix& w) {
  std::vector<Index> keep;
  for (Index i = 0; i < w.rows(); ++i)
    if (w.row(i).norm() > 1e-12) keep.push_back(i);
  Matrix out(static_cast<Index>(keep.size()), w.cols());
  for (std::size_t i = 0; i < keep.size(); ++i)
    out.row(static_cast<Index>(i)) = w.row(keep[i]) / w.row(keep[i]).norm();
  return out;
}

struct IterationFit {
  LinearModel model;
  double dev_score = 0.0;
};

Matrix take_rows(const Matrix& x, const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Index>(i)) = x.row(idx[i]);
  return out;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, const std::vector<Index>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

// Fits one iteration's classifier on the (optionally subset) projected train
// rows and scores it on the (optionally subset) projected dev rows. Empty
// subsets mean the full set.
IterationFit fit_iteration(const Matrix& x_train, const Dataset& train,
                           const std::vector<Index>& train_subset,
                           const Matrix& x_dev, const Dataset& dev,
                           const std::vector<Index>& dev_subset,
                           const InlpConfig& cfg, int iteration) {
  TrainConfig tc = cfg.train_cfg;
  tc.seed = rng::mix(cfg.train_cfg.seed,
                     static_cast<std::uint64_t>(iteration));

  const Matrix x_fit =
      train_subset.empty() ? x_train : take_rows(x_train, train_subset);
  const Matrix x_eval =
      dev_subset.empty() ? x_dev : take_rows(x_dev, dev_subset);

  IterationFit out;
  if (is_regression(cfg)) {
    const std::vector<double> targets = train_subset.empty()
                                            ? train.z_values
                                            : take(train.z_values, train_subset);
    const std::vector<double> dev_targets =
        dev_subset.empty() ? dev.z_values : take(dev.z_values, dev_subset);
    out.model = fit_regressor(x_fit, targets, tc);
    out.dev_score =
        regression_score(predict_values(out.model, x_eval), dev_targets);
    return out;
  }

  const std::vector<int> labels =
      train_subset.empty() ? train.z : take(train.z, train_subset);
  const std::vector<int> dev_labels =
      dev_subset.empty() ? dev.z : take(dev.z, dev_subset);
  out.model = cfg.classifier == ClassifierKind::kSvm
                  ? fit_svm(x_fit, labels, tc)
                  : fit_logistic(x_fit, labels, tc);
  out.dev_score = accuracy(out.model, x_eval, dev_labels);
  return out;
}

// Folds an accepted classifier into the removed subspace; returns false when
// the step would violate the rank floor or the fit was degenerate.
bool append_step(InlpResult& result, const IterationFit& fit, Index d,
                 const InlpConfig& cfg) {
  const Matrix rows = normalized_rows(fit.model.w);
  if (rows.rows() == 0) return false;

  std::vector<ProjectionMatrix> candidate = result.rowspace_projs;
  candidate.push_back(rowspace_projection(rows, cfg.svd_tol));
  const ProjectionMatrix p_next =
      intersection_nullspace_projection(candidate, d, cfg.svd_tol);
  if (p_next.rank < cfg.min_rank) return false;

  result.rowspace_projs = std::move(candidate);
  result.classifiers.push_back(fit.model);
  result.dev_accuracy_trace.push_back(fit.dev_score);
  result.rank_history.push_back(p_next.rank);
  ++result.iterations_run;
  return true;
}

// Main-task classes eligible for the refined draw: at least two distinct
// protected values among their training rows.
std::vector<int> eligible_y_classes(const Dataset& train, bool regression) {
  std::set<int> y_classes(train.y.begin(), train.y.end());
  std::vector<int> eligible;
  for (int yc : y_classes) {
    std::set<int> zs;
    std::set<double> zvs;
    for (std::size_t i = 0; i < train.y.size(); ++i) {
      if (train.y[i] != yc) continue;
      if (regression)
        zvs.insert(train.z_values[i]);
      else
        zs.insert(train.z[i]);
    }
    if ((regression ? zvs.size() : zs.size()) >= 2) eligible.push_back(yc);
  }
  return eligible;
}

// The refined variant judges the drawn class on its own dev rows: the stop
// rule compares the subgroup dev accuracy with the subgroup majority, and the
// loop only terminates once every eligible class is guarded. Guarding is
// monotone under further projection (a classifier on P'x is a classifier on
// x), so a class marked guarded stays guarded.
InlpResult run_inlp_impl(const Dataset& train, const Dataset& dev,
                         const InlpConfig& cfg, bool refined) {
  validate_inputs(train, dev, cfg);

  std::vector<int> eligible;
  if (refined) {
    require(train.has_y(), "run_inlp_refined: train set has no Y labels");
    require(train.y.size() == static_cast<std::size_t>(train.n()),
            "run_inlp_refined: Y labels/rows mismatch");
    require(dev.y.size() == static_cast<std::size_t>(dev.n()),
            "run_inlp_refined: dev set needs Y labels for subgroup stopping");
    eligible = eligible_y_classes(train, is_regression(cfg));
    require(!eligible.empty(),
            "run_inlp_refined: no main-task class has two distinct Z values");
  }
  auto draw_eng = rng::make_engine(cfg.seed);
  std::set<int> guarded_classes;

  const Index d = train.dim();
  InlpResult result;
  result.majority = is_regression(cfg) ? 0.0 : majority_accuracy(dev.z);

  int turn = 0;
  while (result.iterations_run < cfg.max_iters) {
    const ProjectionMatrix p = intersection_nullspace_projection(
        result.rowspace_projs, d, cfg.svd_tol);
    const Matrix x_train = apply_projection(p, train.x);
    const Matrix x_dev = apply_projection(p, dev.x);

    std::vector<Index> train_subset;
    std::vector<Index> dev_subset;
    double baseline = result.majority;
    if (refined) {
      std::vector<int> open;
      for (int yc : eligible)
        if (!guarded_classes.count(yc)) open.push_back(yc);
      if (open.empty()) break;
      const int chosen = open[rng::uniform_int(draw_eng, open.size())];
      for (Index i = 0; i < train.n(); ++i)
        if (train.y[static_cast<std::size_t>(i)] == chosen)
          train_subset.push_back(i);
      for (Index i = 0; i < dev.n(); ++i)
        if (dev.y[static_cast<std::size_t>(i)] == chosen)
          dev_subset.push_back(i);
      if (dev_subset.empty()) {
        // Nothing to judge the subgroup on; treat it as guarded.
        guarded_classes.insert(chosen);
        continue;
      }
      if (!is_regression(cfg)) {
        std::vector<int> sub_z;
        sub_z.reserve(dev_subset.size());
        for (Index i : dev_subset)
          sub_z.push_back(dev.z[static_cast<std::size_t>(i)]);
        baseline = majority_accuracy(sub_z);
      }
      if (train_subset.size() < 2) {
        guarded_classes.insert(chosen);
        continue;
      }
      const IterationFit fit = fit_iteration(x_train, train, train_subset,
                                             x_dev, dev, dev_subset, cfg, turn);
      ++turn;
      if (fit.dev_score <= baseline + cfg.stop_margin) {
        guarded_classes.insert(chosen);
        continue;
      }
      if (!append_step(result, fit, d, cfg)) break;
      continue;
    }

    const IterationFit fit =
        fit_iteration(x_train, train, {}, x_dev, dev, {}, cfg, turn);
    ++turn;
    if (fit.dev_score <= baseline + cfg.stop_margin) break;
    if (!append_step(result, fit, d, cfg)) break;
  }

  result.p = intersection_nullspace_projection(result.rowspace_projs, d,
                                               cfg.svd_tol);
  return result;
}

}  // namespace

InlpResult run_inlp(const Dataset& train, const Dataset& dev,
                    const InlpConfig& cfg) {
  return run_inlp_impl(train, dev, cfg, false);
}

InlpResult run_inlp_refined(const Dataset& train, const Dataset& dev,
                            const InlpConfig& cfg) {
  return run_inlp_impl(train, dev, cfg, true);
}

Matrix guard(const InlpResult& result, const Matrix& x) {
  return apply_projection(result.p, x);
}

}  // namespace nullguard
