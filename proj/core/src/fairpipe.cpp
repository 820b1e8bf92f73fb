#include "nullguard/fairpipe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "nullguard/rng.hpp"

namespace nullguard {

TprGaps tpr_gap(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                const std::vector<int>& z) {
  require(y_true.size() == y_pred.size() && y_true.size() == z.size(),
          "tpr_gap: input lengths differ");
  require(!y_true.empty(), "tpr_gap: empty input");
  for (int g : z)
    require(g == 0 || g == 1, "tpr_gap: z must be binary (0/1)");

  // support[class][group], hits[class][group]
  std::map<int, std::array<std::size_t, 2>> support, hits;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    auto& sup = support[y_true[i]];
    auto& hit = hits[y_true[i]];
    const auto g = static_cast<std::size_t>(z[i]);
    ++sup[g];
    if (y_pred[i] == y_true[i]) ++hit[g];
  }

  TprGaps out;
  for (const auto& [cls, sup] : support) {
    if (sup[0] == 0 || sup[1] == 0) {
      out.undefined_classes.push_back(cls);
      continue;
    }
    const double tpr0 = static_cast<double>(hits[cls][0]) /
                        static_cast<double>(sup[0]);
    const double tpr1 = static_cast<double>(hits[cls][1]) /
                        static_cast<double>(sup[1]);
    out.per_class[cls] = tpr1 - tpr0;
  }
  return out;
}

double gap_rms(const std::map<int, double>& gaps) {
  if (gaps.empty()) return 0.0;
  double sum_sq = 0.0;
  for (const auto& [cls, gap] : gaps) sum_sq += gap * gap;
  return std::sqrt(sum_sq / static_cast<double>(gaps.size()));
}

double gap_proportion_correlation(const std::map<int, double>& gaps,
                                  const std::map<int, double>& proportions) {
  std::vector<double> g, p;
  for (const auto& [cls, gap] : gaps) {
    auto it = proportions.find(cls);
    if (it == proportions.end()) continue;
    g.push_back(gap);
    p.push_back(it->second);
  }
  require(g.size() >= 3,
          "gap_proportion_correlation: fewer than 3 shared classes");

  const auto n = static_cast<double>(g.size());
  double mg = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mg += g[i];
    mp += p[i];
  }
  mg /= n;
  mp /= n;
  double sgp = 0.0, sgg = 0.0, spp = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    sgp += (g[i] - mg) * (p[i] - mp);
    sgg += (g[i] - mg) * (g[i] - mg);
    spp += (p[i] - mp) * (p[i] - mp);
  }
  require(sgg > 0.0 && spp > 0.0,
          "gap_proportion_correlation: zero variance input");
  return sgp / std::sqrt(sgg * spp);
}

SplitIndices make_split(Index n, double train_frac, double dev_frac,
                        double test_frac, std::uint64_t seed) {
  require(n >= 3, "make_split: need at least 3 rows");
  require(train_frac > 0.0 && dev_frac > 0.0 && test_frac > 0.0,
          "make_split: all partitions need positive proportions");
  const double total = train_frac + dev_frac + test_frac;

  auto eng = rng::make_engine(seed);
  const auto order = rng::permutation(static_cast<std::size_t>(n), eng);

  auto n_train = static_cast<Index>(
      std::llround(static_cast<double>(n) * train_frac / total));
  auto n_dev = static_cast<Index>(
      std::llround(static_cast<double>(n) * dev_frac / total));
  n_train = std::clamp<Index>(n_train, 1, n - 2);
  n_dev = std::clamp<Index>(n_dev, 1, n - n_train - 1);

  SplitIndices out;
  for (Index i = 0; i < n; ++i) {
    const auto idx = static_cast<Index>(order[static_cast<std::size_t>(i)]);
    if (i < n_train)
      out.train.push_back(idx);
    else if (i < n_train + n_dev)
      out.dev.push_back(idx);
    else
      out.test.push_back(idx);
  }
  return out;
}

namespace {

Matrix take_rows(const Matrix& x, const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Index>(i)) = x.row(idx[i]);
  return out;
}

std::vector<int> take(const std::vector<int>& v, const std::vector<Index>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

FairPipelineOutput fair_pipeline(const Matrix& features,
                                 const std::vector<int>& y,
                                 const std::vector<int>& z,
                                 const SplitIndices& split,
                                 const InlpConfig& inlp_cfg,
                                 const TrainConfig& train_cfg) {
  const auto n = features.rows();
  require(y.size() == static_cast<std::size_t>(n) &&
              z.size() == static_cast<std::size_t>(n),
          "fair_pipeline: feature/label lengths differ");
  require(!split.train.empty() && !split.dev.empty() && !split.test.empty(),
          "fair_pipeline: all three partitions must be non-empty");

  const Matrix x_train = take_rows(features, split.train);
  const Matrix x_dev = take_rows(features, split.dev);
  const Matrix x_test = take_rows(features, split.test);
  const std::vector<int> y_train = take(y, split.train);
  const std::vector<int> y_test = take(y, split.test);
  const std::vector<int> z_test = take(z, split.test);

  FairPipelineOutput out;

  // 1. Main-task classifier on raw features.
  const LinearModel before = fit_logistic(x_train, y_train, train_cfg);
  const std::vector<int> pred_before = predict(before, x_test);
  out.report.accuracy_before = accuracy(before, x_test, y_test);
  out.report.gaps_before = tpr_gap(y_test, pred_before, z_test);
  out.report.rms_gap_before = gap_rms(out.report.gaps_before.per_class);

  // 2. Guard the features against Z.
  Dataset train_ds{x_train, take(z, split.train), {}, y_train};
  Dataset dev_ds{x_dev, take(z, split.dev), {}, take(y, split.dev)};
  out.inlp = inlp_cfg.refined ? run_inlp_refined(train_ds, dev_ds, inlp_cfg)
                              : run_inlp(train_ds, dev_ds, inlp_cfg);
  out.report.projection_rank = out.inlp.p.rank;
  out.report.inlp_iterations = out.inlp.iterations_run;

  // 3. Fresh final layer on guarded features only.
  const Matrix g_train = guard(out.inlp, x_train);
  const Matrix g_test = guard(out.inlp, x_test);
  out.final_model = fit_logistic(g_train, y_train, train_cfg);
  const std::vector<int> pred_after = predict(out.final_model, g_test);
  out.report.accuracy_after = accuracy(out.final_model, g_test, y_test);
  out.report.gaps_after = tpr_gap(y_test, pred_after, z_test);
  out.report.rms_gap_after = gap_rms(out.report.gaps_after.per_class);

  // Per-class share of group 1 over all provided rows (the analogue of the
  // percentage of one gender within each profession).
  std::map<int, std::array<double, 2>> counts;
  for (std::size_t i = 0; i < y.size(); ++i)
    counts[y[i]][static_cast<std::size_t>(z[i] != 0)] += 1.0;
  for (const auto& [cls, c] : counts)
    out.report.group1_proportion_by_class[cls] = c[1] / (c[0] + c[1]);

  auto maybe_corr = [&](const TprGaps& gaps) -> std::optional<double> {
    std::size_t shared = 0;
    for (const auto& [cls, gap] : gaps.per_class)
      if (out.report.group1_proportion_by_class.count(cls)) ++shared;
    if (shared < 3) return std::nullopt;
    return gap_proportion_correlation(gaps.per_class,
                                      out.report.group1_proportion_by_class);
  };
  out.report.gap_proportion_correlation_before =
      maybe_corr(out.report.gaps_before);
  out.report.gap_proportion_correlation_after =
      maybe_corr(out.report.gaps_after);

  return out;
}

LinearModel debias_weights(const LinearModel& w, const ProjectionMatrix& p) {
  require(w.w.cols() == p.p.rows(),
          "debias_weights: weight/projection dimensionality mismatch");
  LinearModel out = w;
  out.w = w.w * p.p;
  return out;
}

std::vector<std::pair<std::string, double>> weight_change_ranking(
    const LinearModel& w_before, const LinearModel& w_after,
    const std::vector<std::string>& feature_names) {
  require(w_before.w.rows() == w_after.w.rows() &&
              w_before.w.cols() == w_after.w.cols(),
          "weight_change_ranking: weight shapes differ");
  require(feature_names.size() == static_cast<std::size_t>(w_before.w.cols()),
          "weight_change_ranking: feature name count mismatch");

  constexpr double kDelta = 1e-12;
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(feature_names.size());
  for (Index j = 0; j < w_before.w.cols(); ++j) {
    double mean_rel = 0.0;
    for (Index i = 0; i < w_before.w.rows(); ++i)
      mean_rel += std::abs(w_after.w(i, j) - w_before.w(i, j)) /
                  (std::abs(w_before.w(i, j)) + kDelta);
    mean_rel /= static_cast<double>(w_before.w.rows());
    ranked.emplace_back(feature_names[static_cast<std::size_t>(j)], mean_rel);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return ranked;
}

}  // namespace nullguard
