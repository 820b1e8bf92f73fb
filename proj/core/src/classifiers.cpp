#include "nullguard/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "nullguard/rng.hpp"

namespace nullguard {

namespace {

std::vector<int> sorted_distinct(const std::vector<int>& z) {
  std::set<int> s(z.begin(), z.end());
  return {s.begin(), s.end()};
}

// sigma(-margin) = d/dm log(1 + exp(-m)), computed without overflow.
double logistic_weight(double margin) {
  if (margin > 0.0) {
    const double e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

// SGD over one binary head. Targets are +-1. The update keeps the weight
// vector a linear combination of the inputs (zero init, gradients linear in
// x, L2 shrinkage), which is what makes successive INLP directions
// orthogonal.
void sgd_binary(const Matrix& x, const std::vector<double>& target, Loss loss,
                const TrainConfig& cfg, std::uint64_t seed, Vector* w_out,
                double* b_out) {
  const Index n = x.rows();
  const Index d = x.cols();
  Vector w = Vector::Zero(d);
  double b = 0.0;

  auto eng = rng::make_engine(seed);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::uint64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) rng::shuffle(order, eng);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const Index i = static_cast<Index>(order[pos]);
      ++step;
      const double lr =
          cfg.learning_rate / std::sqrt(static_cast<double>(step));
      const double score = x.row(i).dot(w) + b;

      double coeff = 0.0;  // scale on x_i added to w (and on 1 added to b)
      switch (loss) {
        case Loss::kLogistic: {
          const double y = target[static_cast<std::size_t>(i)];
          coeff = y * logistic_weight(y * score);
          break;
        }
        case Loss::kHinge: {
          const double y = target[static_cast<std::size_t>(i)];
          coeff = (y * score < 1.0) ? y : 0.0;
          break;
        }
        case Loss::kSquared: {
          coeff = -(score - target[static_cast<std::size_t>(i)]);
          break;
        }
      }

      if (cfg.l2 > 0.0) w *= (1.0 - lr * cfg.l2);
      if (coeff != 0.0) w += (lr * coeff) * x.row(i).transpose();
      if (cfg.fit_intercept && coeff != 0.0) b += lr * coeff;
    }
  }

  *w_out = std::move(w);
  *b_out = b;
}

LinearModel fit_classifier(const Matrix& x, const std::vector<int>& z,
                           const TrainConfig& cfg, Loss loss) {
  require(x.rows() >= 2, "fit: need at least 2 samples");
  require(static_cast<Index>(z.size()) == x.rows(),
          "fit: labels/rows mismatch");
  require_finite(x, "fit");
  require(cfg.epochs >= 1, "fit: epochs must be >= 1");
  require(cfg.learning_rate > 0.0, "fit: learning_rate must be > 0");
  require(cfg.l2 >= 0.0, "fit: l2 must be >= 0");

  const std::vector<int> classes = sorted_distinct(z);
  require(classes.size() >= 2, "fit: need at least 2 distinct labels");

  LinearModel model;
  model.loss = loss;
  model.l2 = cfg.l2;
  model.classes = classes;

  const Index d = x.cols();
  const std::size_t n = z.size();
  std::vector<double> target(n);

  if (classes.size() == 2) {
    // Single row scoring classes[1] against classes[0].
    for (std::size_t i = 0; i < n; ++i)
      target[i] = (z[i] == classes[1]) ? 1.0 : -1.0;
    Vector w;
    double b = 0.0;
    sgd_binary(x, target, loss, cfg, cfg.seed, &w, &b);
    model.w = w.transpose();
    if (cfg.fit_intercept) {
      Vector intercept(1);
      intercept(0) = b;
      model.intercept = intercept;
    }
    return model;
  }

  const Index k = static_cast<Index>(classes.size());
  model.w = Matrix::Zero(k, d);
  Vector intercepts = Vector::Zero(k);
  for (Index head = 0; head < k; ++head) {
    const int positive = classes[static_cast<std::size_t>(head)];
    for (std::size_t i = 0; i < n; ++i)
      target[i] = (z[i] == positive) ? 1.0 : -1.0;
    Vector w;
    double b = 0.0;
    sgd_binary(x, target, loss, cfg,
               rng::mix(cfg.seed, static_cast<std::uint64_t>(head)), &w, &b);
    model.w.row(head) = w.transpose();
    intercepts(head) = b;
  }
  if (cfg.fit_intercept) model.intercept = intercepts;
  return model;
}

}  // namespace

LinearModel fit_logistic(const Matrix& x, const std::vector<int>& z,
                         const TrainConfig& cfg) {
  return fit_classifier(x, z, cfg, Loss::kLogistic);
}

LinearModel fit_svm(const Matrix& x, const std::vector<int>& z,
                    const TrainConfig& cfg) {
  return fit_classifier(x, z, cfg, Loss::kHinge);
}

LinearModel fit_regressor(const Matrix& x, const std::vector<double>& z,
                          const TrainConfig& cfg) {
  require(x.rows() >= 2, "fit_regressor: need at least 2 samples");
  require(static_cast<Index>(z.size()) == x.rows(),
          "fit_regressor: targets/rows mismatch");
  require_finite(x, "fit_regressor");
  const double z0 = z.front();
  const bool constant =
      std::all_of(z.begin(), z.end(), [&](double v) { return v == z0; });
  require(!constant, "fit_regressor: constant targets define no direction");

  LinearModel model;
  model.loss = Loss::kSquared;
  model.l2 = cfg.l2;

  Vector w;
  double b = 0.0;
  sgd_binary(x, z, Loss::kSquared, cfg, cfg.seed, &w, &b);
  model.w = w.transpose();
  if (cfg.fit_intercept) {
    Vector intercept(1);
    intercept(0) = b;
    model.intercept = intercept;
  }
  return model;
}

Matrix decision_scores(const LinearModel& m, const Matrix& x) {
  require(x.cols() == m.w.cols(),
          "decision_scores: x has " + std::to_string(x.cols()) +
              " columns, model expects " + std::to_string(m.w.cols()));
  Matrix scores = x * m.w.transpose();
  if (m.intercept) scores.rowwise() += m.intercept->transpose();
  return scores;
}

std::vector<int> predict(const LinearModel& m, const Matrix& x) {
  require(m.loss != Loss::kSquared,
          "predict: model is a regressor; use predict_values");
  require(m.classes.size() >= 2, "predict: model has no class table");
  const Matrix scores = decision_scores(m, x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));

  if (m.w.rows() == 1) {
    for (Index i = 0; i < x.rows(); ++i)
      out[static_cast<std::size_t>(i)] =
          scores(i, 0) > 0.0 ? m.classes[1] : m.classes[0];
    return out;
  }

  for (Index i = 0; i < x.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < scores.cols(); ++j)
      if (scores(i, j) > scores(i, best)) best = j;  // ties keep lowest index
    out[static_cast<std::size_t>(i)] = m.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

Vector predict_values(const LinearModel& m, const Matrix& x) {
  require(m.w.rows() == 1, "predict_values: expected a single-row model");
  return decision_scores(m, x).col(0);
}

double accuracy(const LinearModel& m, const Matrix& x,
                const std::vector<int>& z) {
  require(static_cast<Index>(z.size()) == x.rows(),
          "accuracy: labels/rows mismatch");
  require(!z.empty(), "accuracy: empty input");
  const std::vector<int> pred = predict(m, x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (pred[i] == z[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(z.size());
}

double majority_accuracy(const std::vector<int>& z) {
  require(!z.empty(), "majority_accuracy: empty labels");
  std::map<int, std::size_t> counts;
  for (int v : z) ++counts[v];
  std::size_t best = 0;
  for (const auto& [label, count] : counts) best = std::max(best, count);
  return static_cast<double>(best) / static_cast<double>(z.size());
}

}  // namespace nullguard
