#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "nullguard/metrics.hpp"
#include "nullguard/rng.hpp"

namespace nullguard {

namespace {

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

Split probe_split(Index n, std::uint64_t seed) {
  auto eng = rng::make_engine(rng::mix(seed, 0x5eedU));
  std::vector<std::size_t> order = rng::permutation(static_cast<std::size_t>(n), eng);
  Index n_test = std::max<Index>(1, n / 5);
  if (n_test >= n) n_test = n - 1;
  Split s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (static_cast<Index>(i) < n - n_test)
      s.train.push_back(static_cast<Index>(order[i]));
    else
      s.test.push_back(static_cast<Index>(order[i]));
  }
  return s;
}

Matrix take_rows(const Matrix& x, const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Index>(i)) = x.row(idx[i]);
  return out;
}

std::vector<int> take_labels(const std::vector<int>& z,
                             const std::vector<Index>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(z[static_cast<std::size_t>(i)]);
  return out;
}

// Minimal one-hidden-layer ReLU classifier with softmax cross-entropy,
// trained sample-by-sample. Weights use Glorot-uniform init from the seeded
// generator; biases start at zero.
class MlpClassifier {
 public:
  MlpClassifier(Index dim, Index hidden, Index k, std::uint64_t seed)
      : w1_(hidden, dim), b1_(Vector::Zero(hidden)), w2_(k, hidden),
        b2_(Vector::Zero(k)) {
    auto eng = rng::make_engine(seed);
    const double a1 = std::sqrt(6.0 / static_cast<double>(dim + hidden));
    for (Index r = 0; r < hidden; ++r)
      for (Index c = 0; c < dim; ++c)
        w1_(r, c) = (2.0 * rng::uniform01(eng) - 1.0) * a1;
    const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + k));
    for (Index r = 0; r < k; ++r)
      for (Index c = 0; c < hidden; ++c)
        w2_(r, c) = (2.0 * rng::uniform01(eng) - 1.0) * a2;
  }

  void train(const Matrix& x, const std::vector<int>& y_idx, int epochs,
             double lr, std::uint64_t shuffle_seed) {
    auto eng = rng::make_engine(shuffle_seed);
    std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      rng::shuffle(order, eng);
      for (std::size_t pos : order) step(x.row(static_cast<Index>(pos)),
                                         y_idx[pos], lr);
    }
  }

  int predict(const Eigen::RowVectorXd& x) const {
    const Vector scores = forward(x);
    Index best = 0;
    for (Index j = 1; j < scores.size(); ++j)
      if (scores(j) > scores(best)) best = j;
    return static_cast<int>(best);
  }

 private:
  Vector forward(const Eigen::RowVectorXd& x) const {
    const Vector h = (w1_ * x.transpose() + b1_).cwiseMax(0.0);
    return w2_ * h + b2_;
  }

  void step(const Eigen::RowVectorXd& x, int label, double lr) {
    const Vector pre = w1_ * x.transpose() + b1_;
    const Vector h = pre.cwiseMax(0.0);
    Vector scores = w2_ * h + b2_;

    const double max_s = scores.maxCoeff();
    Vector p = (scores.array() - max_s).exp();
    p /= p.sum();
    p(label) -= 1.0;  // dL/dscores

    const Vector dh = (w2_.transpose() * p).cwiseProduct(
        (pre.array() > 0.0).cast<double>().matrix());
    w2_ -= lr * (p * h.transpose());
    b2_ -= lr * p;
    w1_ -= lr * (dh * x);
    b1_ -= lr * dh;
  }

  Matrix w1_;
  Vector b1_;
  Matrix w2_;
  Vector b2_;
};

}  // namespace

ProbeResult probe_linear(const Matrix& x, const std::vector<int>& z,
                         const TrainConfig& cfg, ClassifierKind kind) {
  require(static_cast<Index>(z.size()) == x.rows(),
          "probe_linear: labels/rows mismatch");
  require(std::set<int>(z.begin(), z.end()).size() >= 2,
          "probe_linear: need at least 2 classes");
  require(kind != ClassifierKind::kRegressor,
          "probe_linear: probes are classifiers");

  const Split split = probe_split(x.rows(), cfg.seed);
  const Matrix x_train = take_rows(x, split.train);
  const Matrix x_test = take_rows(x, split.test);
  const std::vector<int> z_train = take_labels(z, split.train);
  const std::vector<int> z_test = take_labels(z, split.test);

  const LinearModel model = kind == ClassifierKind::kSvm
                                ? fit_svm(x_train, z_train, cfg)
                                : fit_logistic(x_train, z_train, cfg);
  ProbeResult out;
  out.kind = ProbeKind::kLinear;
  out.accuracy = accuracy(model, x_test, z_test);
  out.majority = majority_accuracy(z_test);
  return out;
}

ProbeResult probe_mlp(const Matrix& x, const std::vector<int>& z,
                      const MlpProbeConfig& cfg) {
  require(static_cast<Index>(z.size()) == x.rows(),
          "probe_mlp: labels/rows mismatch");
  require(cfg.hidden >= 1, "probe_mlp: hidden width must be >= 1");
  const std::set<int> classes(z.begin(), z.end());
  require(classes.size() >= 2, "probe_mlp: need at least 2 classes");

  // Map labels onto dense indices for the softmax head.
  std::vector<int> class_list(classes.begin(), classes.end());
  std::vector<int> z_idx(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto it =
        std::lower_bound(class_list.begin(), class_list.end(), z[i]);
    z_idx[i] = static_cast<int>(it - class_list.begin());
  }

  const Split split = probe_split(x.rows(), cfg.seed);
  const Matrix x_train = take_rows(x, split.train);
  const Matrix x_test = take_rows(x, split.test);
  const std::vector<int> y_train = take_labels(z_idx, split.train);
  const std::vector<int> y_test = take_labels(z_idx, split.test);

  MlpClassifier net(x.cols(), cfg.hidden,
                    static_cast<Index>(class_list.size()),
                    rng::mix(cfg.seed, 1));
  net.train(x_train, y_train, cfg.epochs, cfg.learning_rate,
            rng::mix(cfg.seed, 2));

  std::size_t correct = 0;
  for (Index i = 0; i < x_test.rows(); ++i)
    if (net.predict(x_test.row(i)) == y_test[static_cast<std::size_t>(i)])
      ++correct;

  ProbeResult out;
  out.kind = ProbeKind::kMlp;
  out.accuracy =
      static_cast<double>(correct) / static_cast<double>(x_test.rows());
  out.majority = [&] {
    std::vector<int> raw = take_labels(z, split.test);
    return majority_accuracy(raw);
  }();
  return out;
}

}  // namespace nullguard
