#include "nullguard/synth.hpp"

#include <cmath>

#include "nullguard/rng.hpp"

namespace nullguard {

namespace {

Vector default_axis(Index d, Index axis) {
  Vector v = Vector::Zero(d);
  v(axis) = 1.0;
  return v;
}

Vector random_gaussian(Index d, rng::Engine& eng) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng::normal(eng);
  return v;
}

// Gram-Schmidt rows of random Gaussians; rows are orthonormal to machine
// precision.
Matrix random_orthonormal_rows(Index count, Index d, rng::Engine& eng) {
  Matrix rows(count, d);
  for (Index i = 0; i < count; ++i) {
    Vector v = random_gaussian(d, eng);
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < i; ++j)
        v -= rows.row(j).dot(v) * rows.row(j).transpose();
    rows.row(i) = v / v.norm();
  }
  return rows;
}

}  // namespace

Dataset gen_controlled(const ControlledSpec& spec) {
  require(spec.n_per_class >= 1, "gen_controlled: n_per_class must be >= 1");
  require(spec.d >= 2, "gen_controlled: d must be >= 2");
  require(spec.ratio >= 0.5 && spec.ratio <= 1.0,
          "gen_controlled: ratio must lie in [0.5, 1.0]");
  require(spec.noise_sigma > 0.0, "gen_controlled: noise_sigma must be > 0");

  Vector sy = spec.signal_y.size() > 0 ? spec.signal_y : default_axis(spec.d, 0);
  Vector sz = spec.signal_z.size() > 0 ? spec.signal_z : default_axis(spec.d, 1);
  require(sy.size() == spec.d && sz.size() == spec.d,
          "gen_controlled: signal vectors must have length d");
  require(sy.norm() > 0.0 && sz.norm() > 0.0,
          "gen_controlled: signal vectors must be non-zero");

  const Index n_per = spec.n_per_class;
  const Index n = 2 * n_per;
  // P(z = 0 | y = 1) = ratio, mirrored for y = 0. Counts are exact, so the
  // Y and Z marginals are exactly balanced.
  const auto z0_in_y1 = static_cast<Index>(
      std::llround(spec.ratio * static_cast<double>(n_per)));

  std::vector<int> ys, zs;
  ys.reserve(static_cast<std::size_t>(n));
  zs.reserve(static_cast<std::size_t>(n));
  for (int y = 0; y <= 1; ++y) {
    const Index z0_count = (y == 1) ? z0_in_y1 : n_per - z0_in_y1;
    for (Index i = 0; i < n_per; ++i) {
      ys.push_back(y);
      zs.push_back(i < z0_count ? 0 : 1);
    }
  }

  auto eng = rng::make_engine(spec.seed);
  const auto order = rng::permutation(static_cast<std::size_t>(n), eng);

  Dataset out;
  out.x.resize(n, spec.d);
  out.y.resize(static_cast<std::size_t>(n));
  out.z.resize(static_cast<std::size_t>(n));
  for (Index row = 0; row < n; ++row) {
    const std::size_t src = order[static_cast<std::size_t>(row)];
    const int y = ys[src];
    const int z = zs[src];
    out.y[static_cast<std::size_t>(row)] = y;
    out.z[static_cast<std::size_t>(row)] = z;
    Vector noise = random_gaussian(spec.d, eng) * spec.noise_sigma;
    out.x.row(row) = ((2.0 * y - 1.0) * sy + (2.0 * z - 1.0) * sz + noise)
                         .transpose();
  }
  return out;
}

BiasedEmbeddings gen_biased_embeddings(const BiasedEmbeddingSpec& spec) {
  require(spec.n_words >= 3, "gen_biased_embeddings: need at least 3 words");
  require(spec.d >= 2, "gen_biased_embeddings: d must be >= 2");
  require(spec.n_bias_directions >= 0,
          "gen_biased_embeddings: n_bias_directions must be >= 0");
  const Index reserved = spec.xor_scale > 0.0 ? 2 : 0;
  require(spec.n_bias_directions + reserved < spec.d,
          "gen_biased_embeddings: planted directions must fit below d");

  auto eng = rng::make_engine(spec.seed);
  const Index m = spec.n_bias_directions;
  const Matrix planted = random_orthonormal_rows(m + reserved, spec.d, eng);

  BiasedEmbeddings out;
  out.planted_directions = planted.topRows(m);
  if (reserved > 0) out.xor_directions = planted.bottomRows(2);

  const Index n = spec.n_words;
  const Index n_neutral = n / 3;
  out.vectors.resize(n, spec.d);
  out.bias_labels.resize(static_cast<std::size_t>(n));

  // Geometric subgroup weights; the dominant direction carries most words.
  std::vector<double> cumulative(static_cast<std::size_t>(std::max<Index>(m, 1)));
  {
    double acc = 0.0, w = 1.0;
    for (Index j = 0; j < m; ++j) {
      acc += w;
      cumulative[static_cast<std::size_t>(j)] = acc;
      w *= spec.subgroup_decay;
    }
    for (Index j = 0; j < m; ++j) cumulative[static_cast<std::size_t>(j)] /= acc;
  }

  for (Index i = 0; i < n; ++i) {
    // Base vector orthogonal to every planted direction; neutral words have
    // exactly zero planted components, so their projection on the first
    // direction is 0 < 0.03.
    Vector v = random_gaussian(spec.d, eng);
    v /= v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < planted.rows(); ++j)
        v -= planted.row(j).dot(v) * planted.row(j).transpose();

    int label = 0;
    if (i >= n_neutral) {
      label = (i - n_neutral) % 2 == 0 ? 1 : -1;
      const double sign = static_cast<double>(label);
      if (m > 0) {
        const double r = rng::uniform01(eng);
        Index subgroup = m - 1;
        for (Index j = 0; j < m; ++j)
          if (r < cumulative[static_cast<std::size_t>(j)]) {
            subgroup = j;
            break;
          }
        v += sign * spec.signal_scale *
             out.planted_directions.row(subgroup).transpose();
        for (Index j = 0; j < m; ++j)
          v += spec.signal_jitter * rng::normal(eng) *
               out.planted_directions.row(j).transpose();
      }
      if (reserved > 0) {
        // XOR coupling: the product of the two coordinates carries the
        // label, each coordinate alone carries nothing.
        const double a = rng::uniform01(eng) < 0.5 ? -1.0 : 1.0;
        const double b = sign * a;
        v += spec.xor_scale * a * out.xor_directions.row(0).transpose();
        v += spec.xor_scale * b * out.xor_directions.row(1).transpose();
      }
    }
    out.bias_labels[static_cast<std::size_t>(i)] = label;
    out.vectors.row(i) = v.transpose();
  }
  return out;
}

Dataset biased_words_dataset(const BiasedEmbeddings& emb) {
  std::vector<Index> rows;
  for (Index i = 0; i < emb.vectors.rows(); ++i)
    if (emb.bias_labels[static_cast<std::size_t>(i)] != 0) rows.push_back(i);
  require(rows.size() >= 2, "biased_words_dataset: too few biased words");

  Dataset out;
  out.x.resize(static_cast<Index>(rows.size()), emb.vectors.cols());
  out.z.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Index>(i)) = emb.vectors.row(rows[i]);
    out.z.push_back(emb.bias_labels[static_cast<std::size_t>(rows[i])] > 0 ? 1
                                                                           : 0);
  }
  return out;
}

}  // namespace nullguard
