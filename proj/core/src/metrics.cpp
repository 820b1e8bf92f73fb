#include "nullguard/metrics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "nullguard/rng.hpp"

namespace nullguard {

// ---------------------------------------------------------------------------
// K-means

namespace {

double dist2(const Matrix& x, Index row, const Matrix& centroids, Index c) {
  return (x.row(row) - centroids.row(c)).squaredNorm();
}

Matrix kmeanspp_seed(const Matrix& x, int k, rng::Engine& eng) {
  const Index n = x.rows();
  Matrix centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<Index>(
      rng::uniform_int(eng, static_cast<std::uint64_t>(n))));

  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = dist2(x, i, centroids, 0);

  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index chosen;
    if (total <= 0.0) {
      chosen = static_cast<Index>(
          rng::uniform_int(eng, static_cast<std::uint64_t>(n)));
    } else {
      const double r = rng::uniform01(eng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > r) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(c) = x.row(chosen);
    for (Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), dist2(x, i, centroids, c));
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed,
                    int max_iters) {
  require(k >= 1, "kmeans: k must be >= 1");
  require(x.rows() >= k, "kmeans: need at least k points");
  require(max_iters >= 1, "kmeans: max_iters must be >= 1");
  require_finite(x, "kmeans");

  const Index n = x.rows();
  auto eng = rng::make_engine(seed);

  KMeansResult result;
  result.centroids = kmeanspp_seed(x, k, eng);
  result.assignments.assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = dist2(x, i, result.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(x, i, result.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      inertia += best_d;
      if (result.assignments[static_cast<std::size_t>(i)] !=
          static_cast<int>(best)) {
        result.assignments[static_cast<std::size_t>(i)] =
            static_cast<int>(best);
        changed = true;
      }
    }
    result.inertia_trace.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed) break;

    // Mean update; a cluster that lost all points keeps its centroid.
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const auto c =
          static_cast<std::size_t>(result.assignments[static_cast<std::size_t>(i)]);
      sums.row(static_cast<Index>(c)) += x.row(i);
      ++counts[c];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        result.centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  return result;
}

// ---------------------------------------------------------------------------
// V-measure

double v_measure(const std::vector<int>& labels_true,
                 const std::vector<int>& labels_pred) {
  require(labels_true.size() == labels_pred.size(),
          "v_measure: label lists differ in length");
  require(!labels_true.empty(), "v_measure: empty labels");

  const double n = static_cast<double>(labels_true.size());
  std::map<int, double> count_t, count_p;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < labels_true.size(); ++i) {
    count_t[labels_true[i]] += 1.0;
    count_p[labels_pred[i]] += 1.0;
    joint[{labels_true[i], labels_pred[i]}] += 1.0;
  }

  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double h_true = entropy(count_t);
  const double h_pred = entropy(count_p);

  double h_true_given_pred = 0.0;
  double h_pred_given_true = 0.0;
  for (const auto& [tp, c] : joint) {
    const double p_joint = c / n;
    h_true_given_pred -= p_joint * std::log(c / count_p[tp.second]);
    h_pred_given_true -= p_joint * std::log(c / count_t[tp.first]);
  }

  const double homogeneity = h_true == 0.0 ? 1.0 : 1.0 - h_true_given_pred / h_true;
  const double completeness = h_pred == 0.0 ? 1.0 : 1.0 - h_pred_given_true / h_pred;
  if (homogeneity + completeness == 0.0) return 0.0;
  return 2.0 * homogeneity * completeness / (homogeneity + completeness);
}

// ---------------------------------------------------------------------------
// WEAT

namespace {

double cosine(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  require(na > 0.0 && nb > 0.0, "cosine: zero-norm vector");
  return a.dot(b) / (na * nb);
}

std::vector<Index> resolve_words(const EmbeddingTable& table,
                                 const std::vector<std::string>& words) {
  std::vector<std::string> missing;
  std::vector<Index> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    if (auto idx = table.find(w))
      out.push_back(*idx);
    else
      missing.push_back(w);
  }
  if (!missing.empty()) {
    std::string msg = "words not in vocabulary:";
    for (const auto& w : missing) msg += " '" + w + "'";
    throw InvalidInput(msg);
  }
  return out;
}

// Mean cosine association of one target word against A minus against B.
double association(const EmbeddingTable& table, Index word,
                   const std::vector<Index>& a, const std::vector<Index>& b) {
  double mean_a = 0.0;
  for (Index i : a) mean_a += cosine(table.vectors.row(word), table.vectors.row(i));
  mean_a /= static_cast<double>(a.size());
  double mean_b = 0.0;
  for (Index i : b) mean_b += cosine(table.vectors.row(word), table.vectors.row(i));
  mean_b /= static_cast<double>(b.size());
  return mean_a - mean_b;
}

}  // namespace

WeatResult weat(const EmbeddingTable& embeddings, const WeatSpec& spec,
                std::uint64_t seed) {
  require(spec.targets_x.size() == spec.targets_y.size(),
          "weat: target sets must have equal size");
  require(spec.targets_x.size() >= 2, "weat: target sets need >= 2 words");
  require(!spec.attributes_a.empty() && !spec.attributes_b.empty(),
          "weat: attribute sets must be non-empty");
  require(spec.n_permutations >= 1, "weat: n_permutations must be >= 1");

  const auto x_idx = resolve_words(embeddings, spec.targets_x);
  const auto y_idx = resolve_words(embeddings, spec.targets_y);
  const auto a_idx = resolve_words(embeddings, spec.attributes_a);
  const auto b_idx = resolve_words(embeddings, spec.attributes_b);

  const std::size_t half = x_idx.size();
  std::vector<double> s;  // associations, X words first
  s.reserve(2 * half);
  for (Index w : x_idx) s.push_back(association(embeddings, w, a_idx, b_idx));
  for (Index w : y_idx) s.push_back(association(embeddings, w, a_idx, b_idx));

  double sum_x = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < half; ++i) sum_x += s[i];
  for (std::size_t i = half; i < s.size(); ++i) sum_y += s[i];

  WeatResult result;
  result.statistic = sum_x - sum_y;

  const double mean_x = sum_x / static_cast<double>(half);
  const double mean_y = sum_y / static_cast<double>(half);
  double mean_all = 0.0;
  for (double v : s) mean_all += v;
  mean_all /= static_cast<double>(s.size());
  double var = 0.0;
  for (double v : s) var += (v - mean_all) * (v - mean_all);
  var /= static_cast<double>(s.size());
  const double sd = std::sqrt(var);
  result.effect_size = sd > 0.0 ? (mean_x - mean_y) / sd : 0.0;

  // Permutation test over equal-size repartitions of X u Y. Both the
  // observed and the permuted statistics go through the same 2*sum - total
  // expression so exact ties count as ties.
  const double total = sum_x + sum_y;
  const double observed = 2.0 * sum_x - total;
  const std::size_t n_words = s.size();

  std::uint64_t at_least = 0;
  std::uint64_t evaluated = 0;
  if (n_words <= 12) {
    result.exact = true;
    std::vector<std::size_t> comb(half);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      double subset_sum = 0.0;
      for (std::size_t i : comb) subset_sum += s[i];
      ++evaluated;
      if (2.0 * subset_sum - total >= observed) ++at_least;

      // next lexicographic combination
      std::size_t i = half;
      while (i > 0 && comb[i - 1] == n_words - half + (i - 1)) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < half; ++j) comb[j] = comb[j - 1] + 1;
    }
  } else {
    result.exact = false;
    auto eng = rng::make_engine(seed);
    std::vector<std::size_t> idx(n_words);
    std::iota(idx.begin(), idx.end(), 0);
    for (int p = 0; p < spec.n_permutations; ++p) {
      rng::shuffle(idx, eng);
      double subset_sum = 0.0;
      for (std::size_t i = 0; i < half; ++i) subset_sum += s[idx[i]];
      ++evaluated;
      if (2.0 * subset_sum - total >= observed) ++at_least;
    }
  }
  result.permutations_evaluated = evaluated;
  result.p_value =
      static_cast<double>(at_least) / static_cast<double>(evaluated);
  return result;
}

// ---------------------------------------------------------------------------
// Spearman correlation and similarity benchmarks

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  require(saa > 0.0 && sbb > 0.0, "pearson: zero variance input");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman_correlation(const std::vector<double>& a,
                            const std::vector<double>& b) {
  require(a.size() == b.size(), "spearman: length mismatch");
  require(a.size() >= 3, "spearman: need at least 3 observations");
  return pearson(average_ranks(a), average_ranks(b));
}

SimilarityResult similarity_eval(const EmbeddingTable& embeddings,
                                 const std::vector<SimilarityPair>& pairs) {
  SimilarityResult out;
  out.pairs_total = pairs.size();
  std::vector<double> human, cos;
  for (const auto& p : pairs) {
    const auto i = embeddings.find(p.word1);
    const auto j = embeddings.find(p.word2);
    if (!i || !j) continue;
    cos.push_back(cosine(embeddings.vectors.row(*i), embeddings.vectors.row(*j)));
    human.push_back(p.score);
  }
  require(cos.size() >= 3,
          "similarity_eval: fewer than 3 pairs resolvable in the vocabulary");
  out.pairs_used = cos.size();
  out.spearman = spearman_correlation(cos, human);
  return out;
}

// ---------------------------------------------------------------------------
// Bias rankings

BiasBuckets bias_by_projection(const EmbeddingTable& embeddings,
                               const Vector& direction, std::size_t top_n,
                               double threshold) {
  require(direction.size() == embeddings.dim(),
          "bias_by_projection: direction dimensionality mismatch");
  const double norm = direction.norm();
  require(norm > 0.0, "bias_by_projection: zero direction");
  const Vector unit = direction / norm;
  const Vector comp = embeddings.vectors * unit;

  BiasBuckets buckets;
  for (Index i = 0; i < comp.size(); ++i) {
    const auto& word = embeddings.vocabulary[static_cast<std::size_t>(i)];
    const double c = comp(i);
    if (std::abs(c) < threshold)
      buckets.neutral.emplace_back(word, c);
    else if (c > 0.0)
      buckets.positive.emplace_back(word, c);
    else
      buckets.negative.emplace_back(word, c);
  }

  auto by_component_desc = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  auto by_component_asc = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  };
  auto by_abs_asc = [](const auto& a, const auto& b) {
    const double aa = std::abs(a.second), ab = std::abs(b.second);
    return aa != ab ? aa < ab : a.first < b.first;
  };
  std::sort(buckets.positive.begin(), buckets.positive.end(), by_component_desc);
  std::sort(buckets.negative.begin(), buckets.negative.end(), by_component_asc);
  std::sort(buckets.neutral.begin(), buckets.neutral.end(), by_abs_asc);

  auto cap = [top_n](auto& v) {
    if (v.size() > top_n) v.resize(top_n);
  };
  cap(buckets.positive);
  cap(buckets.negative);
  cap(buckets.neutral);
  return buckets;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(
    const EmbeddingTable& embeddings, const std::string& word, std::size_t k) {
  require(k >= 1, "nearest_neighbors: k must be >= 1");
  const Index query = embeddings.at(word);
  const Index n = embeddings.size();
  k = std::min<std::size_t>(k, static_cast<std::size_t>(n) - 1);

  std::vector<std::pair<double, Index>> scored;
  scored.reserve(static_cast<std::size_t>(n) - 1);
  for (Index i = 0; i < n; ++i) {
    if (i == query) continue;
    scored.emplace_back(
        cosine(embeddings.vectors.row(query), embeddings.vectors.row(i)), i);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.emplace_back(
        embeddings.vocabulary[static_cast<std::size_t>(scored[i].second)],
        scored[i].first);
  return out;
}

double bias_by_neighbors(const EmbeddingTable& embeddings_current,
                         const std::vector<int>& original_bias_labels,
                         const std::string& word, std::size_t k) {
  require(original_bias_labels.size() ==
              static_cast<std::size_t>(embeddings_current.size()),
          "bias_by_neighbors: label list must align with vocabulary");
  const auto neighbors = nearest_neighbors(embeddings_current, word, k);
  std::size_t biased = 0;
  for (const auto& [w, cos_sim] : neighbors) {
    const Index idx = embeddings_current.at(w);
    if (original_bias_labels[static_cast<std::size_t>(idx)] != 0) ++biased;
  }
  return static_cast<double>(biased) / static_cast<double>(neighbors.size());
}

double rowspace_norm(const InlpResult& result, const Vector& w_vec) {
  require(w_vec.size() == result.p.dim(),
          "rowspace_norm: vector dimensionality mismatch");
  const double norm = w_vec.norm();
  require(norm > 0.0, "rowspace_norm: zero vector");
  const Vector removed = w_vec - result.p.p * w_vec;  // (I - P) w
  return removed.norm() / norm;
}

// ---------------------------------------------------------------------------
// PCA export

Matrix pca_2d(const Matrix& x) {
  require(x.rows() >= 2, "pca_2d: need at least 2 rows");
  require_finite(x, "pca_2d");
  const Matrix centered = x.rowwise() - x.colwise().mean();
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);

  const Index n_comp = std::min<Index>(2, x.cols());
  Matrix v = svd.matrixV().leftCols(n_comp);
  // Deterministic sign: make the largest-magnitude loading positive.
  for (Index c = 0; c < v.cols(); ++c) {
    Index arg_max = 0;
    for (Index r = 1; r < v.rows(); ++r)
      if (std::abs(v(r, c)) > std::abs(v(arg_max, c))) arg_max = r;
    if (v(arg_max, c) < 0.0) v.col(c) = -v.col(c);
  }

  Matrix coords = Matrix::Zero(x.rows(), 2);
  coords.leftCols(n_comp) = centered * v;
  return coords;
}

}  // namespace nullguard
