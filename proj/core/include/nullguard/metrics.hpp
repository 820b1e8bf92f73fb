#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nullguard/classifiers.hpp"
#include "nullguard/common.hpp"
#include "nullguard/embedding.hpp"
#include "nullguard/inlp.hpp"

namespace nullguard {

// ---------------------------------------------------------------------------
// Probes

enum class ProbeKind { kLinear, kMlp };

struct ProbeResult {
  ProbeKind kind = ProbeKind::kLinear;
  double accuracy = 0.0;
  double majority = 0.0;  // majority baseline on the held-out split
};

/// Trains a fresh linear classifier on an internal seeded 80/20 split and
/// reports held-out accuracy against the held-out majority baseline.
ProbeResult probe_linear(const Matrix& x, const std::vector<int>& z,
                         const TrainConfig& cfg,
                         ClassifierKind kind = ClassifierKind::kLogistic);

struct MlpProbeConfig {
  int hidden = 128;
  int epochs = 50;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

/// One-hidden-layer ReLU network trained with SGD and cross-entropy on the
/// same 80/20 protocol. Measures what remains nonlinearly decodable.
ProbeResult probe_mlp(const Matrix& x, const std::vector<int>& z,
                      const MlpProbeConfig& cfg = {});

// ---------------------------------------------------------------------------
// Clustering

struct KMeansResult {
  std::vector<int> assignments;
  Matrix centroids;                   // k x d
  std::vector<double> inertia_trace;  // objective after each assignment step
  int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding; deterministic given the seed.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed,
                    int max_iters = 100);

/// Harmonic mean of homogeneity and completeness (entropies in nats).
/// A labeling with zero entropy scores 1 on its side of the pair.
double v_measure(const std::vector<int>& labels_true,
                 const std::vector<int>& labels_pred);

// ---------------------------------------------------------------------------
// Word-embedding association test

struct WeatSpec {
  std::vector<std::string> targets_x;
  std::vector<std::string> targets_y;
  std::vector<std::string> attributes_a;
  std::vector<std::string> attributes_b;
  int n_permutations = 10000;
};

struct WeatResult {
  double statistic = 0.0;
  double effect_size = 0.0;
  double p_value = 0.0;
  bool exact = false;                       // exhaustive enumeration used
  std::uint64_t permutations_evaluated = 0;
};

/// Differential cosine association between two target sets and two attribute
/// sets, with a one-sided permutation test over equal-size repartitions of
/// X u Y. Partitions are enumerated exhaustively when |X| + |Y| <= 12,
/// otherwise sampled n_permutations times with the seed.
WeatResult weat(const EmbeddingTable& embeddings, const WeatSpec& spec,
                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Similarity benchmarks

struct SimilarityPair {
  std::string word1;
  std::string word2;
  double score = 0.0;
};

struct SimilarityResult {
  double spearman = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_total = 0;
};

/// Spearman rank correlation (average ranks on ties) between cosine
/// similarities and human scores. Pairs with out-of-vocabulary words are
/// skipped; fewer than 3 usable pairs is an error.
SimilarityResult similarity_eval(const EmbeddingTable& embeddings,
                                 const std::vector<SimilarityPair>& pairs);

/// Average-rank Spearman correlation of two equal-length lists.
double spearman_correlation(const std::vector<double>& a,
                            const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Bias rankings

inline constexpr double kNeutralThreshold = 0.03;

struct BiasBuckets {
  // (word, signed component on the unit direction)
  std::vector<std::pair<std::string, double>> positive;  // most positive first
  std::vector<std::pair<std::string, double>> negative;  // most negative first
  std::vector<std::pair<std::string, double>> neutral;   // |c| < threshold
};

/// Buckets the vocabulary by the signed component of each vector on the unit
/// direction. Words with |component| < threshold are neutral (strict: a word
/// exactly at the threshold is biased). Each bucket is capped at top_n.
BiasBuckets bias_by_projection(const EmbeddingTable& embeddings,
                               const Vector& direction, std::size_t top_n,
                               double threshold = kNeutralThreshold);

/// Fraction of the k cosine-nearest neighbors of `word` whose original bias
/// label is non-neutral. `original_bias_labels` is aligned with the
/// vocabulary; 0 means neutral.
double bias_by_neighbors(const EmbeddingTable& embeddings_current,
                         const std::vector<int>& original_bias_labels,
                         const std::string& word, std::size_t k);

/// Top-k neighbors by cosine similarity, query excluded. k is capped at
/// vocabulary size - 1.
std::vector<std::pair<std::string, double>> nearest_neighbors(
    const EmbeddingTable& embeddings, const std::string& word, std::size_t k);

/// ||P_R w|| / ||w|| with P_R = I - result.p: how much of the vector lives in
/// the removed subspace.
double rowspace_norm(const InlpResult& result, const Vector& w_vec);

// ---------------------------------------------------------------------------
// Plot-ready export

/// Projection of the centered rows onto their top-2 principal components,
/// with deterministic component signs.
Matrix pca_2d(const Matrix& x);

}  // namespace nullguard
