#pragma once

#include <cstdint>
#include <vector>

#include "nullguard/common.hpp"

namespace nullguard {

/// Controlled two-class setup: balanced Y and Z marginals, with the
/// proportion of each protected group inside each main class set by `ratio`
/// (0.5 = independent, 1.0 = Z determined by Y). Features are the two signal
/// directions scaled by the class signs plus isotropic Gaussian noise.
struct ControlledSpec {
  Index n_per_class = 5000;  // rows per main-task class (2 classes)
  Index d = 50;
  double ratio = 0.5;  // P(z = 0 | y = 1), mirrored for y = 0
  Vector signal_y;     // defaults to e0
  Vector signal_z;     // defaults to e1
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
};

Dataset gen_controlled(const ControlledSpec& spec);

/// Desk-scale stand-in for a biased embedding space. Each biased word gets a
/// signed component on one of the planted orthonormal directions, with the
/// direction drawn from a geometrically decaying subgroup distribution; the
/// unequal subgroup sizes keep residual signal linearly decodable after any
/// single direction is removed, so the iterative removal is genuinely
/// multi-step. Neutral words have exactly zero component on every planted
/// direction. Optional XOR coupling plants label structure on two extra
/// directions that no linear classifier can exploit.
struct BiasedEmbeddingSpec {
  Index n_words = 6000;  // one third neutral, the rest split between signs
  Index d = 50;
  Index n_bias_directions = 1;
  std::uint64_t seed = 0;
  double signal_scale = 1.0;     // planted component magnitude
  double subgroup_decay = 0.8;   // geometric falloff of subgroup sizes
  double signal_jitter = 0.25;   // label-independent noise inside the span
  double xor_scale = 0.0;        // > 0 plants the XOR-coupled pair
};

struct BiasedEmbeddings {
  Matrix vectors;                   // n_words x d
  std::vector<int> bias_labels;     // +1 / -1 biased, 0 neutral
  Matrix planted_directions;        // n_bias_directions x d, orthonormal
  Matrix xor_directions;            // 2 x d when xor_scale > 0, else empty
};

BiasedEmbeddings gen_biased_embeddings(const BiasedEmbeddingSpec& spec);

inline BiasedEmbeddings gen_biased_embeddings(Index n_words, Index d,
                                              Index n_bias_directions,
                                              std::uint64_t seed) {
  BiasedEmbeddingSpec spec;
  spec.n_words = n_words;
  spec.d = d;
  spec.n_bias_directions = n_bias_directions;
  spec.seed = seed;
  return gen_biased_embeddings(spec);
}

/// Binary dataset over the biased (non-neutral) words: z = 1 for positive
/// bias, 0 for negative. Row order follows the embedding order.
Dataset biased_words_dataset(const BiasedEmbeddings& emb);

}  // namespace nullguard
