#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nullguard/common.hpp"

namespace nullguard {

/// Word-embedding table: ordered vocabulary with one vector per row.
struct EmbeddingTable {
  std::vector<std::string> vocabulary;
  Matrix vectors;  // |V| x d

  Index size() const { return vectors.rows(); }
  Index dim() const { return vectors.cols(); }

  std::optional<Index> find(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Throws InvalidInput naming the missing word.
  Index at(const std::string& word) const {
    auto idx = find(word);
    require(idx.has_value(), "word not in vocabulary: '" + word + "'");
    return *idx;
  }

  void rebuild_index() {
    index_.clear();
    index_.reserve(vocabulary.size());
    for (std::size_t i = 0; i < vocabulary.size(); ++i)
      index_.emplace(vocabulary[i], static_cast<Index>(i));
  }

  static EmbeddingTable create(std::vector<std::string> vocab, Matrix vecs) {
    require(static_cast<Index>(vocab.size()) == vecs.rows(),
            "EmbeddingTable: vocabulary/vector count mismatch");
    require_finite(vecs, "EmbeddingTable");
    EmbeddingTable t;
    t.vocabulary = std::move(vocab);
    t.vectors = std::move(vecs);
    t.rebuild_index();
    require(t.index_.size() == t.vocabulary.size(),
            "EmbeddingTable: duplicate words in vocabulary");
    return t;
  }

 private:
  std::unordered_map<std::string, Index> index_;
};

}  // namespace nullguard
