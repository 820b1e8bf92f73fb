#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nullguard/common.hpp"
#include "nullguard/embedding.hpp"
#include "nullguard/linalg.hpp"
#include "nullguard/metrics.hpp"

namespace nullguard::io {

// Matrix text format (shared repo-wide): first line "<rows> <cols>", then one
// row per line of space-separated decimals written with 17 significant
// digits, so save -> load -> save is byte-identical.

Matrix load_matrix(const std::string& path);
void save_matrix(const Matrix& m, const std::string& path);

/// Whitespace-separated "word v1 ... vd" lines. Keeps the first `limit`
/// lines when given; with lowercasing, the first occurrence of a duplicate
/// wins. Ragged lines are an error naming the line number.
EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<Index> limit = std::nullopt,
                               bool lowercase = false);
void save_embeddings(const EmbeddingTable& table, const std::string& path);

/// Matrix format; the loader re-validates idempotence within 1e-6 and
/// reports the rank.
ProjectionMatrix load_projection(const std::string& path);
void save_projection(const ProjectionMatrix& p, const std::string& path);

/// TSV "<id>\t<label>", ids matching the row order of the matrix file.
struct LabelFile {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
};
LabelFile load_label_file(const std::string& path);
void save_label_file(const LabelFile& f, const std::string& path);

/// Maps distinct label strings to dense ids in lexicographic order.
struct LabelEncoding {
  std::vector<int> values;
  std::vector<std::string> names;  // names[id] = original label
};
LabelEncoding encode_labels(const std::vector<std::string>& labels);

/// Labels parsed as decimal numbers (regression targets).
std::vector<double> parse_continuous(const std::vector<std::string>& labels);

/// TSV "<id>\t<partition>" with partition in {train, dev, test}. Partitions
/// must be disjoint and exactly cover `ids`; results are row indices into
/// the id order given.
struct SplitFile {
  std::vector<Index> train;
  std::vector<Index> dev;
  std::vector<Index> test;
};
SplitFile load_split(const std::string& path,
                     const std::vector<std::string>& ids);

/// JSON with keys targets_x, targets_y, attributes_a, attributes_b,
/// n_permutations.
WeatSpec load_weat_spec(const std::string& path);

/// TSV "word1\tword2\tscore".
std::vector<SimilarityPair> load_similarity_pairs(const std::string& path);

}  // namespace nullguard::io
