#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nullguard/metrics.hpp"
#include "test_utils.hpp"

using namespace nullguard;

namespace {

EmbeddingTable table_from(const std::vector<std::string>& words,
                          const Matrix& vecs) {
  return EmbeddingTable::create(words, vecs);
}

}  // namespace

TEST_SUITE("metrics") {

// --------------------------------------------------------------------- probes

TEST_CASE("linear probe on separable data") {
  auto eng = rng::make_engine(1);
  const Index n = 600;
  Matrix x(n, 3);
  std::vector<int> z;
  for (Index i = 0; i < n; ++i) {
    const int cls = static_cast<int>(rng::uniform_int(eng, 2));
    x(i, 0) = (cls ? 1.0 : -1.0) + 0.1 * rng::normal(eng);
    x(i, 1) = rng::normal(eng);
    x(i, 2) = rng::normal(eng);
    z.push_back(cls);
  }
  TrainConfig cfg;
  cfg.seed = 2;
  const auto res = probe_linear(x, z, cfg);
  CHECK(res.accuracy >= 0.99);
  CHECK(res.kind == ProbeKind::kLinear);
}

TEST_CASE("linear probe on guarded data sits at the baseline") {
  // The informative coordinate has been zeroed; only noise remains.
  auto eng = rng::make_engine(3);
  const Index n = 5000;
  Matrix x(n, 3);
  std::vector<int> z;
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = 0.0;
    x(i, 1) = rng::normal(eng);
    x(i, 2) = rng::normal(eng);
    z.push_back(static_cast<int>(rng::uniform_int(eng, 2)));
  }
  TrainConfig cfg;
  cfg.seed = 4;
  const auto res = probe_linear(x, z, cfg);
  CHECK(res.accuracy >= 0.47);
  CHECK(res.accuracy <= 0.53);
}

TEST_CASE("probe rejects degenerate labels") {
  const Matrix x = testutil::random_matrix(10, 2, 5);
  const std::vector<int> z(10, 1);
  TrainConfig cfg;
  CHECK_THROWS_AS(probe_linear(x, z, cfg), InvalidInput);
  CHECK_THROWS_AS(probe_mlp(x, z), InvalidInput);
}

TEST_CASE("the MLP probe solves XOR where the linear probe cannot") {
  auto eng = rng::make_engine(7);
  const Index n = 800;
  Matrix x(n, 2);
  std::vector<int> z;
  for (Index i = 0; i < n; ++i) {
    const double a = rng::uniform_int(eng, 2) ? 1.0 : -1.0;
    const double b = rng::uniform_int(eng, 2) ? 1.0 : -1.0;
    x(i, 0) = a + 0.15 * rng::normal(eng);
    x(i, 1) = b + 0.15 * rng::normal(eng);
    z.push_back(a * b > 0 ? 1 : 0);
  }
  TrainConfig lin_cfg;
  lin_cfg.seed = 8;
  const auto lin = probe_linear(x, z, lin_cfg);
  CHECK(lin.accuracy <= 0.6);

  MlpProbeConfig mlp_cfg;
  mlp_cfg.seed = 8;
  const auto mlp = probe_mlp(x, z, mlp_cfg);
  CHECK(mlp.kind == ProbeKind::kMlp);
  CHECK(mlp.accuracy >= 0.9);
}

TEST_CASE("the MLP probe handles separable data") {
  auto eng = rng::make_engine(9);
  const Index n = 500;
  Matrix x(n, 2);
  std::vector<int> z;
  for (Index i = 0; i < n; ++i) {
    const int cls = static_cast<int>(rng::uniform_int(eng, 2));
    x(i, 0) = (cls ? 1.5 : -1.5) + 0.2 * rng::normal(eng);
    x(i, 1) = rng::normal(eng);
    z.push_back(cls);
  }
  const auto res = probe_mlp(x, z, {.hidden = 32, .seed = 10});
  CHECK(res.accuracy >= 0.99);
}

// -------------------------------------------------------------------- kmeans

TEST_CASE("kmeans with k=1 assigns everything to cluster zero") {
  const Matrix x = testutil::random_matrix(20, 3, 11);
  const auto res = kmeans(x, 1, 0);
  for (int a : res.assignments) CHECK(a == 0);
}

TEST_CASE("kmeans with k=n isolates every point") {
  const Matrix x = testutil::random_matrix(6, 2, 12);
  const auto res = kmeans(x, 6, 1);
  std::vector<int> sorted = res.assignments;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 6; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
  CHECK(res.inertia_trace.back() <= 1e-12);
}

TEST_CASE("kmeans recovers well-separated blobs") {
  auto eng = rng::make_engine(13);
  const Index n = 200;
  Matrix x(n, 4);
  std::vector<int> truth;
  for (Index i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    for (Index c = 0; c < 4; ++c) x(i, c) = 0.3 * rng::normal(eng);
    x(i, 0) += cls ? 5.0 : -5.0;
    truth.push_back(cls);
  }
  const auto res = kmeans(x, 2, 14);
  CHECK(v_measure(truth, res.assignments) >= 0.999);
}

TEST_CASE("kmeans objective never increases across Lloyd iterations") {
  const Matrix x = testutil::random_matrix(300, 5, 15);
  const auto res = kmeans(x, 4, 16);
  for (std::size_t i = 1; i < res.inertia_trace.size(); ++i)
    CHECK(res.inertia_trace[i] <= res.inertia_trace[i - 1] + 1e-9);
}

TEST_CASE("kmeans rejects k larger than n") {
  const Matrix x = testutil::random_matrix(3, 2, 17);
  CHECK_THROWS_AS(kmeans(x, 4, 0), InvalidInput);
}

// ----------------------------------------------------------------- v-measure

TEST_CASE("v_measure of identical labelings is one") {
  CHECK(v_measure({0, 1, 2, 0, 1, 2}, {0, 1, 2, 0, 1, 2}) ==
        doctest::Approx(1.0));
  // Predicted ids may be permuted arbitrarily.
  CHECK(v_measure({0, 1, 2, 0, 1, 2}, {5, 3, 9, 5, 3, 9}) ==
        doctest::Approx(1.0));
}

TEST_CASE("a single predicted cluster on balanced classes scores zero") {
  CHECK(v_measure({0, 0, 1, 1}, {7, 7, 7, 7}) == doctest::Approx(0.0));
}

TEST_CASE("v_measure is symmetric under relabeling of predictions") {
  const std::vector<int> truth{0, 0, 1, 1, 1, 0, 1, 0};
  const std::vector<int> pred{1, 0, 1, 1, 0, 0, 1, 1};
  std::vector<int> flipped;
  for (int p : pred) flipped.push_back(1 - p);
  CHECK(v_measure(truth, pred) == doctest::Approx(v_measure(truth, flipped)));
}

TEST_CASE("v_measure rejects length mismatch") {
  CHECK_THROWS_AS(v_measure({0, 1}, {0, 1, 1}), InvalidInput);
}

// ---------------------------------------------------------------------- WEAT

namespace {

// Small planted geometry: X words hug attribute A's axis, Y words hug B's.
struct WeatFixture {
  EmbeddingTable table;
  WeatSpec spec;
};

WeatFixture make_weat_fixture() {
  std::vector<std::string> words;
  Matrix vecs(12, 4);
  auto put = [&](const std::string& w, double a, double b, double c,
                 double d) {
    vecs(static_cast<Index>(words.size()), 0) = a;
    vecs(static_cast<Index>(words.size()), 1) = b;
    vecs(static_cast<Index>(words.size()), 2) = c;
    vecs(static_cast<Index>(words.size()), 3) = d;
    words.push_back(w);
  };
  put("a1", 1.0, 0.0, 0.1, 0.0);
  put("a2", 1.0, 0.0, -0.1, 0.0);
  put("b1", 0.0, 1.0, 0.1, 0.0);
  put("b2", 0.0, 1.0, -0.1, 0.0);
  put("x1", 1.0, 0.1, 0.02, 0.01);
  put("x2", 1.0, 0.12, -0.02, 0.02);
  put("x3", 1.0, 0.08, 0.01, -0.03);
  put("x4", 1.0, 0.11, -0.01, 0.015);
  put("y1", 0.1, 1.0, 0.02, 0.01);
  put("y2", 0.12, 1.0, -0.02, 0.02);
  put("y3", 0.08, 1.0, 0.01, -0.03);
  put("y4", 0.11, 1.0, -0.01, 0.015);

  WeatFixture f{table_from(words, vecs), {}};
  f.spec.targets_x = {"x1", "x2", "x3", "x4"};
  f.spec.targets_y = {"y1", "y2", "y3", "y4"};
  f.spec.attributes_a = {"a1", "a2"};
  f.spec.attributes_b = {"b1", "b2"};
  return f;
}

}  // namespace

TEST_CASE("exhaustive enumeration gives exactly 1/C(8,4) on the planted case") {
  const auto f = make_weat_fixture();
  const auto res = weat(f.table, f.spec, 0);
  CHECK(res.exact);
  CHECK(res.permutations_evaluated == 70);
  CHECK(res.p_value == 1.0 / 70.0);
  CHECK(res.statistic > 0.0);
  CHECK(res.effect_size > 1.5);
}

TEST_CASE("identical attribute lists give a statistic of exactly zero") {
  auto f = make_weat_fixture();
  f.spec.attributes_b = f.spec.attributes_a;
  const auto res = weat(f.table, f.spec, 0);
  CHECK(res.statistic == 0.0);
  CHECK(res.effect_size == 0.0);
  // Every repartition ties the observed statistic, so the one-sided
  // fraction counts all of them.
  CHECK(res.p_value == 1.0);
}

TEST_CASE("swapping the target sets negates statistic and effect size") {
  const auto f = make_weat_fixture();
  auto swapped = f.spec;
  std::swap(swapped.targets_x, swapped.targets_y);
  const auto res = weat(f.table, f.spec, 0);
  const auto neg = weat(f.table, swapped, 0);
  CHECK(neg.statistic == -res.statistic);
  CHECK(neg.effect_size == -res.effect_size);
}

TEST_CASE("the statistic is invariant under uniform scaling") {
  const auto f = make_weat_fixture();
  const auto res = weat(f.table, f.spec, 0);
  const auto scaled_table =
      table_from(f.table.vocabulary, Matrix(2.5 * f.table.vectors));
  const auto scaled = weat(scaled_table, f.spec, 0);
  CHECK(std::abs(scaled.statistic - res.statistic) <= 1e-12);
  CHECK(std::abs(scaled.effect_size - res.effect_size) <= 1e-12);
  CHECK(scaled.p_value == res.p_value);
}

TEST_CASE("weat names every missing word") {
  const auto f = make_weat_fixture();
  auto spec = f.spec;
  spec.targets_x[1] = "nope";
  CHECK_THROWS_WITH_AS(weat(f.table, spec, 0),
                       doctest::Contains("'nope'"), InvalidInput);
}

TEST_CASE("the sampled path is deterministic by seed") {
  // 14 target words forces sampling (> 12 total).
  std::vector<std::string> words;
  Matrix vecs = testutil::random_matrix(18, 6, 19);
  for (int i = 0; i < 18; ++i) words.push_back("w" + std::to_string(i));
  const auto table = table_from(words, vecs);
  WeatSpec spec;
  for (int i = 0; i < 7; ++i) spec.targets_x.push_back("w" + std::to_string(i));
  for (int i = 7; i < 14; ++i) spec.targets_y.push_back("w" + std::to_string(i));
  spec.attributes_a = {"w14", "w15"};
  spec.attributes_b = {"w16", "w17"};
  spec.n_permutations = 2000;

  const auto a = weat(table, spec, 23);
  const auto b = weat(table, spec, 23);
  CHECK_FALSE(a.exact);
  CHECK(a.permutations_evaluated == 2000);
  CHECK(a.p_value == b.p_value);
}

// ------------------------------------------------------------------ Spearman

TEST_CASE("spearman of a monotone relation is one") {
  CHECK(spearman_correlation({1.0, 2.0, 3.0, 4.0}, {10.0, 20.0, 21.0, 50.0}) ==
        doctest::Approx(1.0));
  CHECK(spearman_correlation({1.0, 2.0, 3.0, 4.0}, {50.0, 21.0, 20.0, 10.0}) ==
        doctest::Approx(-1.0));
}

TEST_CASE("spearman averages tied ranks") {
  // Ranks of a: [5, 3.5, 3.5, 2, 1]; ranks of b: [5, 3, 2, 4, 1].
  // Pearson over those ranks is 6.5 / sqrt(95).
  const std::vector<double> a{0.9, 0.8, 0.8, 0.5, 0.3};
  const std::vector<double> b{10.0, 8.0, 7.0, 9.0, 1.0};
  CHECK(spearman_correlation(a, b) ==
        doctest::Approx(6.5 / std::sqrt(95.0)).epsilon(1e-12));
}

TEST_CASE("similarity_eval against exact cosine scores") {
  // Five words at known angles from a probe direction.
  std::vector<std::string> words{"base", "p1", "p2", "p3", "p4"};
  Matrix vecs(5, 2);
  vecs.row(0) << 1.0, 0.0;
  const double angles[] = {0.2, 0.6, 1.0, 1.4};
  for (int i = 0; i < 4; ++i)
    vecs.row(i + 1) << std::cos(angles[i]), std::sin(angles[i]);
  const auto table = table_from(words, vecs);

  std::vector<SimilarityPair> pairs;
  for (int i = 0; i < 4; ++i)
    pairs.push_back({"base", words[static_cast<std::size_t>(i + 1)],
                     std::cos(angles[i])});
  CHECK(similarity_eval(table, pairs).spearman == doctest::Approx(1.0));

  for (auto& p : pairs) p.score = -p.score;
  CHECK(similarity_eval(table, pairs).spearman == doctest::Approx(-1.0));
}

TEST_CASE("similarity_eval skips unresolvable pairs and enforces the floor") {
  std::vector<std::string> words{"a", "b", "c", "d"};
  const auto table = table_from(words, testutil::random_matrix(4, 3, 29));
  std::vector<SimilarityPair> pairs{
      {"a", "b", 1.0}, {"a", "c", 2.0}, {"b", "c", 3.0}, {"a", "zz", 4.0}};
  const auto res = similarity_eval(table, pairs);
  CHECK(res.pairs_total == 4);
  CHECK(res.pairs_used == 3);

  pairs.resize(2);
  CHECK_THROWS_AS(similarity_eval(table, pairs), InvalidInput);
}

// ------------------------------------------------------------ bias rankings

TEST_CASE("bias_by_projection buckets by signed component") {
  std::vector<std::string> words{"pos", "neg", "mid"};
  Matrix vecs(3, 2);
  vecs << 1.0, 0.3, -1.0, 0.2, 0.01, 0.5;
  const auto table = table_from(words, vecs);
  Vector dir(2);
  dir << 1.0, 0.0;

  const auto buckets = bias_by_projection(table, dir, 10);
  REQUIRE(buckets.positive.size() == 1);
  REQUIRE(buckets.negative.size() == 1);
  REQUIRE(buckets.neutral.size() == 1);
  CHECK(buckets.positive[0].first == "pos");
  CHECK(buckets.negative[0].first == "neg");
  CHECK(buckets.neutral[0].first == "mid");
}

TEST_CASE("a component exactly at the threshold is not neutral") {
  std::vector<std::string> words{"edge", "inside"};
  Matrix vecs(2, 2);
  vecs << 0.03, 1.0, 0.0299, 1.0;
  const auto table = table_from(words, vecs);
  Vector dir(2);
  dir << 1.0, 0.0;
  const auto buckets = bias_by_projection(table, dir, 10);
  REQUIRE(buckets.positive.size() == 1);
  CHECK(buckets.positive[0].first == "edge");
  REQUIRE(buckets.neutral.size() == 1);
  CHECK(buckets.neutral[0].first == "inside");
}

TEST_CASE("bias_by_projection orders by planted component and caps at top_n") {
  std::vector<std::string> words{"w1", "w2", "w3", "w4"};
  Matrix vecs(4, 2);
  vecs << 0.5, 0, 0.9, 0, 0.1, 0, 0.7, 0;
  const auto table = table_from(words, vecs);
  Vector dir(2);
  dir << 2.0, 0.0;  // non-unit on purpose

  const auto full = bias_by_projection(table, dir, 100);
  REQUIRE(full.positive.size() == 4);
  CHECK(full.positive[0].first == "w2");
  CHECK(full.positive[1].first == "w4");
  CHECK(full.positive[2].first == "w1");
  CHECK(full.positive[3].first == "w3");

  const auto capped = bias_by_projection(table, dir, 2);
  REQUIRE(capped.positive.size() == 2);
  CHECK(capped.positive[1].first == "w4");
}

TEST_CASE("bias_by_projection rejects the zero direction") {
  std::vector<std::string> words{"w"};
  const auto table = table_from(words, Matrix::Ones(1, 2));
  CHECK_THROWS_AS(bias_by_projection(table, Vector::Zero(2), 5), InvalidInput);
}

TEST_CASE("bias_by_neighbors counts originally biased neighbors") {
  std::vector<std::string> words{"q", "n1", "n2", "far"};
  Matrix vecs(4, 2);
  vecs << 1.0, 0.0, 0.99, 0.01, 0.98, -0.01, -1.0, 0.0;
  const auto table = table_from(words, vecs);

  CHECK(bias_by_neighbors(table, {0, 1, -1, 0}, "q", 2) == 1.0);
  CHECK(bias_by_neighbors(table, {0, 0, 0, 1}, "q", 2) == 0.0);
  CHECK_THROWS_AS(bias_by_neighbors(table, {0, 0, 0, 0}, "zz", 2),
                  InvalidInput);
}

TEST_CASE("nearest_neighbors ranks a duplicate vector first") {
  std::vector<std::string> words{"q", "dup", "other", "anti"};
  Matrix vecs(4, 2);
  vecs << 1.0, 0.5, 2.0, 1.0, 0.0, 1.0, -1.0, -0.5;
  const auto table = table_from(words, vecs);
  const auto nn = nearest_neighbors(table, "q", 3);
  REQUIRE(nn.size() == 3);
  CHECK(nn[0].first == "dup");
  CHECK(nn[0].second == doctest::Approx(1.0));
  CHECK(nn[2].first == "anti");

  // k beyond the vocabulary gives the full ordering.
  CHECK(nearest_neighbors(table, "q", 50).size() == 3);
}

TEST_CASE("nearest_neighbors keeps planted clusters together") {
  auto eng = rng::make_engine(31);
  std::vector<std::string> words;
  Matrix vecs(20, 3);
  for (int i = 0; i < 20; ++i) {
    const int cluster = i < 10 ? 0 : 1;
    vecs(i, 0) = (cluster ? 8.0 : -8.0) + 0.1 * rng::normal(eng);
    vecs(i, 1) = 0.1 * rng::normal(eng);
    vecs(i, 2) = 1.0;
    words.push_back((cluster ? "b" : "a") + std::to_string(i));
  }
  const auto table = table_from(words, vecs);
  const auto nn = nearest_neighbors(table, "a0", 9);
  for (const auto& [w, cos] : nn) CHECK(w[0] == 'a');
}

// -------------------------------------------------------------- rowspace norm

TEST_CASE("rowspace_norm decomposes removed and kept components") {
  const Index d = 6;
  const Matrix basis = testutil::random_orthonormal(2, d, 37);
  const Vector u = basis.row(0).transpose();  // removed
  const Vector v = basis.row(1).transpose();  // kept

  InlpResult result;
  result.rowspace_projs = {rowspace_projection(u.transpose())};
  result.p = intersection_nullspace_projection(result.rowspace_projs, d);
  result.iterations_run = 1;

  CHECK(rowspace_norm(result, v) <= 1e-9);
  CHECK(rowspace_norm(result, u) == doctest::Approx(1.0).epsilon(1e-9));
  const Vector diag = (u + v) / std::sqrt(2.0);
  CHECK(rowspace_norm(result, diag) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-9));
  CHECK_THROWS_AS(rowspace_norm(result, Vector::Zero(d)), InvalidInput);
}

// ----------------------------------------------------------------------- PCA

TEST_CASE("pca_2d of collinear data has a silent second component") {
  auto eng = rng::make_engine(41);
  const Index n = 50;
  Vector dir(3);
  dir << 1.0, 2.0, -1.0;
  Matrix x(n, 3);
  for (Index i = 0; i < n; ++i)
    x.row(i) = (rng::normal(eng) * dir).transpose();
  const Matrix coords = pca_2d(x);
  CHECK(coords.rows() == n);
  CHECK(coords.cols() == 2);
  CHECK(coords.col(1).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("pca_2d explains about 2/d of isotropic variance") {
  const Index n = 4000, d = 20;
  const Matrix x = testutil::random_matrix(n, d, 43);
  const Matrix coords = pca_2d(x);
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const double explained = coords.squaredNorm() / centered.squaredNorm();
  CHECK(explained >= 2.0 / d - 0.02);
  CHECK(explained <= 2.0 / d + 0.03);
}

TEST_CASE("pca_2d reconstructs rank-2 data exactly") {
  auto eng = rng::make_engine(47);
  const Matrix basis = testutil::random_orthonormal(2, 5, 48);
  const Index n = 60;
  Matrix x(n, 5);
  for (Index i = 0; i < n; ++i)
    x.row(i) = rng::normal(eng) * basis.row(0) + rng::normal(eng) * basis.row(1);
  const Matrix coords = pca_2d(x);
  const Matrix centered = x.rowwise() - x.colwise().mean();
  CHECK(coords.squaredNorm() ==
        doctest::Approx(centered.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("pca_2d needs at least two rows") {
  CHECK_THROWS_AS(pca_2d(Matrix::Ones(1, 3)), InvalidInput);
}

}  // TEST_SUITE
