// nullguard: train-project-repeat removal of linearly decodable attributes
// from vector representations, with the evaluation battery around it.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nullguard/classifiers.hpp"
#include "nullguard/common.hpp"
#include "nullguard/fairpipe.hpp"
#include "nullguard/inlp.hpp"
#include "nullguard/io.hpp"
#include "nullguard/metrics.hpp"
#include "nullguard/rng.hpp"
#include "nullguard/synth.hpp"

namespace {

using nullguard::Dataset;
using nullguard::Index;
using nullguard::InvalidInput;
using nullguard::Matrix;
using nullguard::Vector;
using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Run manifest

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Manifest {
 public:
  Manifest(std::string subcommand, int argc, char** argv)
      : subcommand_(std::move(subcommand)), start_(Clock::now()) {
    for (int i = 1; i < argc; ++i) args_.emplace_back(argv[i]);
  }

  void add_input(const std::string& path) {
    inputs_[path] = hex64(fnv1a64_file(path));
  }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  json finish() const {
    const double secs =
        std::chrono::duration<double>(Clock::now() - start_).count();
    return json{{"subcommand", subcommand_},
                {"arguments", args_},
                {"seed", seed_},
                {"input_digests", inputs_},
                {"tool_version", kVersion},
                {"duration_seconds", secs}};
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::string subcommand_;
  std::vector<std::string> args_;
  std::map<std::string, std::string> inputs_;
  std::uint64_t seed_ = 0;
  Clock::time_point start_;
};

void write_report(const Manifest& manifest, const json& results,
                  const std::string& path) {
  json report{{"manifest", manifest.finish()}, {"results", results}};
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write report: " + path);
  out << report.dump(2) << '\n';
}

// Every data-handling subcommand takes --format; only the text formats are
// implemented in v1.
void attach_format(CLI::App* cmd) {
  cmd->add_option("--format", "input/output format (only: text)")
      ->check(CLI::IsMember({"text"}))
      ->default_str("text");
}

// Seed fallback: --seed beats NULLGUARD_SEED beats 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("NULLGUARD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidInput("NULLGUARD_SEED is not an integer: " +
                         std::string(env));
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Shared option bundles

struct SeedOpt {
  std::optional<std::uint64_t> seed;
  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (default: $NULLGUARD_SEED or 0)");
  }
  std::uint64_t value() const { return resolve_seed(seed); }
};

struct TrainOpts {
  int epochs = 100;
  double lr = 0.1;
  double l2 = 1e-4;
  bool fit_intercept = false;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* lr_opt = nullptr;
  void attach(CLI::App* cmd) {
    epochs_opt = cmd->add_option("--epochs", epochs, "SGD epochs");
    lr_opt = cmd->add_option("--lr", lr,
                             "initial learning rate (decays as 1/sqrt t)");
    cmd->add_option("--l2", l2, "L2 regularization strength");
    cmd->add_flag("--fit-intercept", fit_intercept, "train an intercept term");
  }
  nullguard::TrainConfig config(std::uint64_t seed) const {
    nullguard::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.learning_rate = lr;
    cfg.l2 = l2;
    cfg.fit_intercept = fit_intercept;
    cfg.seed = seed;
    return cfg;
  }
};

nullguard::ClassifierKind parse_classifier(const std::string& name) {
  if (name == "logistic") return nullguard::ClassifierKind::kLogistic;
  if (name == "svm") return nullguard::ClassifierKind::kSvm;
  if (name == "regressor") return nullguard::ClassifierKind::kRegressor;
  throw InvalidInput("unknown classifier: " + name);
}

struct LoadedLabels {
  std::vector<int> values;
  std::vector<std::string> names;
  std::vector<std::string> ids;
};

LoadedLabels load_discrete_labels(const std::string& path, Manifest& man) {
  man.add_input(path);
  const auto file = nullguard::io::load_label_file(path);
  const auto enc = nullguard::io::encode_labels(file.labels);
  return {enc.values, enc.names, file.ids};
}

Matrix load_matrix_input(const std::string& path, Manifest& man) {
  man.add_input(path);
  return nullguard::io::load_matrix(path);
}

void check_rows(const Matrix& x, std::size_t labels, const std::string& what) {
  if (static_cast<std::size_t>(x.rows()) != labels)
    throw InvalidInput(what + ": matrix has " + std::to_string(x.rows()) +
                       " rows but " + std::to_string(labels) + " labels");
}

// Re-encodes labels against an existing name table so train/dev ids agree.
std::vector<int> encode_with(const std::vector<std::string>& names,
                             const std::vector<std::string>& labels,
                             const std::string& what) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& s : labels) {
    const auto it = std::lower_bound(names.begin(), names.end(), s);
    if (it == names.end() || *it != s)
      throw InvalidInput(what + ": label '" + s + "' not present in training labels");
    out.push_back(static_cast<int>(it - names.begin()));
  }
  return out;
}

json inlp_results_json(const nullguard::InlpResult& result) {
  std::vector<double> norms;
  norms.reserve(result.classifiers.size());
  for (const auto& model : result.classifiers) norms.push_back(model.w.norm());
  return json{{"iterations_run", result.iterations_run},
              {"majority", result.majority},
              {"dev_accuracy_trace", result.dev_accuracy_trace},
              {"rank_history", result.rank_history},
              {"classifier_norms", norms},
              {"final_rank", result.p.rank},
              {"dim", result.p.dim()}};
}

std::vector<std::string> make_row_ids(Index n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
  return ids;
}

void save_labels_tsv(const std::vector<std::string>& ids,
                     const std::vector<int>& values, const std::string& path) {
  nullguard::io::LabelFile f;
  f.ids = ids;
  for (int v : values) f.labels.push_back(std::to_string(v));
  nullguard::io::save_label_file(f, path);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string kind = "controlled";
  SeedOpt seed;
  // controlled
  Index n_per_class = 5000;
  Index dim = 50;
  double ratio = 0.5;
  double noise_sigma = 1.0;
  // biased
  Index n_words = 6000;
  Index directions = 1;
  double xor_scale = 0.0;
  // outputs
  std::string out_x, out_y, out_z;
  std::string out_embeddings, out_bias_labels, out_directions;
  std::string out_report;
};

int run_synth(const SynthArgs& a, Manifest& man) {
  const std::uint64_t seed = a.seed.value();
  man.set_seed(seed);
  json results;

  if (a.kind == "controlled") {
    nullguard::ControlledSpec spec;
    spec.n_per_class = a.n_per_class;
    spec.d = a.dim;
    spec.ratio = a.ratio;
    spec.noise_sigma = a.noise_sigma;
    spec.seed = seed;
    const Dataset ds = nullguard::gen_controlled(spec);
    const auto ids = make_row_ids(ds.n());
    if (!a.out_x.empty()) nullguard::io::save_matrix(ds.x, a.out_x);
    if (!a.out_y.empty()) save_labels_tsv(ids, ds.y, a.out_y);
    if (!a.out_z.empty()) save_labels_tsv(ids, ds.z, a.out_z);
    results = {{"kind", "controlled"}, {"rows", ds.n()}, {"dim", ds.dim()},
               {"ratio", a.ratio}};
  } else if (a.kind == "biased") {
    nullguard::BiasedEmbeddingSpec spec;
    spec.n_words = a.n_words;
    spec.d = a.dim;
    spec.n_bias_directions = a.directions;
    spec.xor_scale = a.xor_scale;
    spec.seed = seed;
    const auto emb = nullguard::gen_biased_embeddings(spec);

    std::vector<std::string> vocab;
    vocab.reserve(static_cast<std::size_t>(emb.vectors.rows()));
    for (Index i = 0; i < emb.vectors.rows(); ++i)
      vocab.push_back("w" + std::to_string(i));
    if (!a.out_embeddings.empty()) {
      const auto table =
          nullguard::EmbeddingTable::create(vocab, emb.vectors);
      nullguard::io::save_embeddings(table, a.out_embeddings);
    }
    if (!a.out_bias_labels.empty())
      save_labels_tsv(vocab, emb.bias_labels, a.out_bias_labels);
    if (!a.out_directions.empty() && emb.planted_directions.rows() > 0)
      nullguard::io::save_matrix(emb.planted_directions, a.out_directions);

    // Binary dataset over the biased words, ready for the inlp subcommand.
    const Dataset ds = nullguard::biased_words_dataset(emb);
    const auto ids = make_row_ids(ds.n());
    if (!a.out_x.empty()) nullguard::io::save_matrix(ds.x, a.out_x);
    if (!a.out_z.empty()) save_labels_tsv(ids, ds.z, a.out_z);

    results = {{"kind", "biased"},
               {"words", emb.vectors.rows()},
               {"dim", emb.vectors.cols()},
               {"bias_directions", a.directions},
               {"biased_rows", ds.n()}};
  } else {
    throw InvalidInput("synth: --kind must be controlled or biased");
  }

  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  std::cout << "synth: wrote " << results.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// inlp

struct InlpArgs {
  std::string train_x, train_z, train_y, dev_x, dev_z, dev_y;
  double dev_fraction = 0.2;
  std::string classifier = "logistic";
  int max_iters = 35;
  double stop_margin = 0.01;
  Index min_rank = 1;
  double svd_tol = nullguard::kDefaultSvdTol;
  bool refined = false;
  SeedOpt seed;
  TrainOpts train;
  std::string out_proj, out_report;
};

int run_inlp_cmd(const InlpArgs& a, Manifest& man) {
  const std::uint64_t seed = a.seed.value();
  man.set_seed(seed);
  const auto kind = parse_classifier(a.classifier);

  Dataset train;
  train.x = load_matrix_input(a.train_x, man);
  man.add_input(a.train_z);
  const auto z_file = nullguard::io::load_label_file(a.train_z);
  check_rows(train.x, z_file.labels.size(), "inlp --train-z");

  std::vector<std::string> z_names;
  if (kind == nullguard::ClassifierKind::kRegressor) {
    train.z_values = nullguard::io::parse_continuous(z_file.labels);
  } else {
    const auto enc = nullguard::io::encode_labels(z_file.labels);
    train.z = enc.values;
    z_names = enc.names;
  }
  std::vector<std::string> y_names;
  if (!a.train_y.empty()) {
    const auto y = load_discrete_labels(a.train_y, man);
    check_rows(train.x, y.values.size(), "inlp --train-y");
    train.y = y.values;
    y_names = y.names;
  }

  Dataset dev;
  if (!a.dev_x.empty()) {
    if (a.dev_z.empty()) throw InvalidInput("inlp: --dev-x requires --dev-z");
    dev.x = load_matrix_input(a.dev_x, man);
    man.add_input(a.dev_z);
    const auto dev_file = nullguard::io::load_label_file(a.dev_z);
    check_rows(dev.x, dev_file.labels.size(), "inlp --dev-z");
    if (kind == nullguard::ClassifierKind::kRegressor)
      dev.z_values = nullguard::io::parse_continuous(dev_file.labels);
    else
      dev.z = encode_with(z_names, dev_file.labels, "inlp --dev-z");
    if (!a.dev_y.empty()) {
      if (a.train_y.empty())
        throw InvalidInput("inlp: --dev-y requires --train-y");
      man.add_input(a.dev_y);
      const auto y_file = nullguard::io::load_label_file(a.dev_y);
      check_rows(dev.x, y_file.labels.size(), "inlp --dev-y");
      dev.y = encode_with(y_names, y_file.labels, "inlp --dev-y");
    }
  } else {
    // Internal seeded split when no dev files are given.
    if (a.dev_fraction <= 0.0 || a.dev_fraction >= 1.0)
      throw InvalidInput("inlp: --dev-fraction must be in (0, 1)");
    auto eng = nullguard::rng::make_engine(nullguard::rng::mix(seed, 0xdefU));
    const auto order = nullguard::rng::permutation(
        static_cast<std::size_t>(train.x.rows()), eng);
    const Index n = train.x.rows();
    Index n_dev = std::max<Index>(
        1, static_cast<Index>(std::llround(a.dev_fraction * n)));
    if (n_dev >= n) n_dev = n - 1;

    Dataset new_train;
    new_train.x.resize(n - n_dev, train.x.cols());
    dev.x.resize(n_dev, train.x.cols());
    for (Index i = 0; i < n; ++i) {
      const auto src = static_cast<Index>(order[static_cast<std::size_t>(i)]);
      const bool to_dev = i >= n - n_dev;
      Dataset& dst = to_dev ? dev : new_train;
      const Index row = to_dev ? i - (n - n_dev) : i;
      dst.x.row(row) = train.x.row(src);
      if (!train.z.empty()) dst.z.push_back(train.z[static_cast<std::size_t>(src)]);
      if (!train.z_values.empty())
        dst.z_values.push_back(train.z_values[static_cast<std::size_t>(src)]);
      if (!train.y.empty()) dst.y.push_back(train.y[static_cast<std::size_t>(src)]);
    }
    train = std::move(new_train);
  }

  nullguard::InlpConfig cfg;
  cfg.max_iters = a.max_iters;
  cfg.classifier = kind;
  cfg.train_cfg = a.train.config(seed);
  cfg.stop_margin = a.stop_margin;
  cfg.min_rank = a.min_rank;
  cfg.svd_tol = a.svd_tol;
  cfg.refined = a.refined;
  cfg.seed = seed;

  const auto result = a.refined ? nullguard::run_inlp_refined(train, dev, cfg)
                                : nullguard::run_inlp(train, dev, cfg);

  if (!a.out_proj.empty()) nullguard::io::save_projection(result.p, a.out_proj);

  json results = inlp_results_json(result);
  if (!z_names.empty()) results["classes"] = z_names;
  if (!a.out_report.empty()) write_report(man, results, a.out_report);

  std::cout << "inlp: " << result.iterations_run << " iterations, majority "
            << result.majority << ", final rank " << result.p.rank << "/"
            << result.p.dim() << '\n';
  for (std::size_t i = 0; i < result.dev_accuracy_trace.size(); ++i)
    std::cout << "  iter " << i << ": dev accuracy "
              << result.dev_accuracy_trace[i] << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// probe

struct ProbeArgs {
  std::string x_path, z_path, proj_path;
  std::string kind = "linear";
  std::string classifier = "logistic";
  int hidden = 128;
  SeedOpt seed;
  TrainOpts train;
  std::string out_report;
};

int run_probe(const ProbeArgs& a, Manifest& man) {
  const std::uint64_t seed = a.seed.value();
  man.set_seed(seed);

  Matrix x = load_matrix_input(a.x_path, man);
  const auto z = load_discrete_labels(a.z_path, man);
  check_rows(x, z.values.size(), "probe");
  if (!a.proj_path.empty()) {
    man.add_input(a.proj_path);
    const auto p = nullguard::io::load_projection(a.proj_path);
    x = nullguard::apply_projection(p, x);
  }

  nullguard::ProbeResult res;
  if (a.kind == "linear") {
    auto cfg = a.train.config(seed);
    res = nullguard::probe_linear(x, z.values, cfg,
                                  parse_classifier(a.classifier));
  } else if (a.kind == "mlp") {
    nullguard::MlpProbeConfig cfg;  // its own defaults: 50 epochs, lr 0.01
    cfg.hidden = a.hidden;
    if (a.train.epochs_opt->count() > 0) cfg.epochs = a.train.epochs;
    if (a.train.lr_opt->count() > 0) cfg.learning_rate = a.train.lr;
    cfg.seed = seed;
    res = nullguard::probe_mlp(x, z.values, cfg);
  } else {
    throw InvalidInput("probe: --kind must be linear or mlp");
  }

  json results{{"kind", a.kind},
               {"accuracy", res.accuracy},
               {"majority", res.majority},
               {"classes", z.names}};
  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  std::cout << "probe(" << a.kind << "): accuracy " << res.accuracy
            << " vs majority " << res.majority << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// weat / simeval / cluster / neighbors

struct EmbeddingArgs {
  std::string path;
  std::optional<Index> limit;
  bool lowercase = false;
  std::string proj_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--embeddings", path, "embedding file (word v1 ... vd)")
        ->required();
    cmd->add_option("--limit", limit, "keep only the first N words");
    cmd->add_flag("--lowercase", lowercase, "lowercase words on load");
    cmd->add_option("--proj", proj_path,
                    "projection matrix applied to all vectors after loading");
  }

  nullguard::EmbeddingTable load(Manifest& man) const {
    man.add_input(path);
    auto table = nullguard::io::load_embeddings(path, limit, lowercase);
    if (!proj_path.empty()) {
      man.add_input(proj_path);
      const auto p = nullguard::io::load_projection(proj_path);
      table = nullguard::EmbeddingTable::create(
          table.vocabulary, nullguard::apply_projection(p, table.vectors));
    }
    return table;
  }
};

struct WeatArgs {
  EmbeddingArgs emb;
  std::string spec_path;
  SeedOpt seed;
  std::optional<int> n_permutations;
  std::string out_report;
};

int run_weat(const WeatArgs& a, Manifest& man) {
  const std::uint64_t seed = a.seed.value();
  man.set_seed(seed);
  const auto table = a.emb.load(man);
  man.add_input(a.spec_path);
  auto spec = nullguard::io::load_weat_spec(a.spec_path);
  if (a.n_permutations) spec.n_permutations = *a.n_permutations;

  const auto res = nullguard::weat(table, spec, seed);
  json results{{"statistic", res.statistic},
               {"effect_size", res.effect_size},
               {"p_value", res.p_value},
               {"exact", res.exact},
               {"permutations_evaluated", res.permutations_evaluated}};
  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  std::cout << "weat: statistic " << res.statistic << ", effect size "
            << res.effect_size << ", p " << res.p_value
            << (res.exact ? " (exact)" : " (sampled)") << '\n';
  return 0;
}

struct SimevalArgs {
  EmbeddingArgs emb;
  std::string pairs_path;
  std::string out_report;
};

int run_simeval(const SimevalArgs& a, Manifest& man) {
  const auto table = a.emb.load(man);
  man.add_input(a.pairs_path);
  const auto pairs = nullguard::io::load_similarity_pairs(a.pairs_path);
  const auto res = nullguard::similarity_eval(table, pairs);
  json results{{"spearman", res.spearman},
               {"pairs_used", res.pairs_used},
               {"pairs_total", res.pairs_total}};
  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  std::cout << "simeval: spearman " << res.spearman << " over "
            << res.pairs_used << "/" << res.pairs_total << " pairs\n";
  return 0;
}

struct ClusterArgs {
  std::string x_path, z_path, proj_path;
  int k = 2;
  int max_iters = 100;
  SeedOpt seed;
  std::string out_report;
};

int run_cluster(const ClusterArgs& a, Manifest& man) {
  const std::uint64_t seed = a.seed.value();
  man.set_seed(seed);
  Matrix x = load_matrix_input(a.x_path, man);
  if (!a.proj_path.empty()) {
    man.add_input(a.proj_path);
    x = nullguard::apply_projection(nullguard::io::load_projection(a.proj_path),
                                    x);
  }
  const auto res = nullguard::kmeans(x, a.k, seed, a.max_iters);

  json results{{"k", a.k},
               {"iterations", res.iterations},
               {"inertia", res.inertia_trace.back()}};
  if (!a.z_path.empty()) {
    const auto z = load_discrete_labels(a.z_path, man);
    check_rows(x, z.values.size(), "cluster");
    results["v_measure"] = nullguard::v_measure(z.values, res.assignments);
  }
  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  std::cout << "cluster: " << results.dump() << '\n';
  return 0;
}

struct NeighborsArgs {
  EmbeddingArgs emb;
  std::vector<std::string> words;
  std::size_t k = 10;
  std::string out_report;
};

int run_neighbors(const NeighborsArgs& a, Manifest& man) {
  const auto table = a.emb.load(man);
  json results = json::object();
  for (const auto& word : a.words) {
    const auto nn = nullguard::nearest_neighbors(table, word, a.k);
    json list = json::array();
    for (const auto& [w, cos] : nn) list.push_back({{"word", w}, {"cosine", cos}});
    results[word] = list;
    std::cout << word << ":";
    for (const auto& [w, cos] : nn) std::cout << ' ' << w;
    std::cout << '\n';
  }
  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  return 0;
}

// ---------------------------------------------------------------------------
// fairness

struct FairnessArgs {
  std::string features, y_path, z_path;
  std::string split = "65:10:25";
  std::string split_file;
  std::string classifier = "logistic";
  int max_iters = 35;
  double stop_margin = 0.01;
  bool refined = false;
  SeedOpt seed;
  TrainOpts train;
  std::string out_report, out_proj;
};

json gaps_json(const nullguard::TprGaps& gaps,
               const std::vector<std::string>& class_names) {
  json per_class = json::object();
  for (const auto& [cls, gap] : gaps.per_class)
    per_class[class_names[static_cast<std::size_t>(cls)]] = gap;
  json undefined = json::array();
  for (int cls : gaps.undefined_classes)
    undefined.push_back(class_names[static_cast<std::size_t>(cls)]);
  return json{{"per_class", per_class}, {"undefined_classes", undefined}};
}

int run_fairness(const FairnessArgs& a, Manifest& man) {
  const std::uint64_t seed = a.seed.value();
  man.set_seed(seed);

  const Matrix features = load_matrix_input(a.features, man);
  const auto y = load_discrete_labels(a.y_path, man);
  const auto z = load_discrete_labels(a.z_path, man);
  check_rows(features, y.values.size(), "fairness --y");
  check_rows(features, z.values.size(), "fairness --z");
  if (z.names.size() != 2)
    throw InvalidInput("fairness: protected attribute must be binary, got " +
                       std::to_string(z.names.size()) + " classes");

  nullguard::SplitIndices split;
  if (!a.split_file.empty()) {
    man.add_input(a.split_file);
    const auto sf = nullguard::io::load_split(a.split_file, y.ids);
    split.train = sf.train;
    split.dev = sf.dev;
    split.test = sf.test;
  } else {
    double tr = 0, dv = 0, te = 0;
    if (std::sscanf(a.split.c_str(), "%lf:%lf:%lf", &tr, &dv, &te) != 3)
      throw InvalidInput("fairness: --split must look like 65:10:25");
    split = nullguard::make_split(features.rows(), tr, dv, te,
                                  nullguard::rng::mix(seed, 0x5717U));
  }

  nullguard::InlpConfig cfg;
  cfg.max_iters = a.max_iters;
  cfg.classifier = parse_classifier(a.classifier);
  cfg.train_cfg = a.train.config(seed);
  // Guard classifiers in the pipeline train with intercepts: the constant
  // within-class offset must not masquerade as a protected direction.
  cfg.train_cfg.fit_intercept = true;
  cfg.stop_margin = a.stop_margin;
  cfg.refined = a.refined;
  cfg.seed = seed;

  nullguard::TrainConfig main_cfg = a.train.config(seed);
  main_cfg.fit_intercept = true;  // standalone task head

  const auto out =
      nullguard::fair_pipeline(features, y.values, z.values, split, cfg, main_cfg);

  if (!a.out_proj.empty())
    nullguard::io::save_projection(out.inlp.p, a.out_proj);

  const auto& r = out.report;
  json results{{"accuracy_before", r.accuracy_before},
               {"accuracy_after", r.accuracy_after},
               {"rms_gap_before", r.rms_gap_before},
               {"rms_gap_after", r.rms_gap_after},
               {"gaps_before", gaps_json(r.gaps_before, y.names)},
               {"gaps_after", gaps_json(r.gaps_after, y.names)},
               {"projection_rank", r.projection_rank},
               {"inlp", inlp_results_json(out.inlp)},
               {"protected_groups", z.names}};
  if (r.gap_proportion_correlation_before)
    results["gap_proportion_correlation_before"] =
        *r.gap_proportion_correlation_before;
  if (r.gap_proportion_correlation_after)
    results["gap_proportion_correlation_after"] =
        *r.gap_proportion_correlation_after;

  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  std::cout << "fairness: accuracy " << r.accuracy_before << " -> "
            << r.accuracy_after << ", rms gap " << r.rms_gap_before << " -> "
            << r.rms_gap_after << " (" << r.inlp_iterations
            << " INLP iterations)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// export2d

struct Export2dArgs {
  std::string x_path, proj_path, labels_path;
  std::string out_csv;
  std::string out_report;
};

int run_export2d(const Export2dArgs& a, Manifest& man) {
  Matrix x = load_matrix_input(a.x_path, man);
  if (!a.proj_path.empty()) {
    man.add_input(a.proj_path);
    x = nullguard::apply_projection(nullguard::io::load_projection(a.proj_path),
                                    x);
  }
  std::vector<std::string> labels;
  if (!a.labels_path.empty()) {
    man.add_input(a.labels_path);
    labels = nullguard::io::load_label_file(a.labels_path).labels;
    check_rows(x, labels.size(), "export2d");
  }

  const Matrix coords = nullguard::pca_2d(x);
  std::ofstream out(a.out_csv);
  if (!out) throw InvalidInput("cannot write: " + a.out_csv);
  out << (labels.empty() ? "pc1,pc2\n" : "pc1,pc2,label\n");
  char buf[64];
  for (Index i = 0; i < coords.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g", coords(i, 0), coords(i, 1));
    out << buf;
    if (!labels.empty()) out << ',' << labels[static_cast<std::size_t>(i)];
    out << '\n';
  }

  json results{{"rows", coords.rows()}, {"csv", a.out_csv}};
  if (!a.out_report.empty()) write_report(man, results, a.out_report);
  std::cout << "export2d: wrote " << coords.rows() << " points to "
            << a.out_csv << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// repro-glove: the end-to-end embedding-debiasing experiment over a
// user-supplied embedding file.

struct ReproArgs {
  std::string embeddings;
  Index limit = 150000;
  Index n_biased = 7500;
  double neutral_threshold = 0.03;
  int iters = 35;
  bool no_normalize = false;
  SeedOpt seed;
  std::vector<std::string> weat_specs;
  std::vector<std::string> sim_files;
  std::string out_report, out_proj, out_embeddings;
};

int run_repro_glove(const ReproArgs& a, Manifest& man) {
  const std::uint64_t seed = a.seed.value();
  man.set_seed(seed);

  man.add_input(a.embeddings);
  auto table = nullguard::io::load_embeddings(a.embeddings, a.limit, true);
  if (!a.no_normalize) {
    Matrix normed = table.vectors;
    for (Index i = 0; i < normed.rows(); ++i) {
      const double n = normed.row(i).norm();
      if (n > 0.0) normed.row(i) /= n;
    }
    table = nullguard::EmbeddingTable::create(table.vocabulary, normed);
  }

  if (!table.find("he") || !table.find("she"))
    throw InvalidInput("repro-glove: vocabulary must contain 'he' and 'she'");
  const Vector direction = (table.vectors.row(table.at("he")) -
                            table.vectors.row(table.at("she")))
                               .transpose();

  // Rank by projection on the gender direction; take the extremes and the
  // most-neutral words as the 3-class dataset.
  const auto buckets = nullguard::bias_by_projection(
      table, direction, static_cast<std::size_t>(table.size()),
      a.neutral_threshold);
  const auto take_n = static_cast<std::size_t>(a.n_biased);
  if (buckets.positive.size() < take_n || buckets.negative.size() < take_n ||
      buckets.neutral.size() < take_n)
    throw InvalidInput("repro-glove: not enough words per class (have " +
                       std::to_string(buckets.positive.size()) + "/" +
                       std::to_string(buckets.negative.size()) + "/" +
                       std::to_string(buckets.neutral.size()) + ", need " +
                       std::to_string(take_n) + " each)");

  std::vector<Index> rows;
  std::vector<int> labels;  // 0 neutral, 1 male-side, 2 female-side
  auto add_bucket = [&](const auto& bucket, int label) {
    for (std::size_t i = 0; i < take_n; ++i) {
      rows.push_back(table.at(bucket[i].first));
      labels.push_back(label);
    }
  };
  add_bucket(buckets.positive, 1);
  add_bucket(buckets.negative, 2);
  add_bucket(buckets.neutral, 0);

  Matrix x(static_cast<Index>(rows.size()), table.dim());
  for (std::size_t i = 0; i < rows.size(); ++i)
    x.row(static_cast<Index>(i)) = table.vectors.row(rows[i]);

  // 30% test; the remainder split 70/30 into train/dev.
  auto eng = nullguard::rng::make_engine(nullguard::rng::mix(seed, 0x91047eU));
  const auto order = nullguard::rng::permutation(rows.size(), eng);
  const auto n_total = static_cast<Index>(rows.size());
  const Index n_test = n_total * 3 / 10;
  const Index n_train = (n_total - n_test) * 7 / 10;

  Dataset train, dev;
  Matrix x_test(n_test, table.dim());
  std::vector<int> z_test;
  {
    Index it = 0, id = 0, ite = 0;
    train.x.resize(n_train, table.dim());
    dev.x.resize(n_total - n_test - n_train, table.dim());
    for (Index i = 0; i < n_total; ++i) {
      const auto src = static_cast<Index>(order[static_cast<std::size_t>(i)]);
      if (i < n_test) {
        x_test.row(ite++) = x.row(src);
        z_test.push_back(labels[static_cast<std::size_t>(src)]);
      } else if (i < n_test + n_train) {
        train.x.row(it++) = x.row(src);
        train.z.push_back(labels[static_cast<std::size_t>(src)]);
      } else {
        dev.x.row(id++) = x.row(src);
        dev.z.push_back(labels[static_cast<std::size_t>(src)]);
      }
    }
  }

  nullguard::TrainConfig probe_cfg;
  probe_cfg.seed = seed;

  json results;
  results["classes"] = {"male_biased", "female_biased", "neutral"};
  {
    const auto model = nullguard::fit_svm(train.x, train.z, probe_cfg);
    results["probe_accuracy_before"] =
        nullguard::accuracy(model, x_test, z_test);
  }

  nullguard::InlpConfig cfg;
  cfg.max_iters = a.iters;
  cfg.classifier = nullguard::ClassifierKind::kSvm;
  cfg.train_cfg = probe_cfg;
  cfg.stop_margin = 0.01;
  cfg.seed = seed;
  const auto result = nullguard::run_inlp(train, dev, cfg);
  results["inlp"] = inlp_results_json(result);
  if (!a.out_proj.empty()) nullguard::io::save_projection(result.p, a.out_proj);

  const Matrix g_train = nullguard::guard(result, train.x);
  const Matrix g_test = nullguard::guard(result, x_test);
  {
    const auto model = nullguard::fit_svm(g_train, train.z, probe_cfg);
    results["probe_accuracy_after"] =
        nullguard::accuracy(model, g_test, z_test);
  }
  {
    nullguard::MlpProbeConfig mlp_cfg;
    mlp_cfg.seed = seed;
    Matrix g_all = nullguard::guard(result, x);
    results["mlp_probe_accuracy_after"] =
        nullguard::probe_mlp(g_all, labels, mlp_cfg).accuracy;
  }

  // Clustering overlap over the gendered halves (neutral words excluded).
  {
    const Index n_gendered = 2 * static_cast<Index>(take_n);
    const Matrix gendered = x.topRows(n_gendered);
    const std::vector<int> gender_labels(labels.begin(),
                                         labels.begin() + n_gendered);
    const auto before = nullguard::kmeans(gendered, 2, seed);
    results["v_measure_before"] =
        nullguard::v_measure(gender_labels, before.assignments);
    const auto after =
        nullguard::kmeans(nullguard::guard(result, gendered), 2, seed);
    results["v_measure_after"] =
        nullguard::v_measure(gender_labels, after.assignments);
  }

  const auto guarded_table = nullguard::EmbeddingTable::create(
      table.vocabulary, nullguard::guard(result, table.vectors));

  json weat_results = json::array();
  for (const auto& spec_path : a.weat_specs) {
    man.add_input(spec_path);
    const auto spec = nullguard::io::load_weat_spec(spec_path);
    const auto before = nullguard::weat(table, spec, seed);
    const auto after = nullguard::weat(guarded_table, spec, seed);
    weat_results.push_back({{"spec", spec_path},
                            {"p_before", before.p_value},
                            {"p_after", after.p_value},
                            {"effect_before", before.effect_size},
                            {"effect_after", after.effect_size}});
  }
  results["weat"] = weat_results;

  json sim_results = json::array();
  for (const auto& sim_path : a.sim_files) {
    man.add_input(sim_path);
    const auto pairs = nullguard::io::load_similarity_pairs(sim_path);
    const auto before = nullguard::similarity_eval(table, pairs);
    const auto after = nullguard::similarity_eval(guarded_table, pairs);
    sim_results.push_back({{"pairs", sim_path},
                           {"spearman_before", before.spearman},
                           {"spearman_after", after.spearman},
                           {"pairs_used", before.pairs_used}});
  }
  results["similarity"] = sim_results;

  if (!a.out_embeddings.empty())
    nullguard::io::save_embeddings(guarded_table, a.out_embeddings);
  if (!a.out_report.empty()) write_report(man, results, a.out_report);

  std::cout << "repro-glove: probe " << results["probe_accuracy_before"]
            << " -> " << results["probe_accuracy_after"] << ", v-measure "
            << results["v_measure_before"] << " -> "
            << results["v_measure_after"] << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nullguard: removal of linearly decodable attributes from "
               "vector representations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic datasets");
  synth_cmd->add_option("--kind", synth.kind, "controlled | biased");
  synth_cmd->add_option("--n-per-class", synth.n_per_class);
  synth_cmd->add_option("--dim", synth.dim);
  synth_cmd->add_option("--ratio", synth.ratio);
  synth_cmd->add_option("--noise-sigma", synth.noise_sigma);
  synth_cmd->add_option("--n-words", synth.n_words);
  synth_cmd->add_option("--directions", synth.directions);
  synth_cmd->add_option("--xor-scale", synth.xor_scale);
  synth_cmd->add_option("--out-x", synth.out_x);
  synth_cmd->add_option("--out-y", synth.out_y);
  synth_cmd->add_option("--out-z", synth.out_z);
  synth_cmd->add_option("--out-embeddings", synth.out_embeddings);
  synth_cmd->add_option("--out-bias-labels", synth.out_bias_labels);
  synth_cmd->add_option("--out-directions", synth.out_directions);
  synth_cmd->add_option("--out-report", synth.out_report);
  synth.seed.attach(synth_cmd);

  InlpArgs inlp;
  auto* inlp_cmd =
      app.add_subcommand("inlp", "iterative nullspace projection");
  inlp_cmd->add_option("--train-x", inlp.train_x)->required();
  inlp_cmd->add_option("--train-z", inlp.train_z)->required();
  inlp_cmd->add_option("--train-y", inlp.train_y);
  inlp_cmd->add_option("--dev-x", inlp.dev_x);
  inlp_cmd->add_option("--dev-z", inlp.dev_z);
  inlp_cmd->add_option("--dev-y", inlp.dev_y);
  inlp_cmd->add_option("--dev-fraction", inlp.dev_fraction,
                       "internal dev split when --dev-x is not given");
  inlp_cmd->add_option("--classifier", inlp.classifier,
                       "logistic | svm | regressor");
  inlp_cmd->add_option("--max-iters", inlp.max_iters);
  inlp_cmd->add_option("--stop-margin", inlp.stop_margin);
  inlp_cmd->add_option("--min-rank", inlp.min_rank);
  inlp_cmd->add_option("--svd-tol", inlp.svd_tol,
                       "relative singular-value cutoff");
  inlp_cmd->add_flag("--refined", inlp.refined,
                     "fit each iteration on one drawn main-task class");
  inlp_cmd->add_option("--out-proj", inlp.out_proj);
  inlp_cmd->add_option("--out-report", inlp.out_report);
  inlp.seed.attach(inlp_cmd);
  inlp.train.attach(inlp_cmd);

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "train a fresh probe");
  probe_cmd->add_option("--x", probe.x_path)->required();
  probe_cmd->add_option("--z", probe.z_path)->required();
  probe_cmd->add_option("--proj", probe.proj_path,
                        "apply this projection before probing");
  probe_cmd->add_option("--kind", probe.kind, "linear | mlp");
  probe_cmd->add_option("--classifier", probe.classifier, "logistic | svm");
  probe_cmd->add_option("--hidden", probe.hidden, "MLP hidden width");
  probe_cmd->add_option("--out-report", probe.out_report);
  probe.seed.attach(probe_cmd);
  probe.train.attach(probe_cmd);

  WeatArgs weat_args;
  auto* weat_cmd =
      app.add_subcommand("weat", "word embedding association test");
  weat_args.emb.attach(weat_cmd);
  weat_cmd->add_option("--spec", weat_args.spec_path)->required();
  weat_cmd->add_option("--n-permutations", weat_args.n_permutations);
  weat_cmd->add_option("--out-report", weat_args.out_report);
  weat_args.seed.attach(weat_cmd);

  SimevalArgs simeval;
  auto* simeval_cmd =
      app.add_subcommand("simeval", "similarity benchmark correlation");
  simeval.emb.attach(simeval_cmd);
  simeval_cmd->add_option("--pairs", simeval.pairs_path)->required();
  simeval_cmd->add_option("--out-report", simeval.out_report);

  ClusterArgs cluster;
  auto* cluster_cmd =
      app.add_subcommand("cluster", "k-means and V-measure overlap");
  cluster_cmd->add_option("--x", cluster.x_path)->required();
  cluster_cmd->add_option("--z", cluster.z_path,
                          "labels for the V-measure overlap");
  cluster_cmd->add_option("--proj", cluster.proj_path);
  cluster_cmd->add_option("--k", cluster.k);
  cluster_cmd->add_option("--max-iters", cluster.max_iters);
  cluster_cmd->add_option("--out-report", cluster.out_report);
  cluster.seed.attach(cluster_cmd);

  NeighborsArgs neighbors;
  auto* neighbors_cmd =
      app.add_subcommand("neighbors", "cosine nearest neighbors");
  neighbors.emb.attach(neighbors_cmd);
  neighbors_cmd->add_option("--word", neighbors.words)->required();
  neighbors_cmd->add_option("--k", neighbors.k);
  neighbors_cmd->add_option("--out-report", neighbors.out_report);

  FairnessArgs fairness;
  auto* fairness_cmd =
      app.add_subcommand("fairness", "guarded fair-classification pipeline");
  fairness_cmd->add_option("--features", fairness.features)->required();
  fairness_cmd->add_option("--y", fairness.y_path)->required();
  fairness_cmd->add_option("--z", fairness.z_path)->required();
  fairness_cmd->add_option("--split", fairness.split, "train:dev:test");
  fairness_cmd->add_option("--split-file", fairness.split_file,
                           "TSV id\\tpartition file");
  fairness_cmd->add_option("--classifier", fairness.classifier);
  fairness_cmd->add_option("--max-iters", fairness.max_iters);
  fairness_cmd->add_option("--stop-margin", fairness.stop_margin);
  fairness_cmd->add_flag("--refined", fairness.refined);
  fairness_cmd->add_option("--out-report", fairness.out_report);
  fairness_cmd->add_option("--out-proj", fairness.out_proj);
  fairness.seed.attach(fairness_cmd);
  fairness.train.attach(fairness_cmd);

  Export2dArgs export2d;
  auto* export2d_cmd = app.add_subcommand(
      "export2d", "PCA coordinates for external plotting");
  export2d_cmd->add_option("--x", export2d.x_path)->required();
  export2d_cmd->add_option("--proj", export2d.proj_path);
  export2d_cmd->add_option("--labels", export2d.labels_path);
  export2d_cmd->add_option("--out", export2d.out_csv)->required();
  export2d_cmd->add_option("--out-report", export2d.out_report);

  ReproArgs repro;
  auto* repro_cmd = app.add_subcommand(
      "repro-glove", "end-to-end embedding debiasing experiment");
  repro_cmd->add_option("--embeddings", repro.embeddings)->required();
  repro_cmd->add_option("--limit", repro.limit);
  repro_cmd->add_option("--n-biased", repro.n_biased);
  repro_cmd->add_option("--neutral-threshold", repro.neutral_threshold);
  repro_cmd->add_option("--iters", repro.iters);
  repro_cmd->add_flag("--no-normalize", repro.no_normalize,
                      "skip unit-normalizing the loaded vectors");
  repro_cmd->add_option("--weat-spec", repro.weat_specs)->expected(-1);
  repro_cmd->add_option("--similarity-pairs", repro.sim_files)->expected(-1);
  repro_cmd->add_option("--out-report", repro.out_report);
  repro_cmd->add_option("--out-proj", repro.out_proj);
  repro_cmd->add_option("--out-embeddings", repro.out_embeddings);
  repro.seed.attach(repro_cmd);

  for (auto* cmd : app.get_subcommands({})) attach_format(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) {
      Manifest man("synth", argc, argv);
      return run_synth(synth, man);
    }
    if (inlp_cmd->parsed()) {
      Manifest man("inlp", argc, argv);
      return run_inlp_cmd(inlp, man);
    }
    if (probe_cmd->parsed()) {
      Manifest man("probe", argc, argv);
      return run_probe(probe, man);
    }
    if (weat_cmd->parsed()) {
      Manifest man("weat", argc, argv);
      return run_weat(weat_args, man);
    }
    if (simeval_cmd->parsed()) {
      Manifest man("simeval", argc, argv);
      return run_simeval(simeval, man);
    }
    if (cluster_cmd->parsed()) {
      Manifest man("cluster", argc, argv);
      return run_cluster(cluster, man);
    }
    if (neighbors_cmd->parsed()) {
      Manifest man("neighbors", argc, argv);
      return run_neighbors(neighbors, man);
    }
    if (fairness_cmd->parsed()) {
      Manifest man("fairness", argc, argv);
      return run_fairness(fairness, man);
    }
    if (export2d_cmd->parsed()) {
      Manifest man("export2d", argc, argv);
      return run_export2d(export2d, man);
    }
    if (repro_cmd->parsed()) {
      Manifest man("repro-glove", argc, argv);
      return run_repro_glove(repro, man);
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nullguard::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
