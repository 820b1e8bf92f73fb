#include "nullguard/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace nullguard::io {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write file: " + path);
  return out;
}

double parse_double(const std::string& token, const std::string& context) {
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw InvalidInput(context + ": not a number: '" + token + "'");
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string lowercased(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Matrix load_matrix(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw InvalidInput(path + ": empty file");
  const auto header = split_ws(line);
  if (header.size() != 2)
    throw InvalidInput(path + ": malformed header (expected '<rows> <cols>')");
  const auto rows = static_cast<Index>(parse_double(header[0], path));
  const auto cols = static_cast<Index>(parse_double(header[1], path));
  if (rows <= 0 || cols <= 0)
    throw InvalidInput(path + ": dimensions must be positive");

  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw InvalidInput(path + ": expected " + std::to_string(rows) +
                         " rows, file ends at row " + std::to_string(r));
    const auto tokens = split_ws(line);
    if (static_cast<Index>(tokens.size()) != cols)
      throw InvalidInput(path + ": row " + std::to_string(r + 1) + " has " +
                         std::to_string(tokens.size()) + " values, expected " +
                         std::to_string(cols));
    for (Index c = 0; c < cols; ++c)
      m(r, c) = parse_double(tokens[static_cast<std::size_t>(c)],
                             path + " row " + std::to_string(r + 1));
  }
  require_finite(m, path);
  return m;
}

void save_matrix(const Matrix& m, const std::string& path) {
  require(m.rows() > 0 && m.cols() > 0, "save_matrix: empty matrix");
  require_finite(m, "save_matrix");
  auto out = open_output(path);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_value(m(r, c));
    }
    out << '\n';
  }
}

EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<Index> limit, bool lowercase) {
  auto in = open_input(path);
  std::vector<std::string> vocab;
  std::vector<std::vector<double>> rows;
  std::unordered_set<std::string> seen;
  Index dim = -1;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (limit && static_cast<Index>(vocab.size()) >= *limit) break;
    const auto tokens = split_ws(line);
    if (tokens.size() < 2)
      throw InvalidInput(path + ": line " + std::to_string(line_no) +
                         ": expected 'word v1 ... vd'");
    const Index d = static_cast<Index>(tokens.size()) - 1;
    if (dim < 0) dim = d;
    if (d != dim)
      throw InvalidInput(path + ": line " + std::to_string(line_no) +
                         ": has " + std::to_string(d) +
                         " values, expected " + std::to_string(dim));
    std::string word = lowercase ? lowercased(tokens[0]) : tokens[0];
    if (!seen.insert(word).second) continue;  // first occurrence wins
    std::vector<double> values(static_cast<std::size_t>(d));
    for (Index c = 0; c < d; ++c)
      values[static_cast<std::size_t>(c)] =
          parse_double(tokens[static_cast<std::size_t>(c) + 1],
                       path + " line " + std::to_string(line_no));
    vocab.push_back(std::move(word));
    rows.push_back(std::move(values));
  }
  if (vocab.empty()) throw InvalidInput(path + ": no embedding rows");

  Matrix vectors(static_cast<Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Index c = 0; c < dim; ++c)
      vectors(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  return EmbeddingTable::create(std::move(vocab), std::move(vectors));
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  auto out = open_output(path);
  for (Index r = 0; r < table.size(); ++r) {
    out << table.vocabulary[static_cast<std::size_t>(r)];
    for (Index c = 0; c < table.dim(); ++c)
      out << ' ' << format_value(table.vectors(r, c));
    out << '\n';
  }
}

ProjectionMatrix load_projection(const std::string& path) {
  ProjectionMatrix p;
  p.p = load_matrix(path);
  if (p.p.rows() != p.p.cols())
    throw InvalidInput(path + ": projection matrix must be square");
  p.kind = ProjectionKind::kNullspace;
  validate_projection(p, 1e-6);
  p.rank = effective_rank(p.p, 0.5);  // eigenvalues are 0 or 1
  return p;
}

void save_projection(const ProjectionMatrix& p, const std::string& path) {
  save_matrix(p.p, path);
}

LabelFile load_label_file(const std::string& path) {
  auto in = open_input(path);
  LabelFile f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw InvalidInput(path + ": line " + std::to_string(line_no) +
                         ": expected '<id>\\t<label>'");
    f.ids.push_back(line.substr(0, tab));
    f.labels.push_back(line.substr(tab + 1));
  }
  if (f.ids.empty()) throw InvalidInput(path + ": no labels");
  return f;
}

void save_label_file(const LabelFile& f, const std::string& path) {
  require(f.ids.size() == f.labels.size(),
          "save_label_file: ids/labels mismatch");
  auto out = open_output(path);
  for (std::size_t i = 0; i < f.ids.size(); ++i)
    out << f.ids[i] << '\t' << f.labels[i] << '\n';
}

LabelEncoding encode_labels(const std::vector<std::string>& labels) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  LabelEncoding enc;
  enc.names.assign(distinct.begin(), distinct.end());
  std::unordered_map<std::string, int> to_id;
  for (std::size_t i = 0; i < enc.names.size(); ++i)
    to_id[enc.names[i]] = static_cast<int>(i);
  enc.values.reserve(labels.size());
  for (const auto& s : labels) enc.values.push_back(to_id[s]);
  return enc;
}

std::vector<double> parse_continuous(const std::vector<std::string>& labels) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& s : labels)
    out.push_back(parse_double(s, "continuous label"));
  return out;
}

SplitFile load_split(const std::string& path,
                     const std::vector<std::string>& ids) {
  std::unordered_map<std::string, Index> id_to_row;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!id_to_row.emplace(ids[i], static_cast<Index>(i)).second)
      throw InvalidInput("load_split: duplicate dataset id '" + ids[i] + "'");
  }

  auto in = open_input(path);
  SplitFile split;
  std::unordered_set<std::string> assigned;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw InvalidInput(path + ": line " + std::to_string(line_no) +
                         ": expected '<id>\\t<partition>'");
    const std::string id = line.substr(0, tab);
    const std::string part = line.substr(tab + 1);
    const auto it = id_to_row.find(id);
    if (it == id_to_row.end())
      throw InvalidInput(path + ": unknown id '" + id + "'");
    if (!assigned.insert(id).second)
      throw InvalidInput(path + ": id '" + id +
                         "' assigned to more than one partition");
    if (part == "train")
      split.train.push_back(it->second);
    else if (part == "dev")
      split.dev.push_back(it->second);
    else if (part == "test")
      split.test.push_back(it->second);
    else
      throw InvalidInput(path + ": line " + std::to_string(line_no) +
                         ": partition must be train, dev or test");
  }
  if (assigned.size() != ids.size())
    throw InvalidInput(path + ": split does not cover all " +
                       std::to_string(ids.size()) + " ids (" +
                       std::to_string(assigned.size()) + " assigned)");
  return split;
}

WeatSpec load_weat_spec(const std::string& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": invalid JSON: " + e.what());
  }
  WeatSpec spec;
  try {
    spec.targets_x = j.at("targets_x").get<std::vector<std::string>>();
    spec.targets_y = j.at("targets_y").get<std::vector<std::string>>();
    spec.attributes_a = j.at("attributes_a").get<std::vector<std::string>>();
    spec.attributes_b = j.at("attributes_b").get<std::vector<std::string>>();
    spec.n_permutations = j.value("n_permutations", 10000);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": bad WEAT spec: " + e.what());
  }
  return spec;
}

std::vector<SimilarityPair> load_similarity_pairs(const std::string& path) {
  auto in = open_input(path);
  std::vector<SimilarityPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3)
      throw InvalidInput(path + ": line " + std::to_string(line_no) +
                         ": expected 'word1\\tword2\\tscore'");
    pairs.push_back({fields[0], fields[1],
                     parse_double(fields[2],
                                  path + " line " + std::to_string(line_no))});
  }
  if (pairs.empty()) throw InvalidInput(path + ": no similarity pairs");
  return pairs;
}

}  // namespace nullguard::io
