#include <agedict/dataset.hpp>

#include <agedict/pgm.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace agedict {

namespace {

std::string trimmed(const std::string& line) {
  std::string s = line;
  const auto hash = s.find('#');
  if (hash != std::string::npos) s.erase(hash);
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

long parse_long(const std::string& token, const std::string& what) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0') throw Error("manifest: malformed " + what);
  return v;
}

void append_sample(Matrix& dest, std::vector<std::string>& names, Index column,
                   const std::filesystem::path& path, Index sample_dim) {
  const SampleImage sample = read_sample(path);
  if (sample.values.size() != sample_dim) {
    throw Error("shape mismatch: " + path.string() + " has " +
                std::to_string(sample.values.size()) + " values, expected " +
                std::to_string(sample_dim));
  }
  dest.col(column) = sample.values;
  names.push_back(path.string());
}

}  // namespace

DatasetBundle load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error("missing manifest: " + manifest_path.string());
  const std::filesystem::path base = manifest_path.parent_path();

  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = trimmed(raw);
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) throw Error("manifest: empty file");

  std::istringstream header(lines[0]);
  std::string f_token, g_token, extra;
  if (!(header >> f_token >> g_token) || (header >> extra))
    throw Error("manifest: header must be '<sample_dim> <group_count>'");
  DatasetBundle bundle;
  bundle.dims.sample_dim = parse_long(f_token, "sample dimension");
  bundle.dims.group_count = parse_long(g_token, "group count");
  if (bundle.dims.sample_dim < 1) throw Error("manifest: sample dimension must be positive");
  if (bundle.dims.group_count < 2) throw Error("manifest: need at least two groups");

  const Index bridge_count = bundle.dims.group_count - 1;
  struct RawBridge {
    std::vector<std::filesystem::path> x, y;
  };
  std::vector<RawBridge> raw_bridges;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.rfind("bridge", 0) == 0) {
      const long g = parse_long(trimmed(line.substr(6)), "bridge index");
      if (g != static_cast<long>(raw_bridges.size()) + 1)
        throw Error("manifest: bridges must appear in ascending order starting at 1");
      if (g > bridge_count) throw Error("manifest: bridge index exceeds group count");
      raw_bridges.emplace_back();
    } else if (line.size() > 2 && (line[0] == 'x' || line[0] == 'y') &&
               (line[1] == ' ' || line[1] == '\t')) {
      if (raw_bridges.empty()) throw Error("manifest: sample line before any bridge");
      const std::string rel = trimmed(line.substr(2));
      std::filesystem::path p(rel);
      if (p.is_relative()) p = base / p;
      (line[0] == 'x' ? raw_bridges.back().x : raw_bridges.back().y).push_back(p);
    } else {
      throw Error("manifest: unrecognized line '" + line + "'");
    }
  }

  if (static_cast<Index>(raw_bridges.size()) != bridge_count)
    throw Error("manifest: bridge " + std::to_string(raw_bridges.size() + 1) + " has no pairs");

  for (Index b = 0; b < bridge_count; ++b) {
    const RawBridge& rb = raw_bridges[static_cast<std::size_t>(b)];
    if (rb.x.size() != rb.y.size()) {
      throw Error("pair count mismatch (bridge " + std::to_string(b + 1) + "): " +
                  std::to_string(rb.x.size()) + " x vs " + std::to_string(rb.y.size()) + " y");
    }
    if (rb.x.empty()) throw Error("manifest: bridge " + std::to_string(b + 1) + " has no pairs");

    FacePairSet pairs;
    pairs.bridge = static_cast<int>(b);
    const Index n = static_cast<Index>(rb.x.size());
    pairs.x.resize(bundle.dims.sample_dim, n);
    pairs.y.resize(bundle.dims.sample_dim, n);
    for (Index i = 0; i < n; ++i) {
      append_sample(pairs.x, pairs.x_files, i, rb.x[static_cast<std::size_t>(i)],
                    bundle.dims.sample_dim);
      append_sample(pairs.y, pairs.y_files, i, rb.y[static_cast<std::size_t>(i)],
                    bundle.dims.sample_dim);
    }
    bundle.dims.pairs_per_bridge.push_back(n);
    bundle.bridges.push_back(std::move(pairs));
  }

  for (Index g = 0; g < bundle.dims.group_count; ++g) {
    bundle.dims.group_labels.push_back("group " + std::to_string(g + 1));
  }

  normalize(bundle);
  return bundle;
}

void normalize(DatasetBundle& bundle) {
  if (bundle.bridges.empty()) throw Error("normalize: empty bundle");
  double max_value = 0.0;
  for (const FacePairSet& pairs : bundle.bridges) {
    for (const Matrix* mat : {&pairs.x, &pairs.y}) {
      if (!mat->allFinite()) throw Error("normalize: non-finite sample value");
      if (mat->size() > 0 && mat->minCoeff() < 0.0)
        throw Error("normalize: negative sample value");
      max_value = std::max(max_value, mat->size() > 0 ? mat->maxCoeff() : 0.0);
    }
  }
  if (max_value <= 1.0) return;  // already normalized
  double scale;
  if (max_value <= 255.0) {
    scale = 255.0;
  } else if (max_value <= 65535.0) {
    scale = 65535.0;
  } else {
    throw Error("normalize: values exceed supported bit depths");
  }
  for (FacePairSet& pairs : bundle.bridges) {
    pairs.x /= scale;
    pairs.y /= scale;
  }
}

Index group_sample_count(const DatasetBundle& bundle, Index group) {
  const Index G = bundle.dims.group_count;
  if (group < 0 || group >= G) throw Error("group index out of range");
  Index count = 0;
  if (group < G - 1) count += bundle.bridges[static_cast<std::size_t>(group)].x.cols();
  if (group > 0) count += bundle.bridges[static_cast<std::size_t>(group - 1)].y.cols();
  return count;
}

Matrix group_columns(const DatasetBundle& bundle, Index group) {
  const Index G = bundle.dims.group_count;
  const Index total = group_sample_count(bundle, group);
  Matrix out(bundle.dims.sample_dim, total);
  Index at = 0;
  if (group < G - 1) {
    const Matrix& x = bundle.bridges[static_cast<std::size_t>(group)].x;
    out.middleCols(at, x.cols()) = x;
    at += x.cols();
  }
  if (group > 0) {
    const Matrix& y = bundle.bridges[static_cast<std::size_t>(group - 1)].y;
    out.middleCols(at, y.cols()) = y;
  }
  return out;
}

std::vector<Vector> compute_average_faces(const DatasetBundle& bundle) {
  std::vector<Vector> averages;
  for (Index g = 0; g < bundle.dims.group_count; ++g) {
    const Index count = group_sample_count(bundle, g);
    if (count == 0) throw Error("group " + std::to_string(g + 1) + " has no samples");
    averages.push_back(group_columns(bundle, g).rowwise().mean());
  }
  return averages;
}

}  // namespace agedict
