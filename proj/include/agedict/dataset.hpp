#pragma once

// Paired training data: manifest loading, validation, normalization to [0,1]
// and per-group aggregation (average faces, stacked group samples).
//
// Manifest grammar (text, '#' starts a comment, blank lines ignored):
//
//   <sample_dim> <group_count>
//   bridge 1
//   x <path>        # younger-side sample, group 1
//   y <path>        # older-side sample of the same subject, group 2
//   ...
//   bridge 2
//   ...
//
// Bridges must appear in ascending order 1..group_count-1, each with the same
// number of x and y lines; paths are resolved relative to the manifest.

#include <agedict/types.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace agedict {

struct DatasetDims {
  Index sample_dim = 0;  // values per sample
  Index group_count = 0;
  std::vector<Index> pairs_per_bridge;    // group_count - 1 entries
  std::vector<std::string> group_labels;  // group_count entries, young to old
};

struct FacePairSet {
  int bridge = 0;  // 0-based; spans groups `bridge` and `bridge + 1`
  Matrix x;        // sample_dim x n, column i pairs with y column i
  Matrix y;
  std::vector<std::string> x_files;
  std::vector<std::string> y_files;
};

struct DatasetBundle {
  DatasetDims dims;
  std::vector<FacePairSet> bridges;
};

DatasetBundle load_dataset(const std::filesystem::path& manifest_path);

// Global linear scale into [0,1] by the inferred bit depth: data already in
// [0,1] is untouched, 8-bit ranges divide by 255, 16-bit by 65535. Exactly
// idempotent. Negative or non-finite entries are rejected.
void normalize(DatasetBundle& bundle);

// All columns observed in group g (0-based): the x side of bridge g followed
// by the y side of bridge g-1.
Matrix group_columns(const DatasetBundle& bundle, Index group);
Index group_sample_count(const DatasetBundle& bundle, Index group);

// Entrywise mean of group_columns per group.
std::vector<Vector> compute_average_faces(const DatasetBundle& bundle);

}  // namespace agedict
