#pragma once

// The learned artifact: one dictionary, projection basis and average face per
// age group, plus the hyperparameters and objective trace of the run that
// produced it.

#include <agedict/projection.hpp>
#include <agedict/types.hpp>

#include <cstdint>
#include <vector>

namespace agedict {

struct HyperParams {
  double lambda = 0.01;        // sparsity weight
  double gamma = 0.1;          // personalized-layer weight
  Index dict_size = 70;        // bases per group dictionary
  Index reduced_dim = 0;       // 0 -> min(sample_dim, smallest group, 100)
  int max_outer_iter = 60;
  double rel_tol = 1e-4;       // relative objective change stopping rule
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(lambda >= 0.0)) throw Error("hyperparams: lambda must be non-negative");
    if (!(gamma >= 0.0)) throw Error("hyperparams: gamma must be non-negative");
    if (dict_size < 1) throw Error("hyperparams: dictionary size must be positive");
    if (reduced_dim < 0) throw Error("hyperparams: reduced dimension must be non-negative");
    if (max_outer_iter < 1) throw Error("hyperparams: max iterations must be positive");
    if (!(rel_tol > 0.0)) throw Error("hyperparams: tolerance must be positive");
  }
};

struct ModelLogRow {
  std::uint64_t iteration = 0;
  double objective = 0.0;
  double max_column_norm = 0.0;
};

struct AgingModel {
  Index sample_dim = 0;
  Index group_count = 0;
  Index reduced_dim = 0;
  Index dict_size = 0;
  HyperParams hyper;
  bool converged = false;
  std::vector<ProjectionBasis> bases;   // one per group
  std::vector<Matrix> dictionaries;     // one per group, reduced_dim x dict_size
  std::vector<Vector> averages;         // one per group, sample_dim
  std::vector<ModelLogRow> training_log;

  void validate() const;
};

}  // namespace agedict
