#pragma once

// Alternating-minimization training: sparse codes (coupled Lasso), coupled
// dictionaries (closed form plus unit-ball projection), personalized layers
// (closed form), iterated until the relative objective change stalls.

#include <agedict/dataset.hpp>
#include <agedict/model.hpp>
#include <agedict/projection.hpp>
#include <agedict/types.hpp>

#include <ostream>
#include <random>
#include <vector>

namespace agedict {

struct TrainState {
  Index sample_dim = 0;
  Index group_count = 0;
  Index reduced_dim = 0;
  Index dict_size = 0;
  HyperParams hyper;

  std::vector<ProjectionBasis> bases;       // per group
  std::vector<Matrix> projected_x;          // per bridge, reduced_dim x n
  std::vector<Matrix> projected_y;          // per bridge, reduced_dim x n
  std::vector<Matrix> projected_group;      // per group, reduced_dim x samples
  std::vector<Matrix> dictionaries;         // per group, reduced_dim x dict_size
  std::vector<Matrix> codes;                // per bridge, dict_size x n
  std::vector<Matrix> layers;               // per bridge, reduced_dim x n

  std::mt19937_64 rng;

  Index bridge_count() const { return group_count - 1; }
  double max_dictionary_column_norm() const;
};

// Fits the projection bases, projects the data and seeds the dictionaries
// with shuffled unit-normalized training samples (Gaussian columns when a
// group has fewer usable samples than the dictionary size). Codes and layers
// start at zero.
TrainState init_state(const DatasetBundle& bundle, const HyperParams& hyper);

double objective(const TrainState& state);

struct CodeUpdateStats {
  double max_kkt_residual = 0.0;
  bool all_converged = true;
};
CodeUpdateStats update_codes(TrainState& state);

struct DictionaryUpdateStats {
  double max_condition = 0.0;
  Index clipped_columns = 0;
};
DictionaryUpdateStats update_dictionaries(TrainState& state);

void update_personalized(TrainState& state);

// Re-seeds atoms no code selected this iteration with the worst-reconstructed
// projected sample of their group. Returns the number of replaced atoms.
Index replace_dead_atoms(TrainState& state);

struct TrainResult {
  AgingModel model;
  bool converged = false;
  Index iterations = 0;
};

// Runs the full loop. When csv_log is given, emits one comma-separated row
// per iteration: iteration, objective, max column norm and the three update
// timings in milliseconds.
TrainResult train(const DatasetBundle& bundle, const HyperParams& hyper,
                  std::ostream* csv_log = nullptr);

}  // namespace agedict
