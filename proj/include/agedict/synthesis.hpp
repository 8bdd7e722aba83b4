#pragma once

// Chained sparse-code age progression: every step solves one coupled
// reconstruction (shared code across the current face and the next-group
// estimate, plus a per-step personalized layer), and a full sequence sweeps
// the chain a fixed number of passes, re-using the previous pass's faces as
// estimates.

#include <agedict/model.hpp>
#include <agedict/types.hpp>

#include <vector>

namespace agedict {

enum class SignConvention { add, subtract };

struct SynthesisRequest {
  Vector input;                 // sample_dim values in [0,1]
  int start_group = 1;          // 1-based, 1..group_count-1
  int passes = 3;
  SignConvention sign = SignConvention::add;
};

struct SynthesisStep {
  Vector face;      // clamped to [0,1]
  Vector face_raw;  // pre-clamp value used for chaining
  Vector code;
  Vector layer;     // reduced space
  double objective = 0.0;
  int alternations = 0;
  std::vector<double> objective_trace;  // one entry per alternation
};

struct AgingSequence {
  int start_group = 1;
  std::vector<Vector> faces;         // final pass, groups start_group+1 .. group_count
  std::vector<Vector> codes;         // per step of the final pass
  std::vector<Vector> personalized;  // lifted to sample space, per step of the final pass
  std::vector<std::vector<double>> pass_objectives;  // [pass][step]
};

// One step from group `group` (1-based) into group+1. `estimate` is the
// current guess for the synthesized face (the group average on a first pass).
SynthesisStep synthesize_step(const AgingModel& model, const Vector& x_current,
                              const Vector& estimate, int group,
                              SignConvention sign = SignConvention::add);

AgingSequence synthesize_sequence(const AgingModel& model, const SynthesisRequest& request);

}  // namespace agedict
