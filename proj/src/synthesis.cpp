#include <agedict/synthesis.hpp>

#include <agedict/sparse_coding.hpp>

#include <cmath>
#include <limits>

namespace agedict {

namespace {

constexpr double kInnerRelTol = 1e-6;
constexpr int kMaxAlternations = 100;

}  // namespace

SynthesisStep synthesize_step(const AgingModel& model, const Vector& x_current,
                              const Vector& estimate, int group, SignConvention sign) {
  if (group < 1 || group >= model.group_count) throw Error("synthesis: group out of range");
  if (x_current.size() != model.sample_dim || estimate.size() != model.sample_dim)
    throw Error("synthesis: sample dimension mismatch");
  if (!x_current.allFinite() || !estimate.allFinite())
    throw Error("synthesis: non-finite input");

  const std::size_t g = static_cast<std::size_t>(group - 1);
  const Matrix& dict_young = model.dictionaries[g];
  const Matrix& dict_old = model.dictionaries[g + 1];
  const Vector xt = project(model.bases[g], x_current);
  const Vector et = project(model.bases[g + 1], estimate);

  const double lambda = model.hyper.lambda;
  const double gamma = model.hyper.gamma;

  Matrix gram = dict_young.transpose() * dict_young;
  gram.noalias() += dict_old.transpose() * dict_old;
  LassoGram<double> solver(std::move(gram));
  LassoOptions opts;
  opts.max_sweeps = static_cast<int>(10 * model.dict_size);

  SynthesisStep step;
  Vector a = Vector::Zero(model.dict_size);
  Vector p = Vector::Zero(model.reduced_dim);
  Vector z(model.reduced_dim), r(model.reduced_dim);
  double previous = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= kMaxAlternations; ++it) {
    Vector q = dict_young.transpose() * (xt - p);
    q.noalias() += dict_old.transpose() * (et - p);
    a = solver.solve(q, lambda, opts, &a).coeffs;

    z.noalias() = xt - dict_young * a;
    r.noalias() = et - dict_old * a;
    p = (z + r) / (2.0 + gamma);

    const double obj = (z - p).squaredNorm() + (r - p).squaredNorm() +
                       lambda * a.cwiseAbs().sum() + gamma * p.squaredNorm();
    step.objective_trace.push_back(obj);
    step.alternations = it;
    step.objective = obj;
    if (std::isfinite(previous) &&
        std::abs(previous - obj) <= kInnerRelTol * std::max(previous, 1e-300)) {
      break;
    }
    previous = obj;
  }

  const double layer_sign = sign == SignConvention::add ? 1.0 : -1.0;
  step.face_raw = lift(model.bases[g + 1], Vector(dict_old * a + layer_sign * p));
  step.face = step.face_raw.unaryExpr([](double v) { return clamp01(v); });
  step.code = std::move(a);
  step.layer = std::move(p);
  return step;
}

AgingSequence synthesize_sequence(const AgingModel& model, const SynthesisRequest& request) {
  model.validate();
  if (model.training_log.empty() && model.group_count == 0)
    throw Error("synthesis: untrained model");
  if (request.start_group < 1 || request.start_group >= model.group_count)
    throw Error("synthesis: start group out of range");
  if (request.passes < 1) throw Error("synthesis: passes must be positive");
  if (request.input.size() != model.sample_dim)
    throw Error("synthesis: sample dimension mismatch");
  if (!request.input.allFinite() || request.input.minCoeff() < 0.0 ||
      request.input.maxCoeff() > 1.0)
    throw Error("synthesis: input values must lie in [0,1]");

  const int G = static_cast<int>(model.group_count);
  const int g0 = request.start_group;
  const int steps = G - g0;

  AgingSequence sequence;
  sequence.start_group = g0;
  sequence.faces.resize(static_cast<std::size_t>(steps));
  sequence.codes.resize(static_cast<std::size_t>(steps));
  sequence.personalized.resize(static_cast<std::size_t>(steps));

  // estimates[s] is the running face for group g0+1+s; averages seed pass 1.
  std::vector<Vector> estimates(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    estimates[static_cast<std::size_t>(s)] = model.averages[static_cast<std::size_t>(g0 + s)];
  }

  for (int pass = 1; pass <= request.passes; ++pass) {
    std::vector<double> objectives;
    Vector x_current = request.input;
    for (int s = 0; s < steps; ++s) {
      const int group = g0 + s;
      SynthesisStep step = synthesize_step(model, x_current, estimates[static_cast<std::size_t>(s)],
                                           group, request.sign);
      objectives.push_back(step.objective);
      estimates[static_cast<std::size_t>(s)] = step.face_raw;
      x_current = step.face_raw;
      if (pass == request.passes) {
        sequence.faces[static_cast<std::size_t>(s)] =
            step.face_raw.unaryExpr([](double v) { return clamp01(v); });
        sequence.codes[static_cast<std::size_t>(s)] = std::move(step.code);
        sequence.personalized[static_cast<std::size_t>(s)] =
            lift(model.bases[static_cast<std::size_t>(group)], step.layer);
      }
    }
    sequence.pass_objectives.push_back(std::move(objectives));
  }
  return sequence;
}

}  // namespace agedict
