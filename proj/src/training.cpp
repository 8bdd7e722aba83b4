#include <agedict/training.hpp>

#include <agedict/dict_update.hpp>
#include <agedict/sparse_coding.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <numeric>

namespace agedict {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

Vector unit_gaussian(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  do {
    for (Index i = 0; i < dim; ++i) v(i) = normal(rng);
  } while (!(v.norm() > 1e-12));
  return v / v.norm();
}

}  // namespace

double TrainState::max_dictionary_column_norm() const {
  double worst = 0.0;
  for (const Matrix& d : dictionaries) {
    for (Index c = 0; c < d.cols(); ++c) worst = std::max(worst, d.col(c).norm());
  }
  return worst;
}

TrainState init_state(const DatasetBundle& bundle, const HyperParams& hyper) {
  hyper.validate();
  if (bundle.bridges.empty()) throw Error("train: empty bundle");
  for (const FacePairSet& pairs : bundle.bridges) {
    if (pairs.x.cols() == 0) throw Error("train: bridge with zero pairs");
    if (pairs.x.size() > 0 && (pairs.x.minCoeff() < 0.0 || pairs.x.maxCoeff() > 1.0))
      throw Error("train: bundle is not normalized");
    if (pairs.y.size() > 0 && (pairs.y.minCoeff() < 0.0 || pairs.y.maxCoeff() > 1.0))
      throw Error("train: bundle is not normalized");
  }

  TrainState state;
  state.sample_dim = bundle.dims.sample_dim;
  state.group_count = bundle.dims.group_count;
  state.dict_size = hyper.dict_size;
  state.hyper = hyper;

  Index smallest_group = std::numeric_limits<Index>::max();
  for (Index g = 0; g < state.group_count; ++g) {
    smallest_group = std::min(smallest_group, group_sample_count(bundle, g));
  }
  state.reduced_dim = hyper.reduced_dim > 0
                          ? hyper.reduced_dim
                          : std::min({state.sample_dim, smallest_group, Index(100)});
  state.hyper.reduced_dim = state.reduced_dim;

  for (Index g = 0; g < state.group_count; ++g) {
    const Matrix samples = group_columns(bundle, g);
    state.bases.push_back(
        fit_projection<double>(samples, state.reduced_dim, static_cast<int>(g + 1)));
    state.projected_group.push_back(project_columns(state.bases.back(), samples));
  }
  for (Index b = 0; b < state.bridge_count(); ++b) {
    const FacePairSet& pairs = bundle.bridges[static_cast<std::size_t>(b)];
    state.projected_x.push_back(project_columns(state.bases[static_cast<std::size_t>(b)], pairs.x));
    state.projected_y.push_back(
        project_columns(state.bases[static_cast<std::size_t>(b + 1)], pairs.y));
  }

  state.rng.seed(hyper.rng_seed);
  for (Index g = 0; g < state.group_count; ++g) {
    const Matrix& pool = state.projected_group[static_cast<std::size_t>(g)];
    std::vector<Index> order(static_cast<std::size_t>(pool.cols()));
    std::iota(order.begin(), order.end(), Index(0));
    std::shuffle(order.begin(), order.end(), state.rng);

    Matrix dict(state.reduced_dim, state.dict_size);
    Index placed = 0;
    for (Index idx : order) {
      if (placed == state.dict_size) break;
      const double norm = pool.col(idx).norm();
      if (norm > 1e-12) dict.col(placed++) = pool.col(idx) / norm;
    }
    while (placed < state.dict_size) dict.col(placed++) = unit_gaussian(state.rng, state.reduced_dim);
    state.dictionaries.push_back(std::move(dict));
  }

  for (Index b = 0; b < state.bridge_count(); ++b) {
    const Index n = state.projected_x[static_cast<std::size_t>(b)].cols();
    state.codes.push_back(Matrix::Zero(state.dict_size, n));
    state.layers.push_back(Matrix::Zero(state.reduced_dim, n));
  }
  return state;
}

double objective(const TrainState& state) {
  double total = 0.0;
  for (Index b = 0; b < state.bridge_count(); ++b) {
    const std::size_t sb = static_cast<std::size_t>(b);
    const Matrix& a = state.codes[sb];
    const Matrix& p = state.layers[sb];
    total += (state.projected_x[sb] - state.dictionaries[sb] * a - p).squaredNorm();
    total += (state.projected_y[sb] - state.dictionaries[sb + 1] * a - p).squaredNorm();
    total += state.hyper.gamma * p.squaredNorm();
    total += state.hyper.lambda * a.cwiseAbs().sum();
  }
  return total;
}

CodeUpdateStats update_codes(TrainState& state) {
  CodeUpdateStats stats;
  LassoOptions opts;
  opts.max_sweeps = static_cast<int>(10 * state.dict_size);
  for (Index b = 0; b < state.bridge_count(); ++b) {
    const std::size_t sb = static_cast<std::size_t>(b);
    EffectiveDictionary young{static_cast<int>(b + 1), state.dictionaries[sb]};
    EffectiveDictionary old{static_cast<int>(b + 2), state.dictionaries[sb + 1]};
    const Matrix u = state.projected_x[sb] - state.layers[sb];
    const Matrix v = state.projected_y[sb] - state.layers[sb];
    CoupledCodesResult<double> result =
        solve_coupled_codes(young, old, u, v, state.hyper.lambda, opts, &state.codes[sb]);
    state.codes[sb] = std::move(result.codes.a);
    stats.max_kkt_residual = std::max(stats.max_kkt_residual, result.max_kkt_residual);
    stats.all_converged = stats.all_converged && result.all_converged;
  }
  return stats;
}

DictionaryUpdateStats update_dictionaries(TrainState& state) {
  DictionaryUpdateStats stats;
  const Index G = state.group_count;
  std::vector<Matrix> prev_targets(static_cast<std::size_t>(G));
  std::vector<Matrix> cur_targets(static_cast<std::size_t>(G));
  for (Index c = 0; c < G; ++c) {
    const std::size_t sc = static_cast<std::size_t>(c);
    const Matrix* prev_codes = nullptr;
    const Matrix* prev = nullptr;
    const Matrix* cur_codes = nullptr;
    const Matrix* cur = nullptr;
    if (c > 0) {
      prev_targets[sc] = state.projected_y[sc - 1] - state.layers[sc - 1];
      prev = &prev_targets[sc];
      prev_codes = &state.codes[sc - 1];
    }
    if (c < G - 1) {
      cur_targets[sc] = state.projected_x[sc] - state.layers[sc];
      cur = &cur_targets[sc];
      cur_codes = &state.codes[sc];
    }
    double condition = 0.0;
    state.dictionaries[sc] =
        solve_dictionary<double>(prev_codes, prev, cur_codes, cur, 1e-8, &condition);
    stats.max_condition = std::max(stats.max_condition, condition);
    stats.clipped_columns += clip_columns_to_unit_ball(state.dictionaries[sc]);
  }
  return stats;
}

void update_personalized(TrainState& state) {
  for (Index b = 0; b < state.bridge_count(); ++b) {
    const std::size_t sb = static_cast<std::size_t>(b);
    const Matrix z = state.projected_x[sb] - state.dictionaries[sb] * state.codes[sb];
    const Matrix r = state.projected_y[sb] - state.dictionaries[sb + 1] * state.codes[sb];
    state.layers[sb] = personalized_update(z, r, state.hyper.gamma);
  }
}

Index replace_dead_atoms(TrainState& state) {
  const Index G = state.group_count;
  Index replaced = 0;
  for (Index c = 0; c < G; ++c) {
    const std::size_t sc = static_cast<std::size_t>(c);
    std::vector<Index> dead;
    for (Index d = 0; d < state.dict_size; ++d) {
      bool used = false;
      if (c < G - 1 && !state.codes[sc].row(d).isZero(0.0)) used = true;
      if (c > 0 && !state.codes[sc - 1].row(d).isZero(0.0)) used = true;
      if (!used) dead.push_back(d);
    }
    if (dead.empty()) continue;

    // Residual norm of every projected sample of this group under the current
    // state; columns come in group_columns order (x side, then y side).
    std::vector<std::pair<double, Index>> residuals;
    Index offset = 0;
    auto push_side = [&](const Matrix& data, const Matrix& dict, const Matrix& codes,
                         const Matrix& layers) {
      for (Index i = 0; i < data.cols(); ++i) {
        const double err = (data.col(i) - dict * codes.col(i) - layers.col(i)).norm();
        residuals.emplace_back(err, offset + i);
      }
      offset += data.cols();
    };
    if (c < G - 1) {
      push_side(state.projected_x[sc], state.dictionaries[sc], state.codes[sc], state.layers[sc]);
    }
    if (c > 0) {
      push_side(state.projected_y[sc - 1], state.dictionaries[sc], state.codes[sc - 1],
                state.layers[sc - 1]);
    }
    std::sort(residuals.begin(), residuals.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    const Matrix& pool = state.projected_group[sc];
    std::size_t next = 0;
    for (Index d : dead) {
      Vector atom;
      while (next < residuals.size()) {
        const Vector candidate = pool.col(residuals[next].second);
        ++next;
        if (candidate.norm() > 1e-12) {
          atom = candidate / candidate.norm();
          break;
        }
      }
      if (atom.size() == 0) atom = unit_gaussian(state.rng, state.reduced_dim);
      state.dictionaries[sc].col(d) = atom;
      ++replaced;
    }
  }
  return replaced;
}

TrainResult train(const DatasetBundle& bundle, const HyperParams& hyper, std::ostream* csv_log) {
  TrainState state = init_state(bundle, hyper);
  const std::vector<Vector> averages = compute_average_faces(bundle);

  char buf[256];
  if (csv_log != nullptr) {
    std::snprintf(buf, sizeof(buf),
                  "# lambda=%.17g gamma=%.17g k=%lld m=%lld max_outer_iter=%d rel_tol=%.17g "
                  "seed=%llu\n",
                  state.hyper.lambda, state.hyper.gamma,
                  static_cast<long long>(state.dict_size),
                  static_cast<long long>(state.reduced_dim), state.hyper.max_outer_iter,
                  state.hyper.rel_tol,
                  static_cast<unsigned long long>(state.hyper.rng_seed));
    *csv_log << buf;
    *csv_log << "iteration,objective,max_column_norm,codes_ms,dictionary_ms,personalized_ms\n";
  }

  TrainResult result;
  double previous = objective(state);
  std::vector<ModelLogRow> log;

  for (int iter = 1; iter <= state.hyper.max_outer_iter; ++iter) {
    auto t0 = std::chrono::steady_clock::now();
    update_codes(state);
    const double codes_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    const DictionaryUpdateStats dict_stats = update_dictionaries(state);
    replace_dead_atoms(state);
    const double dict_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    update_personalized(state);
    const double pers_ms = elapsed_ms(t0);

    const double current = objective(state);
    const double max_norm = state.max_dictionary_column_norm();
    log.push_back({static_cast<std::uint64_t>(iter), current, max_norm});
    if (csv_log != nullptr) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.3f,%.3f,%.3f\n", iter, current, max_norm,
                    codes_ms, dict_ms, pers_ms);
      *csv_log << buf;
      if (dict_stats.max_condition > 1e10) {
        std::snprintf(buf, sizeof(buf), "# iteration %d: code gram condition %.3g (ridge applied)\n",
                      iter, dict_stats.max_condition);
        *csv_log << buf;
      }
    }

    result.iterations = iter;
    const double denom = std::max(previous, std::numeric_limits<double>::min());
    if (std::abs(previous - current) / denom < state.hyper.rel_tol) {
      result.converged = true;
      previous = current;
      break;
    }
    previous = current;
  }

  AgingModel& model = result.model;
  model.sample_dim = state.sample_dim;
  model.group_count = state.group_count;
  model.reduced_dim = state.reduced_dim;
  model.dict_size = state.dict_size;
  model.hyper = state.hyper;
  model.converged = result.converged;
  model.bases = std::move(state.bases);
  model.dictionaries = std::move(state.dictionaries);
  model.averages = averages;
  model.training_log = std::move(log);
  model.validate();
  return result;
}

}  // namespace agedict
