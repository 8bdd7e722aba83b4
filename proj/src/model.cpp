#include <agedict/model.hpp>

#include <cmath>
#include <string>

namespace agedict {

void AgingModel::validate() const {
  if (sample_dim < 1 || group_count < 2 || reduced_dim < 1 || dict_size < 1)
    throw Error("model: invalid dimensions");
  if (static_cast<Index>(bases.size()) != group_count ||
      static_cast<Index>(dictionaries.size()) != group_count ||
      static_cast<Index>(averages.size()) != group_count)
    throw Error("model: per-group component count mismatch");
  if (hyper.reduced_dim != reduced_dim || hyper.dict_size != dict_size)
    throw Error("model: hyperparameters disagree with dimensions");

  for (Index g = 0; g < group_count; ++g) {
    const std::size_t sg = static_cast<std::size_t>(g);
    const ProjectionBasis& basis = bases[sg];
    if (basis.basis.rows() != sample_dim || basis.basis.cols() != reduced_dim)
      throw Error("model: projection shape mismatch (group " + std::to_string(g + 1) + ")");
    if (!basis.basis.allFinite()) throw Error("model: non-finite projection basis");
    const Matrix gram = basis.basis.transpose() * basis.basis;
    const double defect =
        (gram - Matrix::Identity(reduced_dim, reduced_dim)).cwiseAbs().maxCoeff();
    if (defect > 1e-8)
      throw Error("model: orthonormality violation (group " + std::to_string(g + 1) + ")");

    const Matrix& dict = dictionaries[sg];
    if (dict.rows() != reduced_dim || dict.cols() != dict_size)
      throw Error("model: dictionary shape mismatch (group " + std::to_string(g + 1) + ")");
    if (!dict.allFinite()) throw Error("model: non-finite dictionary");
    for (Index c = 0; c < dict.cols(); ++c) {
      if (dict.col(c).norm() > 1.0 + 1e-10)
        throw Error("model: constraint violation: dictionary column norm (group " +
                    std::to_string(g + 1) + ", column " + std::to_string(c + 1) + ")");
    }

    const Vector& avg = averages[sg];
    if (avg.size() != sample_dim)
      throw Error("model: average face shape mismatch (group " + std::to_string(g + 1) + ")");
    if (!avg.allFinite()) throw Error("model: non-finite average face");
    if (avg.minCoeff() < -1e-12 || avg.maxCoeff() > 1.0 + 1e-12)
      throw Error("model: average face out of range (group " + std::to_string(g + 1) + ")");
  }

  for (const ModelLogRow& row : training_log) {
    if (!std::isfinite(row.objective) || !std::isfinite(row.max_column_norm))
      throw Error("model: non-finite training log entry");
  }
}

}  // namespace agedict
