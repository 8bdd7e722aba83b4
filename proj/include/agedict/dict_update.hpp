#pragma once

// Closed-form block updates of the alternating minimization: the coupled
// dictionary solve with boundary indicators and the personalized-layer
// update. Everything operates in reduced space.

#include <agedict/types.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <limits>

namespace agedict {

// argmin over P of ||z - P||_F^2 + ||r - P||_F^2 + gamma * ||P||_F^2.
template <class Scalar>
MatrixX<Scalar> personalized_update(const MatrixX<Scalar>& z, const MatrixX<Scalar>& r,
                                    Scalar gamma) {
  if (z.rows() != r.rows() || z.cols() != r.cols())
    throw Error("personalized update: shape mismatch");
  if (!(gamma >= Scalar(0))) throw Error("personalized update: gamma must be non-negative");
  return (z + r) / (Scalar(2) + gamma);
}

// Pre-projection dictionary solve for one group:
//
//   D * (A_prev A_prev^T + A_cur A_cur^T) = V_prev A_prev^T + U_cur A_cur^T
//
// where the previous-bridge side (V_prev = projected Y minus layer, codes
// A_prev) is absent for the first group and the current-bridge side (U_cur =
// projected X minus layer, codes A_cur) is absent for the last group; pass
// nullptr for an absent side. A small ridge keeps the system solvable when
// the code Gram is singular.
template <class Scalar>
MatrixX<Scalar> solve_dictionary(const MatrixX<Scalar>* prev_codes,
                                 const MatrixX<Scalar>* prev_targets,
                                 const MatrixX<Scalar>* cur_codes,
                                 const MatrixX<Scalar>* cur_targets,
                                 Scalar ridge_scale = Scalar(1e-8),
                                 Scalar* condition = nullptr) {
  if ((prev_codes == nullptr) != (prev_targets == nullptr) ||
      (cur_codes == nullptr) != (cur_targets == nullptr))
    throw Error("dictionary solve: codes and targets must come in pairs");
  if (prev_codes == nullptr && cur_codes == nullptr)
    throw Error("dictionary solve: at least one bridge side required");

  Index k = -1;
  Index m = -1;
  auto check_side = [&](const MatrixX<Scalar>& codes, const MatrixX<Scalar>& targets) {
    if (codes.cols() != targets.cols()) throw Error("dictionary solve: pair count mismatch");
    if (k >= 0 && codes.rows() != k) throw Error("dictionary solve: code size mismatch");
    if (m >= 0 && targets.rows() != m) throw Error("dictionary solve: target size mismatch");
    if (!codes.allFinite() || !targets.allFinite())
      throw Error("dictionary solve: non-finite input");
    k = codes.rows();
    m = targets.rows();
  };
  if (prev_codes != nullptr) check_side(*prev_codes, *prev_targets);
  if (cur_codes != nullptr) check_side(*cur_codes, *cur_targets);

  MatrixX<Scalar> gram = MatrixX<Scalar>::Zero(k, k);
  MatrixX<Scalar> rhs = MatrixX<Scalar>::Zero(m, k);
  if (prev_codes != nullptr) {
    gram.noalias() += *prev_codes * prev_codes->transpose();
    rhs.noalias() += *prev_targets * prev_codes->transpose();
  }
  if (cur_codes != nullptr) {
    gram.noalias() += *cur_codes * cur_codes->transpose();
    rhs.noalias() += *cur_targets * cur_codes->transpose();
  }

  if (condition != nullptr) {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(gram, Eigen::EigenvaluesOnly);
    const Scalar lo = eig.eigenvalues()(0);
    const Scalar hi = eig.eigenvalues()(k - 1);
    *condition = (lo > Scalar(0)) ? hi / lo : std::numeric_limits<Scalar>::infinity();
  }

  const Scalar trace = gram.trace();
  const Scalar ridge = ridge_scale * (trace > Scalar(0) ? trace / Scalar(k) : Scalar(1));
  gram.diagonal().array() += ridge;

  Eigen::LDLT<MatrixX<Scalar>> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw Error("dictionary solve: factorization failed");
  return ldlt.solve(rhs.transpose()).transpose();
}

// Projects columns with norm > 1 onto the unit ball; shorter columns are left
// untouched. Returns the number of clipped columns.
template <class Scalar>
Index clip_columns_to_unit_ball(MatrixX<Scalar>& d) {
  Index clipped = 0;
  for (Index c = 0; c < d.cols(); ++c) {
    const Scalar norm = d.col(c).norm();
    if (norm > Scalar(1)) {
      d.col(c) /= norm;
      ++clipped;
    }
  }
  return clipped;
}

}  // namespace agedict
