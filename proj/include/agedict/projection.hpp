#pragma once

// Truncated-SVD projection bases: fitting, projecting to reduced space and
// lifting back. The decomposition goes through the smaller Gram matrix, so
// cost is driven by min(sample_dim, sample_count).

#include <agedict/types.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace agedict {

template <class Scalar>
struct ProjectionBasisT {
  int group = 0;                    // 1-based tag, informational
  MatrixX<Scalar> basis;            // sample_dim x reduced_dim, orthonormal columns
  VectorX<Scalar> singular_values;  // retained spectrum, non-increasing (fit-time info)

  Index sample_dim() const { return basis.rows(); }
  Index reduced_dim() const { return basis.cols(); }
};
using ProjectionBasis = ProjectionBasisT<double>;

namespace detail {

// Deterministic sign convention: the largest-magnitude entry of every column
// is made positive (first such entry wins on ties).
template <class Scalar>
void fix_column_signs(MatrixX<Scalar>& h) {
  for (Index c = 0; c < h.cols(); ++c) {
    Index which = 0;
    h.col(c).cwiseAbs().maxCoeff(&which);
    if (h(which, c) < Scalar(0)) h.col(c) = -h.col(c);
  }
}

// Modified Gram-Schmidt over the leading `count` columns.
template <class Scalar>
void orthonormalize_prefix(MatrixX<Scalar>& h, Index count) {
  for (Index c = 0; c < count; ++c) {
    for (Index prev = 0; prev < c; ++prev) {
      h.col(c) -= h.col(prev).dot(h.col(c)) * h.col(prev);
    }
    const Scalar norm = h.col(c).norm();
    if (!(norm > Scalar(0))) throw Error("projection: degenerate basis column");
    h.col(c) /= norm;
  }
}

// Fills columns [filled, cols) with an orthonormal completion built from
// coordinate vectors. Only reached when the sample matrix is rank-deficient
// below the requested reduced dimension.
template <class Scalar>
void complete_prefix(MatrixX<Scalar>& h, Index filled) {
  const Index f = h.rows();
  Index candidate = 0;
  for (Index c = filled; c < h.cols(); ++c) {
    bool placed = false;
    for (; candidate < f; ++candidate) {
      VectorX<Scalar> v = VectorX<Scalar>::Unit(f, candidate);
      for (Index prev = 0; prev < c; ++prev) {
        v -= h.col(prev).dot(v) * h.col(prev);
      }
      const Scalar norm = v.norm();
      if (norm > Scalar(0.5)) {
        h.col(c) = v / norm;
        ++candidate;
        placed = true;
        break;
      }
    }
    if (!placed) throw Error("projection: basis completion failed");
  }
}

}  // namespace detail

// Leading left singular vectors of the sample matrix, ordered by
// non-increasing singular value. The input is not mean-centered.
template <class Scalar>
ProjectionBasisT<Scalar> fit_projection(const MatrixX<Scalar>& samples, Index m, int group = 0) {
  const Index f = samples.rows();
  const Index s = samples.cols();
  if (f < 1 || s < 1) throw Error("projection: empty sample matrix");
  if (m < 1 || m > std::min(f, s)) throw Error("projection: reduced dimension out of range");
  if (!samples.allFinite()) throw Error("projection: non-finite samples");

  ProjectionBasisT<Scalar> out;
  out.group = group;
  out.basis.resize(f, m);
  out.singular_values = VectorX<Scalar>::Zero(m);

  if (f <= s) {
    // Eigenvectors of the f x f outer Gram are the left singular vectors.
    MatrixX<Scalar> outer = samples * samples.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(outer);
    if (eig.info() != Eigen::Success) throw Error("projection: eigendecomposition failed");
    const VectorX<Scalar>& vals = eig.eigenvalues();  // ascending
    if (!(vals(f - 1) > Scalar(0))) throw Error("projection: no spectrum (zero sample matrix)");
    for (Index j = 0; j < m; ++j) {
      const Index src = f - 1 - j;
      out.basis.col(j) = eig.eigenvectors().col(src);
      out.singular_values(j) = std::sqrt(std::max(vals(src), Scalar(0)));
    }
  } else {
    // Right singular vectors from the s x s Gram, lifted through the samples.
    MatrixX<Scalar> gram = samples.transpose() * samples;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(gram);
    if (eig.info() != Eigen::Success) throw Error("projection: eigendecomposition failed");
    const VectorX<Scalar>& vals = eig.eigenvalues();
    const Scalar lambda_max = vals(s - 1);
    if (!(lambda_max > Scalar(0))) throw Error("projection: no spectrum (zero sample matrix)");
    const Scalar floor = lambda_max * std::numeric_limits<Scalar>::epsilon() * Scalar(s);
    Index filled = 0;
    for (Index j = 0; j < m; ++j) {
      const Index src = s - 1 - j;
      if (vals(src) > floor) {
        out.singular_values(j) = std::sqrt(vals(src));
        out.basis.col(j) = samples * (eig.eigenvectors().col(src) / out.singular_values(j));
        ++filled;
      } else {
        break;  // spectrum is sorted, everything below is noise rank
      }
    }
    detail::orthonormalize_prefix(out.basis, filled);
    detail::complete_prefix(out.basis, filled);
  }

  detail::fix_column_signs(out.basis);
  return out;
}

template <class Scalar>
VectorX<Scalar> project(const ProjectionBasisT<Scalar>& b, const VectorX<Scalar>& v) {
  if (v.size() != b.basis.rows()) throw Error("projection: dimension mismatch");
  return b.basis.transpose() * v;
}

template <class Scalar>
MatrixX<Scalar> project_columns(const ProjectionBasisT<Scalar>& b, const MatrixX<Scalar>& m) {
  if (m.rows() != b.basis.rows()) throw Error("projection: dimension mismatch");
  return b.basis.transpose() * m;
}

template <class Scalar>
VectorX<Scalar> lift(const ProjectionBasisT<Scalar>& b, const VectorX<Scalar>& c) {
  if (c.size() != b.basis.cols()) throw Error("projection: dimension mismatch");
  return b.basis * c;
}

template <class Scalar>
MatrixX<Scalar> lift_columns(const ProjectionBasisT<Scalar>& b, const MatrixX<Scalar>& m) {
  if (m.rows() != b.basis.cols()) throw Error("projection: dimension mismatch");
  return b.basis * m;
}

}  // namespace agedict
