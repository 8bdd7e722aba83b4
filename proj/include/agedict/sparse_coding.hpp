#pragma once

// Lasso coordinate descent over a precomputed Gram matrix, plus the coupled
// two-dictionary batch solve used by training and synthesis.
//
// The objective everywhere is
//
//   ||target - design * a||_2^2 + lambda * ||a||_1
//
// with the penalty exactly as written (no 1/2 factor, no row-count scaling),
// so the one-dimensional subproblem threshold is lambda / 2.

#include <agedict/types.hpp>

#include <cmath>
#include <type_traits>
#include <utility>

namespace agedict {

template <class Scalar>
Scalar soft_threshold(Scalar value, Scalar threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return Scalar(0);
}

struct LassoOptions {
  double tol = 1e-7;   // bound on the KKT residual at the returned point
  int max_sweeps = 0;  // 0 -> 10 * number of coefficients
};

template <class Scalar>
struct LassoResult {
  VectorX<Scalar> coeffs;
  Scalar kkt_residual{};
  int sweeps = 0;
  bool converged = false;
};

// Coordinate-descent state shared across right-hand sides: the Gram matrix
// design^T design is computed once, each solve only needs q = design^T target.
template <class Scalar>
class LassoGram {
 public:
  explicit LassoGram(MatrixX<Scalar> gram) : gram_(std::move(gram)) {
    if (gram_.rows() == 0) throw Error("lasso: empty design");
    if (gram_.rows() != gram_.cols()) throw Error("lasso: gram matrix must be square");
    if (!gram_.allFinite()) throw Error("lasso: non-finite gram matrix");
    diag_ = gram_.diagonal();
  }

  Index size() const { return gram_.rows(); }

  // on_update(j, a) fires after every coordinate update; pass nullptr to skip.
  template <class Observer>
  LassoResult<Scalar> solve(const VectorX<Scalar>& q, Scalar lambda, const LassoOptions& opts,
                            const VectorX<Scalar>* warm_start, Observer&& on_update) const {
    const Index k = size();
    if (q.size() != k) throw Error("lasso: q size mismatch");
    if (!(lambda >= Scalar(0))) throw Error("lasso: lambda must be non-negative");
    if (!q.allFinite()) throw Error("lasso: non-finite target");

    LassoResult<Scalar> result;
    VectorX<Scalar>& a = result.coeffs;
    if (warm_start != nullptr) {
      if (warm_start->size() != k) throw Error("lasso: warm start size mismatch");
      if (!warm_start->allFinite()) throw Error("lasso: non-finite warm start");
      a = *warm_start;
    } else {
      a = VectorX<Scalar>::Zero(k);
    }

    VectorX<Scalar> gram_a = a.isZero(Scalar(0)) ? VectorX<Scalar>::Zero(k).eval()
                                                 : VectorX<Scalar>(gram_ * a);
    const Scalar half_lambda = lambda / Scalar(2);
    const int max_sweeps = opts.max_sweeps > 0 ? opts.max_sweeps : static_cast<int>(10 * k);

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
      for (Index j = 0; j < k; ++j) {
        const Scalar dj = diag_(j);
        Scalar next = Scalar(0);
        if (dj > Scalar(0)) {
          const Scalar rho = q(j) - gram_a(j) + dj * a(j);
          next = soft_threshold(rho, half_lambda) / dj;
        }
        const Scalar delta = next - a(j);
        if (delta != Scalar(0)) {
          gram_a.noalias() += delta * gram_.col(j);
          a(j) = next;
        }
        if constexpr (!std::is_same_v<std::decay_t<Observer>, std::nullptr_t>) {
          on_update(j, a);
        }
      }
      result.sweeps = sweep;
      result.kkt_residual = kkt_residual(a, gram_a, q, lambda);
      if (result.kkt_residual <= static_cast<Scalar>(opts.tol)) {
        result.converged = true;
        break;
      }
    }
    return result;
  }

  LassoResult<Scalar> solve(const VectorX<Scalar>& q, Scalar lambda, const LassoOptions& opts = {},
                            const VectorX<Scalar>* warm_start = nullptr) const {
    return solve(q, lambda, opts, warm_start, nullptr);
  }

  // Largest violation of the subgradient optimality conditions at a.
  Scalar kkt_residual(const VectorX<Scalar>& a, const VectorX<Scalar>& gram_a,
                      const VectorX<Scalar>& q, Scalar lambda) const {
    Scalar worst = 0;
    for (Index j = 0; j < a.size(); ++j) {
      const Scalar g = Scalar(2) * (gram_a(j) - q(j));
      Scalar violation;
      if (a(j) > Scalar(0)) {
        violation = std::abs(g + lambda);
      } else if (a(j) < Scalar(0)) {
        violation = std::abs(g - lambda);
      } else {
        violation = std::max(Scalar(0), std::abs(g) - lambda);
      }
      worst = std::max(worst, violation);
    }
    return worst;
  }

 private:
  MatrixX<Scalar> gram_;
  VectorX<Scalar> diag_;
};

template <class DesignDerived, class TargetDerived>
LassoResult<typename DesignDerived::Scalar> solve_lasso(
    const Eigen::MatrixBase<DesignDerived>& design, const Eigen::MatrixBase<TargetDerived>& target,
    typename DesignDerived::Scalar lambda, const LassoOptions& opts = {},
    const VectorX<typename DesignDerived::Scalar>* warm_start = nullptr) {
  using Scalar = typename DesignDerived::Scalar;
  if (design.rows() == 0 || design.cols() == 0) throw Error("lasso: empty design");
  if (target.size() != design.rows()) throw Error("lasso: target size mismatch");
  if (!design.derived().allFinite() || !target.derived().allFinite())
    throw Error("lasso: non-finite input");
  MatrixX<Scalar> gram = design.transpose() * design;
  VectorX<Scalar> q = design.transpose() * target;
  return LassoGram<Scalar>(std::move(gram)).solve(q, lambda, opts, warm_start);
}

// Reduced-space design block of one age group: plays the role of the
// projection-composed dictionary, which in reduced coordinates is the
// dictionary itself.
template <class Scalar>
struct EffectiveDictionaryT {
  int group = 0;  // 1-based tag, informational
  MatrixX<Scalar> w;
};
using EffectiveDictionary = EffectiveDictionaryT<double>;

template <class Scalar>
struct SparseCodeBatchT {
  int bridge = 0;  // 1-based tag, informational
  MatrixX<Scalar> a;
};
using SparseCodeBatch = SparseCodeBatchT<double>;

template <class Scalar>
struct CoupledCodesResult {
  SparseCodeBatchT<Scalar> codes;
  Scalar max_kkt_residual = 0;
  bool all_converged = true;
};

// Column i of the result solves the stacked Lasso with design [w_young; w_old]
// and target [u(:,i); v(:,i)]. The stack is never materialized: its Gram is
// w_young^T w_young + w_old^T w_old.
template <class Scalar>
CoupledCodesResult<Scalar> solve_coupled_codes(const EffectiveDictionaryT<Scalar>& young,
                                               const EffectiveDictionaryT<Scalar>& old,
                                               const MatrixX<Scalar>& u, const MatrixX<Scalar>& v,
                                               Scalar lambda, const LassoOptions& opts = {},
                                               const MatrixX<Scalar>* warm_start = nullptr) {
  if (young.w.cols() != old.w.cols()) throw Error("coupled codes: dictionary size mismatch");
  if (u.rows() != young.w.rows() || v.rows() != old.w.rows())
    throw Error("coupled codes: target row mismatch");
  if (u.cols() != v.cols()) throw Error("coupled codes: pair count mismatch");
  if (!u.allFinite() || !v.allFinite()) throw Error("coupled codes: non-finite targets");

  const Index k = young.w.cols();
  const Index n = u.cols();
  MatrixX<Scalar> gram = young.w.transpose() * young.w;
  gram.noalias() += old.w.transpose() * old.w;
  LassoGram<Scalar> solver(std::move(gram));

  CoupledCodesResult<Scalar> out;
  out.codes.bridge = young.group;
  out.codes.a.resize(k, n);
  if (warm_start != nullptr && (warm_start->rows() != k || warm_start->cols() != n))
    throw Error("coupled codes: warm start shape mismatch");

  VectorX<Scalar> q(k);
  for (Index i = 0; i < n; ++i) {
    q.noalias() = young.w.transpose() * u.col(i);
    q.noalias() += old.w.transpose() * v.col(i);
    VectorX<Scalar> warm_col;
    const VectorX<Scalar>* warm = nullptr;
    if (warm_start != nullptr) {
      warm_col = warm_start->col(i);
      warm = &warm_col;
    }
    LassoResult<Scalar> result = solver.solve(q, lambda, opts, warm);
    out.codes.a.col(i) = result.coeffs;
    out.max_kkt_residual = std::max(out.max_kkt_residual, result.kkt_residual);
    out.all_converged = out.all_converged && result.converged;
  }
  return out;
}

}  // namespace agedict
