#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace agedict {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Index = Eigen::Index;

// Validation and I/O failures throw Error; numerical edge cases that have a
// defined result (e.g. a Lasso solve hitting its sweep budget) do not.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

template <class Scalar>
Scalar clamp01(Scalar v) {
  if (v < Scalar(0)) return Scalar(0);
  if (v > Scalar(1)) return Scalar(1);
  return v;
}

}  // namespace agedict
