#pragma once

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "repgame/errors.hpp"
#include "repgame/scalar.hpp"

namespace repgame {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
Vec<T> solve_linear(const Mat<T>& A, const Vec<T>& b) {
  Eigen::PartialPivLU<Mat<T>> lu(A);
  Vec<T> x = lu.solve(b);
  if constexpr (!is_exact_v<T>) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!std::isfinite(x(i))) throw SingularSystem("linear system is singular");
  }
  return x;
}

template <class T>
std::vector<T> to_std(const Vec<T>& v) {
  return std::vector<T>(v.data(), v.data() + v.size());
}

}  // namespace repgame
