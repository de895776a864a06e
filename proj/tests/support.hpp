#pragma once

#include <Eigen/Dense>

namespace requ::testing {

template <typename A, typename B>
double rel_error(const A& got, const B& want) {
  const double diff = (got - want).norm();
  const double scale = want.norm();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace requ::testing
