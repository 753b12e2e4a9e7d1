#pragma once

#include <random>

#include <Eigen/Dense>

#include "structce/random.hpp"

namespace test {

inline Eigen::MatrixXcd random_complex(Eigen::Index rows, Eigen::Index cols, structce::Rng& rng) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] = structce::complex_gaussian(rng, 1.0);
  return m;
}

inline Eigen::VectorXd random_real(Eigen::Index n, structce::Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v(j) = u(rng);
  return v;
}

}  // namespace test
