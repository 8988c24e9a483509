#pragma once

#include <Eigen/Dense>
#include <random>

#include "mfgs/model.hpp"

namespace mfgs::test {

// Uniform point on the simplex via normalized exponentials, kept off the boundary by eps.
inline Eigen::VectorXd random_simplex_point(std::mt19937_64& rng, int d, double eps = 1e-3) {
  std::exponential_distribution<double> ex(1.0);
  Eigen::VectorXd m(d);
  for (int a = 0; a < d; ++a) m(a) = ex(rng);
  m /= m.sum();
  m = (1.0 - d * eps) * m + Eigen::VectorXd::Constant(d, eps);
  return m / m.sum();
}

// Random velocity with zero total.
inline Eigen::VectorXd random_velocity(std::mt19937_64& rng, int d, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::VectorXd v(d);
  for (int a = 0; a < d; ++a) v(a) = nd(rng);
  return v.array() - v.mean();
}

}  // namespace mfgs::test

#include "mfgs/potentials.hpp"

namespace mfgs::test {

// Gradient of H_0 in theta by central differences (independent of the analytic gradient).
inline Eigen::VectorXd fd_gradient(const ModelSpec& spec, const Eigen::VectorXd& m,
                                   const Eigen::VectorXd& theta, double h = 1e-6) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index a = 0; a < theta.size(); ++a) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(a) += h;
    tm(a) -= h;
    g(a) = (free_hamiltonian(spec, m, tp) - free_hamiltonian(spec, m, tm)) / (2 * h);
  }
  return g;
}

// sup_v {(v, theta) - L_0(m, v)}: the objective is stationary at v = grad H_0, so the value there
// is accurate to second order in the gradient error.
inline double biconjugate(const ModelSpec& spec, const Eigen::VectorXd& m,
                          const Eigen::VectorXd& theta) {
  Eigen::VectorXd v = fd_gradient(spec, m, theta);
  v.array() -= v.mean();
  return v.dot(theta) - free_lagrangian(spec, m, v).value();
}

}  // namespace mfgs::test
