#pragma once

#include <Eigen/Dense>

#include "mfgs/extended_real.hpp"
#include "mfgs/model.hpp"
#include "mfgs/simplex.hpp"

namespace mfgs {

using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// w_ab = sqrt(m_a m_b) K_ab
Eigen::MatrixXd edge_weights(const ModelSpec& spec, const VecRef& m);
// lambda_a(m) = sum_b sqrt(m_a m_b) K_ab
double label_rate(const ModelSpec& spec, const VecRef& m, int alpha);

double effective_potential(const ModelSpec& spec, const VecRef& m);               // V
double finite_size_correction(const ModelSpec& spec, int N, const VecRef& m);     // Xi_N
// F_g at grid point i for a positive tilt g over the grid.
double tilted_potential(const ModelSpec& spec, const SimplexGrid& grid, const VecRef& g,
                        Eigen::Index i);
// F_g for g = 1/sqrt(mu_N), written through counts (no g evaluation).
double tilted_potential(const ModelSpec& spec, const SimplexGrid& grid, Eigen::Index i);

double free_hamiltonian(const ModelSpec& spec, const VecRef& m, const VecRef& theta);  // H_0
Eigen::VectorXd free_hamiltonian_gradient(const ModelSpec& spec, const VecRef& m,
                                          const VecRef& theta);
Eigen::MatrixXd free_hamiltonian_hessian(const ModelSpec& spec, const VecRef& m,
                                         const VecRef& theta);
double hamiltonian(const ModelSpec& spec, const VecRef& m, const VecRef& theta);  // H_0 - V

struct LegendreResult {
  ExtendedReal value;
  Eigen::VectorXd theta;  // maximizer, normalized so theta_{d-1} = 0 on each component
  int iterations = 0;
};

struct LegendreOptions {
  double grad_tol = 1e-10;
  int max_iter = 200;
  double divergence_norm = 50.0;
  double constraint_tol = 1e-12;
};

// sup over theta of (v, theta) - H_0(m, theta), by damped Newton in reduced coordinates.
LegendreResult free_lagrangian_argmax(const ModelSpec& spec, const VecRef& m, const VecRef& v,
                                      const LegendreOptions& opt = {});
ExtendedReal free_lagrangian(const ModelSpec& spec, const VecRef& m, const VecRef& v,
                             const LegendreOptions& opt = {});
// Two labels, m the magnetization and v = dm/dt.
ExtendedReal free_lagrangian_closed_form(const ModelSpec& spec, double m, double v);
ExtendedReal lagrangian(const ModelSpec& spec, const VecRef& m, const VecRef& v);

// sup_x { phi x - a (cosh x - 1) } for a >= 0
ExtendedReal cosh_conjugate(double phi, double a);

// |v_a| (log(|v_a| / lambda_a(m)) - 1); -inf when |v_a| < lambda_a(m).
ExtendedReal free_lagrangian_lower_bound(const ModelSpec& spec, const VecRef& m, const VecRef& v,
                                         int alpha);

// Antisymmetric flow f with sum_b f_ba = v_a, carried by a spanning tree of the kernel graph
// that prefers edges with positive weight at m.
Eigen::MatrixXd tree_flow(const ModelSpec& spec, const VecRef& m, const VecRef& v);
// sum over edges of cosh_conjugate(f_ab, 2 w_ab); exact for two labels.
ExtendedReal free_lagrangian_flow_bound(const ModelSpec& spec, const VecRef& m, const VecRef& v);
// sum_{a != b} (|f_ab|/2) log(1 + |f_ab| / w_ab) + sum_a lambda_a(m)
ExtendedReal free_lagrangian_flow_bound_appendix(const ModelSpec& spec, const VecRef& m,
                                                 const VecRef& v);

}  // namespace mfgs
