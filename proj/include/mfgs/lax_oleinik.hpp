#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "mfgs/hj_halfspin.hpp"
#include "mfgs/model.hpp"
#include "mfgs/simplex.hpp"

namespace mfgs {

struct LaxOleinikOptions {
  int stencil = 3;        // feet within graph distance S of the arrival point
  int sublattice = 2;     // d >= 3: feet on the 1/q refinement of the grid
  int golden_iters = 48;  // d = 2: golden-section steps per interpolation cell
  bool check_cfl = true;
};

// Semi-Lagrangian discretization of the Lax-Oleinik semigroup on Delta_d^M:
// u'(m) = min over feet m0 of u(m0) + dt L((m + m0)/2, (m - m0)/dt),
// with u(m0) linearly interpolated.
class LaxOleinikScheme {
 public:
  LaxOleinikScheme(ModelSpec spec, int M, double dt, LaxOleinikOptions opt = {});

  const SimplexGrid& grid() const { return *grid_; }
  std::shared_ptr<const SimplexGrid> grid_ptr() const { return grid_; }
  double dt() const { return dt_; }
  double dt_max() const { return dt_max_; }
  int M() const { return grid_->N(); }

  Eigen::VectorXd one_step(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  // T must be an integer multiple of dt.
  Eigen::VectorXd evolve(const Eigen::Ref<const Eigen::VectorXd>& u, double T) const;

 private:
  double cost_d2(double m, double y) const;  // dt * L for foot at real index y
  Eigen::VectorXd step_d2(const Eigen::VectorXd& u) const;
  Eigen::VectorXd step_general(const Eigen::VectorXd& u) const;
  void build_tables();

  ModelSpec spec_;
  std::shared_ptr<const SimplexGrid> grid_;
  double dt_, dt_max_;
  LaxOleinikOptions opt_;
  std::unique_ptr<HalfSpinModel> half_;  // d = 2 fast path

  struct Candidate {
    double cost;                   // dt * L, finite
    std::vector<Eigen::Index> at;  // interpolation vertices
    std::vector<double> w;         // barycentric weights
  };
  std::vector<std::vector<Candidate>> cand_;  // d >= 3
};

// Largest dt with dt * v_max <= S / M, v_max bounding the optimal speed.
double lax_oleinik_dt_max(const ModelSpec& spec, int M, int stencil = 3);

struct ValueGrid {
  std::shared_ptr<const SimplexGrid> grid;
  Eigen::VectorXd values;
  double time_step = 0.0;
};

ValueGrid one_step(const LaxOleinikScheme& scheme, const ValueGrid& vg);
ValueGrid evolve(const LaxOleinikScheme& scheme, const ValueGrid& vg, double T);

// sup over interior grid points of |U_T psi - T r1 - psi|.
double fixed_point_residual(const LaxOleinikScheme& scheme,
                            const Eigen::Ref<const Eigen::VectorXd>& psi, double r1, double T);

struct ContainmentReport {
  std::vector<Eigen::Index> local_minima;
  std::vector<bool> on_boundary;
  std::vector<double> distance_to_argmin_V;  // max-norm distance in simplex coordinates
  bool interior = true;
  bool within_mesh = true;
};

ContainmentReport minima_containment(const ModelSpec& spec, const SimplexGrid& grid,
                                     const Eigen::Ref<const Eigen::VectorXd>& values,
                                     double mesh_factor = 2.0);

// Analytic spin-1/2 profile sampled at grid magnetizations.
Eigen::VectorXd sample_on_grid(const PsiFunction& psi, const SimplexGrid& grid);

}  // namespace mfgs
