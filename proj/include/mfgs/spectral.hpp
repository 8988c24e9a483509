#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "mfgs/model.hpp"
#include "mfgs/simplex.hpp"

namespace mfgs {

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// diag + offdiag, offdiag entrywise nonnegative.
struct OperatorMatrix {
  Eigen::VectorXd diag;
  SparseRM offdiag;

  Eigen::Index size() const { return diag.size(); }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd dense() const;
  // Keeps the listed rows and columns (absorbing exterior).
  OperatorMatrix restrict_to(const std::vector<Eigen::Index>& keep) const;
};

struct LumpedOperator {
  ModelSpec spec;
  SimplexGrid grid;
  Eigen::VectorXd Fg;         // tilted potential for g = 1/sqrt(mu_N)
  Eigen::VectorXd exit_rate;  // row sums of offdiag
  OperatorMatrix S;           // G^g + N F_g

  int N() const { return grid.N(); }
};

LumpedOperator assemble(const ModelSpec& spec, int N, std::int64_t cap = kDefaultGridCap);

struct PerronOptions {
  long max_iter = 5'000'000;
  double rayleigh_tol = 1e-12;  // scaled by N (or by 1 for bare matrices)
  double log_tol = 1e-13;       // max componentwise change of log(x)
  std::optional<Eigen::VectorXd> start;
};

struct PerronPair {
  double eigenvalue = 0.0;  // leading eigenvalue of the operator
  Eigen::VectorXd vector;   // positive, unit 2-norm
  long iterations = 0;
  double residual = 0.0;    // ||A x - eigenvalue x||_inf
};

// Shifted power iteration on A + c I with c making it entrywise nonnegative.
PerronPair perron_pair(const OperatorMatrix& A, double scale = 1.0, const PerronOptions& opt = {});

struct GroundStateSolution {
  int N = 0;
  double R1 = 0.0;  // leading eigenvalue of S_N is -R1
  Eigen::VectorXd h;
  Eigen::VectorXd psi;             // -log(h)/N
  Eigen::VectorXd psi_normalized;  // psi - min psi
  long iterations = 0;
  double residual = 0.0;
};

GroundStateSolution ground_state(const LumpedOperator& op, const PerronOptions& opt = {});

struct OracleResult {
  double E1 = 0.0;              // lowest eigenvalue of H_N (or of the shifted form)
  Eigen::VectorXd ground;       // full-space ground vector, unit norm, positive sum
  Eigen::VectorXd lumped;       // <m|ground> over the lumped grid, unit norm
};

// Dense -H_N = N F(M^N) + sum_i B_i on (labels)^N. With shift_label_rates, diagonalizes
// H_N + N sum_a kappa_a M_a instead, whose ground energy is R_N for any kernel.
OracleResult full_hamiltonian_oracle(const ModelSpec& spec, int N, bool shift_label_rates = false,
                                     long cap = 4096);

// Grid points with magnetization in [lo, hi] (two labels only).
std::vector<Eigen::Index> interval_points(const SimplexGrid& grid, double lo, double hi);
// -R^1_{N,l}: leading eigenvalue of S_N restricted to the interval.
double dirichlet_eigenvalue(const LumpedOperator& op, double lo, double hi,
                            const PerronOptions& opt = {});

struct CorrectionFit {
  double r1 = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<int> Ns;
  std::vector<double> R;
};

// Least squares R_N = N r1 + c0 + c1 / N.
CorrectionFit fit_correction(const std::vector<int>& Ns, const std::vector<double>& R);
CorrectionFit correction_extrapolation(const ModelSpec& spec, const std::vector<int>& Ns,
                                       const PerronOptions& opt = {});

// Ground-state chain: offdiag r(i->j) h_j / h_i, diag = S_ii + R1.
OperatorMatrix doob_generator(const LumpedOperator& op, const GroundStateSolution& gs);

// exp(T S) v by positive Taylor substeps; truncation below tol ||v|| per unit of T.
Eigen::VectorXd semigroup_apply(const OperatorMatrix& S, const Eigen::Ref<const Eigen::VectorXd>& v,
                                double T, double tol = 1e-16);

}  // namespace mfgs
