#include "mfgs/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cfloat>
#include <cmath>
#include <string>

#include "mfgs/error.hpp"
#include "mfgs/parallel.hpp"
#include "mfgs/potentials.hpp"

namespace mfgs {

namespace {

constexpr Eigen::Index kParallelRows = 20000;

double max_row_abs_sum(const OperatorMatrix& A) {
  double c = 0.0;
  for (Eigen::Index i = 0; i < A.size(); ++i) {
    double s = std::abs(A.diag(i));
    for (SparseRM::InnerIterator it(A.offdiag, i); it; ++it) s += std::abs(it.value());
    c = std::max(c, s);
  }
  return c;
}

// y = (A + shift I) x
void apply_shifted(const OperatorMatrix& A, double shift, const Eigen::VectorXd& x,
                   Eigen::VectorXd& y) {
  const Eigen::Index n = A.size();
  y.resize(n);
#pragma omp parallel for schedule(static) num_threads(worker_threads()) if (n > kParallelRows)
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = (A.diag(i) + shift) * x(i);
    for (SparseRM::InnerIterator it(A.offdiag, i); it; ++it) s += it.value() * x(it.col());
    y(i) = s;
  }
}

}  // namespace

Eigen::VectorXd OperatorMatrix::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd y;
  apply_shifted(*this, 0.0, x, y);
  return y;
}

Eigen::MatrixXd OperatorMatrix::dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd(offdiag);
  D.diagonal() += diag;
  return D;
}

OperatorMatrix OperatorMatrix::restrict_to(const std::vector<Eigen::Index>& keep) const {
  std::vector<Eigen::Index> pos(size(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = static_cast<Eigen::Index>(k);
  OperatorMatrix out;
  const auto n = static_cast<Eigen::Index>(keep.size());
  out.diag.resize(n);
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.diag(k) = diag(keep[k]);
    for (SparseRM::InnerIterator it(offdiag, keep[k]); it; ++it)
      if (pos[it.col()] >= 0) trip.emplace_back(k, pos[it.col()], it.value());
  }
  out.offdiag.resize(n, n);
  out.offdiag.setFromTriplets(trip.begin(), trip.end());
  return out;
}

LumpedOperator assemble(const ModelSpec& spec, int N, std::int64_t cap) {
  require_valid(spec);
  LumpedOperator op{spec, SimplexGrid(N, spec.d, cap), {}, {}, {}};
  const auto& grid = op.grid;
  const Eigen::Index n = grid.size();
  const int d = spec.d;
  op.Fg.resize(n);
  op.exit_rate.setZero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * d * (d - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = grid.counts(i);
    for (int a = 0; a < d; ++a) {
      if (c(a) == 0) continue;
      for (int b = 0; b < d; ++b) {
        if (b == a || spec.kernel(a, b) == 0.0) continue;
        const double r = std::sqrt(double(c(a)) * (c(b) + 1.0)) * spec.kernel(a, b);
        trip.emplace_back(i, grid.step(i, a, b), r);
        op.exit_rate(i) += r;
      }
    }
    op.Fg(i) = tilted_potential(spec, grid, i);
  }
  op.S.offdiag.resize(n, n);
  op.S.offdiag.setFromTriplets(trip.begin(), trip.end());
  op.S.diag = N * op.Fg - op.exit_rate;
  // uniform-measure reversibility, entry by entry
  const SparseRM T = op.S.offdiag.transpose();
  if ((op.S.offdiag - T).norm() != 0.0) throw ModelError("assembled rates are not symmetric");
  return op;
}

PerronPair perron_pair(const OperatorMatrix& A, double scale, const PerronOptions& opt) {
  const Eigen::Index n = A.size();
  if (n == 0) throw DomainError("empty operator");
  const double shift = max_row_abs_sum(A);
  Eigen::VectorXd x = opt.start ? *opt.start : Eigen::VectorXd::Ones(n);
  if (x.size() != n || !(x.minCoeff() > 0)) throw DomainError("start vector must be positive");
  x /= blocked_norm(x);
  Eigen::VectorXd y;
  double ray_prev = std::numeric_limits<double>::quiet_NaN();
  PerronPair out;
  for (long it = 1; it <= opt.max_iter; ++it) {
    apply_shifted(A, shift, x, y);
    const double ray = blocked_dot(x, y) - shift;
    const double rho = blocked_norm(y);
    y /= rho;
    double change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) change = std::max(change, std::abs(y(i) / x(i) - 1.0));
    x.swap(y);
    if (!(x.minCoeff() >= DBL_MIN))
      throw ConvergenceError("Perron vector underflowed", change);
    const bool done = std::abs(ray - ray_prev) < opt.rayleigh_tol * scale && change < opt.log_tol;
    ray_prev = ray;
    if (done || it == opt.max_iter) {
      out.iterations = it;
      apply_shifted(A, 0.0, x, y);
      out.eigenvalue = blocked_dot(x, y);
      out.residual = (y - out.eigenvalue * x).cwiseAbs().maxCoeff();
      out.vector = x;
      if (!done) throw ConvergenceError("power iteration hit the iteration cap", change);
      return out;
    }
  }
  throw ConvergenceError("power iteration did not run", 0.0);
}

GroundStateSolution ground_state(const LumpedOperator& op, const PerronOptions& opt) {
  const PerronPair p = perron_pair(op.S, op.N(), opt);
  GroundStateSolution gs;
  gs.N = op.N();
  gs.R1 = -p.eigenvalue;
  gs.h = p.vector;
  gs.psi = -gs.h.array().log() / op.N();
  gs.psi_normalized = gs.psi.array() - gs.psi.minCoeff();
  gs.iterations = p.iterations;
  gs.residual = p.residual;
  return gs;
}

OracleResult full_hamiltonian_oracle(const ModelSpec& spec, int N, bool shift_label_rates,
                                     long cap) {
  require_valid(spec);
  const int d = spec.d;
  long n = 1;
  for (int i = 0; i < N; ++i) {
    n *= d;
    if (n > cap) throw SizeError("full Hilbert space exceeds " + std::to_string(cap) + " states");
  }
  const Eigen::VectorXd kappa = spec.kernel.rowwise().sum();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::VectorXi> cfg_counts(n);
  for (long s = 0; s < n; ++s) {
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(d);
    long rest = s, pw = 1;
    for (int site = 0; site < N; ++site, pw *= d, rest /= d) {
      const int a = static_cast<int>(rest % d);
      counts(a) += 1;
      for (int b = 0; b < d; ++b)
        if (b != a && spec.kernel(a, b) != 0.0) A(s, s + (b - a) * pw) += spec.kernel(a, b);
    }
    const Eigen::VectorXd m = counts.cast<double>() / N;
    A(s, s) = N * eval_F(spec, m);
    if (shift_label_rates) A(s, s) -= N * kappa.dot(m);
    cfg_counts[s] = counts;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0);
  OracleResult res;
  res.E1 = -es.eigenvalues()(n - 1);
  res.ground = es.eigenvectors().col(n - 1);
  if (res.ground.sum() < 0) res.ground = -res.ground;
  SimplexGrid grid(N, d);
  res.lumped = Eigen::VectorXd::Zero(grid.size());
  for (long s = 0; s < n; ++s) res.lumped(grid.index(cfg_counts[s])) += res.ground(s);
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    res.lumped(i) /= std::exp(0.5 * grid.log_multinomial(i));
  res.lumped /= res.lumped.norm();
  return res;
}

std::vector<Eigen::Index> interval_points(const SimplexGrid& grid, double lo, double hi) {
  if (grid.d() != 2) throw DomainError("interval restriction needs two labels");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double m = grid_magnetization(grid, i);
    if (m >= lo - 1e-12 && m <= hi + 1e-12) keep.push_back(i);
  }
  return keep;
}

double dirichlet_eigenvalue(const LumpedOperator& op, double lo, double hi,
                            const PerronOptions& opt) {
  const auto keep = interval_points(op.grid, lo, hi);
  if (keep.empty()) throw DomainError("interval contains no grid points");
  PerronOptions o = opt;
  o.start.reset();
  return perron_pair(op.S.restrict_to(keep), op.N(), o).eigenvalue;
}

CorrectionFit fit_correction(const std::vector<int>& Ns, const std::vector<double>& R) {
  if (Ns.size() < 3 || Ns.size() != R.size())
    throw DomainError("correction fit needs at least three (N, R_N) pairs");
  const auto k = static_cast<Eigen::Index>(Ns.size());
  Eigen::MatrixXd X(k, 3);
  Eigen::VectorXd y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X(i, 0) = Ns[i];
    X(i, 1) = 1.0;
    X(i, 2) = 1.0 / Ns[i];
    y(i) = R[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < 3) throw DomainError("degenerate correction fit (repeated N values)");
  const Eigen::Vector3d c = qr.solve(y);
  return {c(0), c(1), c(2), Ns, R};
}

CorrectionFit correction_extrapolation(const ModelSpec& spec, const std::vector<int>& Ns,
                                       const PerronOptions& opt) {
  std::vector<double> R;
  for (int N : Ns) R.push_back(ground_state(assemble(spec, N), opt).R1);
  return fit_correction(Ns, R);
}

OperatorMatrix doob_generator(const LumpedOperator& op, const GroundStateSolution& gs) {
  OperatorMatrix G;
  G.diag = op.S.diag.array() + gs.R1;
  G.offdiag = op.S.offdiag;
  for (Eigen::Index i = 0; i < G.offdiag.outerSize(); ++i)
    for (SparseRM::InnerIterator it(G.offdiag, i); it; ++it)
      it.valueRef() *= gs.h(it.col()) / gs.h(i);
  return G;
}

Eigen::VectorXd semigroup_apply(const OperatorMatrix& S, const Eigen::Ref<const Eigen::VectorXd>& v,
                                double T, double tol) {
  if (T < 0) throw DomainError("semigroup time must be nonnegative");
  Eigen::VectorXd y = v;
  if (T == 0.0) return y;
  const double c = max_row_abs_sum(S);
  const double pnorm = 2.0 * c;
  const long steps = std::max(1L, static_cast<long>(std::ceil(T * pnorm)));
  const double tau = T / steps;
  // terms needed so that e / (K+1)! <= tol
  int K = 1;
  double fact = 2.0;
  while (std::exp(1.0) / fact > tol) {
    ++K;
    fact *= K + 1;
  }
  Eigen::VectorXd term, next;
  for (long s = 0; s < steps; ++s) {
    term = y;
    for (int k = 1; k <= K; ++k) {
      apply_shifted(S, c, term, next);
      term = next * (tau / k);
      y += term;
    }
    y *= std::exp(-c * tau);
  }
  return y;
}

}  // namespace mfgs
