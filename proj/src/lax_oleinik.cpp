#include "mfgs/lax_oleinik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mfgs/error.hpp"
#include "mfgs/parallel.hpp"
#include "mfgs/potentials.hpp"

namespace mfgs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

double lax_oleinik_dt_max(const ModelSpec& spec, int M, int stencil) {
  const SimplexGrid grid(M, spec.d);
  Eigen::VectorXd V(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) V(i) = effective_potential(spec, grid.coords(i));
  const double r1 = V.minCoeff();
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd m = grid.coords(i);
    for (int g = 0; g < spec.d; ++g)
      vmax = std::max(vmax, 2.0 * label_rate(spec, m, g) + V(i) - r1);
  }
  if (vmax <= 0) return kInf;
  return stencil / (M * vmax);
}

LaxOleinikScheme::LaxOleinikScheme(ModelSpec spec, int M, double dt, LaxOleinikOptions opt)
    : spec_(std::move(spec)), dt_(dt), opt_(opt) {
  require_valid(spec_);
  if (!(dt > 0)) throw DomainError("time step must be positive");
  if (opt_.stencil < 1 || opt_.sublattice < 1) throw DomainError("stencil parameters must be >= 1");
  grid_ = std::make_shared<const SimplexGrid>(M, spec_.d);
  dt_max_ = lax_oleinik_dt_max(spec_, M, opt_.stencil);
  if (opt_.check_cfl && dt_ > dt_max_ * (1.0 + 1e-12))
    throw DomainError("time step " + std::to_string(dt_) + " exceeds dt_max " +
                      std::to_string(dt_max_));
  if (spec_.d == 2)
    half_ = std::make_unique<HalfSpinModel>(HalfSpinModel::from_spec(spec_));
  else
    build_tables();
}

double LaxOleinikScheme::cost_d2(double m, double y) const {
  const double M = grid_->N();
  const double m0 = (M - 2.0 * y) / M;
  const double mid = 0.5 * (m + m0);
  const double a = half_->lambda * std::sqrt(std::max(0.0, 1.0 - mid * mid));
  const ExtendedReal l0 = cosh_conjugate(0.5 * (m - m0) / dt_, a);
  if (!l0.finite()) return kInf;  // comparison only, never summed with a finite cost
  return dt_ * (l0.value() + half_->V(mid));
}

Eigen::VectorXd LaxOleinikScheme::step_d2(const Eigen::VectorXd& u) const {
  const int M = grid_->N();
  const int S = opt_.stencil;
  Eigen::VectorXd out(M + 1);
  bool empty = false;
#pragma omp parallel for schedule(static) num_threads(worker_threads()) if (M > 2000)
  for (int i = 0; i <= M; ++i) {
    const double m = static_cast<double>(M - 2 * i) / M;
    const int lo = std::max(0, i - S), hi = std::min(M, i + S);
    auto J = [&](int j, double y) {
      const double f = y - j;
      const double c = cost_d2(m, y);
      return c == kInf ? kInf : (1.0 - f) * u(j) + f * u(j + 1) + c;
    };
    double best = kInf;
    for (int j = lo; j <= hi; ++j) {
      const double c = cost_d2(m, j);
      if (c != kInf) best = std::min(best, u(j) + c);
    }
    for (int j = lo; j < hi; ++j) {
      double a = j, b = j + 1.0;
      double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
      double f1 = J(j, x1), f2 = J(j, x2);
      for (int it = 0; it < opt_.golden_iters; ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - kGolden * (b - a);
          f1 = J(j, x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + kGolden * (b - a);
          f2 = J(j, x2);
        }
      }
      best = std::min(best, std::min(f1, f2));
    }
    if (best == kInf) empty = true;
    out(i) = best;
  }
  if (empty) throw DomainError("empty feasible stencil");
  return out;
}

void LaxOleinikScheme::build_tables() {
  const int d = spec_.d;
  const int q = opt_.sublattice;
  const int R = opt_.stencil * q;
  const int M = grid_->N();
  // displacements k (in units of 1/q counts) with sum 0 and graph distance <= S
  std::vector<Eigen::VectorXi> disp;
  Eigen::VectorXi k = Eigen::VectorXi::Constant(d, -R);
  while (true) {
    if (k.sum() == 0 && k.cwiseAbs().sum() <= 2 * R) disp.push_back(k);
    int p = 0;
    while (p < d && k(p) == R) k(p++) = -R;
    if (p == d) break;
    ++k(p);
  }
  cand_.assign(grid_->size(), {});
  bool empty = false;
  ExceptionGuard guard;
#pragma omp parallel for schedule(dynamic, 16) num_threads(worker_threads())
  for (Eigen::Index i = 0; i < grid_->size(); ++i) guard.run([&] {
    const Eigen::VectorXi c = grid_->counts(i);
    const Eigen::VectorXd m = c.cast<double>() / M;
    for (const auto& kv : disp) {
      const Eigen::VectorXi Y = q * c - kv;  // foot counts times q
      if (Y.minCoeff() < 0) continue;
      const Eigen::VectorXd m0 = Y.cast<double>() / (double(q) * M);
      Eigen::VectorXd mid = 0.5 * (m + m0);
      mid /= mid.sum();
      const Eigen::VectorXd v = kv.cast<double>() / (double(q) * M * dt_);
      const ExtendedReal l0 = free_lagrangian(spec_, mid, v);
      if (!l0.finite()) continue;
      Candidate cd;
      cd.cost = dt_ * (l0.value() + effective_potential(spec_, mid));
      // Kuhn interpolation in cumulative coordinates z_j = sum_{a <= j} y_a
      std::vector<long> base(d - 1);
      std::vector<double> frac(d - 1);
      long Z = 0;
      for (int j = 0; j + 1 < d; ++j) {
        Z += Y(j);
        base[j] = floor_div(Z, q);
        frac[j] = static_cast<double>(Z - q * base[j]) / q;
      }
      std::vector<int> order(d - 1);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
      std::vector<long> z = base;
      auto push = [&](double w) {
        if (w <= 0) return;
        Eigen::VectorXi cnt(d);
        long prev = 0;
        for (int j = 0; j + 1 < d; ++j) {
          cnt(j) = static_cast<int>(z[j] - prev);
          prev = z[j];
        }
        cnt(d - 1) = static_cast<int>(M - prev);
        cd.at.push_back(grid_->index(cnt));
        cd.w.push_back(w);
      };
      push(1.0 - frac[order[0]]);
      for (int t = 0; t + 1 < d; ++t) {
        z[order[t]] += 1;
        const double next = t + 2 < d ? frac[order[t + 1]] : 0.0;
        push(frac[order[t]] - next);
      }
      cand_[i].push_back(std::move(cd));
    }
    if (cand_[i].empty()) empty = true;
  });
  guard.rethrow();
  if (empty) throw DomainError("empty feasible stencil");
}

Eigen::VectorXd LaxOleinikScheme::step_general(const Eigen::VectorXd& u) const {
  const Eigen::Index n = grid_->size();
  Eigen::VectorXd out(n);
#pragma omp parallel for schedule(static) num_threads(worker_threads()) if (n > 2000)
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = kInf;
    for (const auto& cd : cand_[i]) {
      double val = cd.cost;
      for (std::size_t t = 0; t < cd.at.size(); ++t) val += cd.w[t] * u(cd.at[t]);
      best = std::min(best, val);
    }
    out(i) = best;
  }
  return out;
}

Eigen::VectorXd LaxOleinikScheme::one_step(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != grid_->size()) throw DomainError("value vector does not match the grid");
  const Eigen::VectorXd uu = u;
  return spec_.d == 2 ? step_d2(uu) : step_general(uu);
}

Eigen::VectorXd LaxOleinikScheme::evolve(const Eigen::Ref<const Eigen::VectorXd>& u,
                                         double T) const {
  if (T < 0) throw DomainError("evolution time must be nonnegative");
  const double ks = T / dt_;
  const long k = std::lround(ks);
  if (std::abs(ks - k) > 1e-9 * std::max(1.0, ks))
    throw DomainError("T must be an integer multiple of dt");
  Eigen::VectorXd v = u;
  for (long s = 0; s < k; ++s) v = one_step(v);
  return v;
}

ValueGrid one_step(const LaxOleinikScheme& scheme, const ValueGrid& vg) {
  return {scheme.grid_ptr(), scheme.one_step(vg.values), scheme.dt()};
}

ValueGrid evolve(const LaxOleinikScheme& scheme, const ValueGrid& vg, double T) {
  return {scheme.grid_ptr(), scheme.evolve(vg.values, T), scheme.dt()};
}

double fixed_point_residual(const LaxOleinikScheme& scheme,
                            const Eigen::Ref<const Eigen::VectorXd>& psi, double r1, double T) {
  const Eigen::VectorXd U = scheme.evolve(psi, T);
  const auto& grid = scheme.grid();
  double res = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid.counts(i).minCoeff() == 0) continue;
    res = std::max(res, std::abs(U(i) - T * r1 - psi(i)));
  }
  return res;
}

ContainmentReport minima_containment(const ModelSpec& spec, const SimplexGrid& grid,
                                     const Eigen::Ref<const Eigen::VectorXd>& values,
                                     double mesh_factor) {
  const Eigen::Index n = grid.size();
  Eigen::VectorXd V(n);
  for (Eigen::Index i = 0; i < n; ++i) V(i) = effective_potential(spec, grid.coords(i));
  auto is_local_min = [&](const Eigen::VectorXd& f, Eigen::Index i) {
    for (const auto& nb : grid.neighbors(i))
      if (f(nb.target) < f(i)) return false;
    return true;
  };
  const double vmin = V.minCoeff();
  std::vector<Eigen::Index> vmins;
  for (Eigen::Index i = 0; i < n; ++i)
    if (V(i) <= vmin + 1e-4 * (1.0 + std::abs(vmin)) && is_local_min(V, i)) vmins.push_back(i);
  ContainmentReport rep;
  const Eigen::VectorXd u = values;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_local_min(u, i)) continue;
    rep.local_minima.push_back(i);
    const bool boundary = grid.counts(i).minCoeff() == 0;
    rep.on_boundary.push_back(boundary);
    double dist = kInf;
    for (Eigen::Index j : vmins)
      dist = std::min(dist, (grid.coords(i) - grid.coords(j)).cwiseAbs().maxCoeff());
    rep.distance_to_argmin_V.push_back(dist);
    rep.interior = rep.interior && !boundary;
    rep.within_mesh = rep.within_mesh && dist <= mesh_factor / grid.N() + 1e-15;
  }
  return rep;
}

Eigen::VectorXd sample_on_grid(const PsiFunction& psi, const SimplexGrid& grid) {
  if (grid.d() != 2) throw DomainError("analytic profile needs two labels");
  std::vector<double> ms(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) ms[i] = grid_magnetization(grid, i);
  const auto vals = psi(ms);
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace mfgs
