#include "mfgs/potentials.hpp"

#include <cmath>
#include <vector>

#include "mfgs/error.hpp"

namespace mfgs {

namespace {

void check_point(const ModelSpec& spec, const VecRef& m) { require_on_simplex(m, spec.d); }

Eigen::VectorXd sqrt_clamped(const VecRef& m) { return m.cwiseMax(0.0).cwiseSqrt(); }

// Connected components of {w > 0}; returns component id per label.
std::vector<int> components(const Eigen::MatrixXd& w, int& ncomp) {
  const int d = static_cast<int>(w.rows());
  std::vector<int> comp(d, -1);
  ncomp = 0;
  for (int s = 0; s < d; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < d; ++b)
        if (comp[b] < 0 && w(a, b) > 0) {
          comp[b] = ncomp;
          stack.push_back(b);
        }
    }
    ++ncomp;
  }
  return comp;
}

}  // namespace

Eigen::MatrixXd edge_weights(const ModelSpec& spec, const VecRef& m) {
  const Eigen::VectorXd s = sqrt_clamped(m);
  return (s * s.transpose()).cwiseProduct(spec.kernel);
}

double label_rate(const ModelSpec& spec, const VecRef& m, int alpha) {
  const Eigen::VectorXd s = sqrt_clamped(m);
  return s(alpha) * spec.kernel.row(alpha).dot(s);
}

double effective_potential(const ModelSpec& spec, const VecRef& m) {
  check_point(spec, m);
  const Eigen::VectorXd s = sqrt_clamped(m);
  double surf = 0.0;
  for (int a = 0; a < spec.d; ++a)
    for (int b = 0; b < spec.d; ++b) {
      const double diff = s(b) - s(a);
      surf += spec.kernel(a, b) * diff * diff;
    }
  return 0.5 * surf - eval_F(spec, m);
}

double finite_size_correction(const ModelSpec& spec, int N, const VecRef& m) {
  check_point(spec, m);
  if (N < 1) throw DomainError("N must be positive");
  const Eigen::VectorXd s = sqrt_clamped(m);
  double xi = 0.0;
  for (int a = 0; a < spec.d; ++a)
    for (int b = 0; b < spec.d; ++b) {
      if (spec.kernel(a, b) == 0.0) continue;
      const double mb = std::max(m(b), 0.0);
      // sqrt(x + h) - sqrt(x) without cancellation
      const double inc = (1.0 / N) / (std::sqrt(mb + 1.0 / N) + s(b));
      xi += spec.kernel(a, b) * s(a) * inc;
    }
  return xi;
}

double tilted_potential(const ModelSpec& spec, const SimplexGrid& grid, const VecRef& g,
                        Eigen::Index i) {
  if (g.size() != grid.size()) throw DomainError("tilt must be sampled on the grid");
  if (!(g.minCoeff() > 0)) throw DomainError("tilt g must be strictly positive");
  const auto c = grid.counts(i);
  const double N = grid.N();
  double acc = 0.0;
  for (int a = 0; a < spec.d; ++a) {
    if (c(a) == 0) continue;
    for (int b = 0; b < spec.d; ++b) {
      if (b == a || spec.kernel(a, b) == 0.0) continue;
      const Eigen::Index j = grid.step(i, a, b);
      acc += spec.kernel(a, b) * (c(a) / N) * (g(j) / g(i) - 1.0);
    }
  }
  return acc + eval_F(spec, grid.coords(i));
}

double tilted_potential(const ModelSpec& spec, const SimplexGrid& grid, Eigen::Index i) {
  const auto c = grid.counts(i);
  const double N = grid.N();
  double acc = 0.0;
  for (int a = 0; a < spec.d; ++a) {
    if (c(a) == 0) continue;
    for (int b = 0; b < spec.d; ++b) {
      if (b == a || spec.kernel(a, b) == 0.0) continue;
      acc += spec.kernel(a, b) * (std::sqrt(double(c(a)) * (c(b) + 1.0)) - c(a)) / N;
    }
  }
  return acc + eval_F(spec, grid.coords(i));
}

double free_hamiltonian(const ModelSpec& spec, const VecRef& m, const VecRef& theta) {
  const Eigen::MatrixXd w = edge_weights(spec, m);
  double h = 0.0;
  for (int a = 0; a < spec.d; ++a)
    for (int b = 0; b < spec.d; ++b)
      if (w(a, b) != 0.0) {
        // cosh(x) - 1 = 2 sinh^2(x/2), exact near 0
        const double s = std::sinh(0.5 * (theta(b) - theta(a)));
        h += w(a, b) * 2.0 * s * s;
      }
  return h;
}

Eigen::VectorXd free_hamiltonian_gradient(const ModelSpec& spec, const VecRef& m,
                                          const VecRef& theta) {
  const Eigen::MatrixXd w = edge_weights(spec, m);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(spec.d);
  for (int a = 0; a < spec.d; ++a)
    for (int b = 0; b < spec.d; ++b)
      if (w(a, b) != 0.0) g(a) += 2.0 * w(a, b) * std::sinh(theta(a) - theta(b));
  return g;
}

Eigen::MatrixXd free_hamiltonian_hessian(const ModelSpec& spec, const VecRef& m,
                                         const VecRef& theta) {
  const Eigen::MatrixXd w = edge_weights(spec, m);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(spec.d, spec.d);
  for (int a = 0; a < spec.d; ++a)
    for (int b = 0; b < spec.d; ++b)
      if (a != b && w(a, b) != 0.0) {
        const double c = 2.0 * w(a, b) * std::cosh(theta(a) - theta(b));
        H(a, b) -= c;
        H(a, a) += c;
      }
  return H;
}

double hamiltonian(const ModelSpec& spec, const VecRef& m, const VecRef& theta) {
  return free_hamiltonian(spec, m, theta) - effective_potential(spec, m);
}

LegendreResult free_lagrangian_argmax(const ModelSpec& spec, const VecRef& m, const VecRef& v,
                                      const LegendreOptions& opt) {
  check_point(spec, m);
  const int d = spec.d;
  if (v.size() != d) throw DomainError("velocity has wrong dimension");
  LegendreResult res;
  res.theta = Eigen::VectorXd::Zero(d);
  const double vscale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if (std::abs(v.sum()) > opt.constraint_tol * std::max(1.0, v.lpNorm<1>())) {
    res.value = ExtendedReal::pos_inf();
    return res;
  }
  const Eigen::MatrixXd w = edge_weights(spec, m);
  int ncomp = 0;
  const auto comp = components(w, ncomp);
  // one pinned label per component (its last member); mass cannot cross components
  std::vector<int> pinned(ncomp, -1);
  Eigen::VectorXd comp_sum = Eigen::VectorXd::Zero(ncomp);
  for (int a = 0; a < d; ++a) {
    pinned[comp[a]] = a;
    comp_sum(comp[a]) += v(a);
  }
  for (int c = 0; c < ncomp; ++c)
    if (std::abs(comp_sum(c)) > opt.constraint_tol * std::max(1.0, v.lpNorm<1>())) {
      res.value = ExtendedReal::pos_inf();
      return res;
    }
  std::vector<int> free;
  for (int a = 0; a < d; ++a)
    if (pinned[comp[a]] != a) free.push_back(a);
  const int k = static_cast<int>(free.size());
  if (k == 0) {
    res.value = 0.0;
    return res;
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  auto objective = [&](const Eigen::VectorXd& th) {
    return v.dot(th) - free_hamiltonian(spec, m, th);
  };
  auto reduced_gradient = [&](const Eigen::VectorXd& th) {
    const Eigen::VectorXd gfull = v - free_hamiltonian_gradient(spec, m, th);
    Eigen::VectorXd g(k);
    for (int i = 0; i < k; ++i) g(i) = gfull(free[i]);
    return g;
  };
  double phi = objective(theta);
  for (int it = 0; it <= opt.max_iter; ++it) {
    const Eigen::VectorXd g = reduced_gradient(theta);
    const double gnorm = g.cwiseAbs().maxCoeff();
    if (gnorm <= opt.grad_tol * vscale) {
      res.theta = theta;
      res.value = phi;
      res.iterations = it;
      return res;
    }
    if (it == opt.max_iter) throw ConvergenceError("Legendre transform did not converge", gnorm);
    const Eigen::MatrixXd Hfull = free_hamiltonian_hessian(spec, m, theta);
    Eigen::MatrixXd H(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) H(i, j) = Hfull(free[i], free[j]);
    const Eigen::VectorXd step = H.ldlt().solve(g);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < k; ++i) dir(free[i]) = step(i);
    const double slope = g.dot(step);
    double t = 1.0;
    Eigen::VectorXd trial = theta + dir;
    double phi_trial = objective(trial);
    // close to the optimum the objective gain drops below rounding; judge the full step by the gradient
    const bool full_ok = phi_trial >= phi + 1e-4 * slope ||
                         reduced_gradient(trial).cwiseAbs().maxCoeff() < 0.5 * gnorm;
    while (!full_ok && !(phi_trial >= phi + 1e-4 * t * slope) && t > 1e-30) {
      t *= 0.5;
      trial = theta + t * dir;
      phi_trial = objective(trial);
    }
    if (!full_ok && !(phi_trial >= phi)) {
      // no ascent possible within rounding; treat as converged
      res.theta = theta;
      res.value = phi;
      res.iterations = it;
      return res;
    }
    theta = trial;
    phi = phi_trial;
    if (theta.norm() > opt.divergence_norm) {
      res.theta = theta;
      res.value = ExtendedReal::pos_inf();
      res.iterations = it + 1;
      return res;
    }
  }
  throw ConvergenceError("Legendre transform did not converge", 0.0);
}

ExtendedReal free_lagrangian(const ModelSpec& spec, const VecRef& m, const VecRef& v,
                             const LegendreOptions& opt) {
  return free_lagrangian_argmax(spec, m, v, opt).value;
}

ExtendedReal cosh_conjugate(double phi, double a) {
  if (a < 0) throw DomainError("negative rate in conjugate");
  if (a == 0.0) return phi == 0.0 ? ExtendedReal(0.0) : ExtendedReal::pos_inf();
  const double r = std::hypot(phi, a);
  return phi * std::asinh(phi / a) - phi * phi / (r + a);
}

ExtendedReal free_lagrangian_closed_form(const ModelSpec& spec, double m, double v) {
  if (spec.d != 2) throw DomainError("closed form needs two labels");
  if (std::abs(m) > 1.0 + kSimplexTol) throw DomainError("magnetization outside [-1, 1]");
  const double a = spec.kernel(0, 1) * std::sqrt(std::max(0.0, 1.0 - m * m));
  return cosh_conjugate(0.5 * v, a);
}

ExtendedReal lagrangian(const ModelSpec& spec, const VecRef& m, const VecRef& v) {
  const ExtendedReal l0 = free_lagrangian(spec, m, v);
  if (!l0.finite()) return l0;
  return l0.value() + effective_potential(spec, m);
}

ExtendedReal free_lagrangian_lower_bound(const ModelSpec& spec, const VecRef& m, const VecRef& v,
                                         int alpha) {
  check_point(spec, m);
  const double rate = label_rate(spec, m, alpha);
  const double va = std::abs(v(alpha));
  if (rate == 0.0) return va == 0.0 ? ExtendedReal(0.0) : ExtendedReal::pos_inf();
  if (va < rate) return ExtendedReal::neg_inf();
  return va * (std::log(va / rate) - 1.0);
}

Eigen::MatrixXd tree_flow(const ModelSpec& spec, const VecRef& m, const VecRef& v) {
  const int d = spec.d;
  const Eigen::MatrixXd w = edge_weights(spec, m);
  std::vector<int> parent(d, -1), order{0};
  std::vector<char> in(d, 0);
  in[0] = 1;
  while (static_cast<int>(order.size()) < d) {
    int pick = -1, from = -1;
    for (int pass = 0; pass < 2 && pick < 0; ++pass)
      for (int a : order) {
        for (int b = 0; b < d; ++b)
          if (!in[b] && (pass == 0 ? w(a, b) > 0 : spec.kernel(a, b) > 0)) {
            pick = b;
            from = a;
            break;
          }
        if (pick >= 0) break;
      }
    if (pick < 0) throw ModelError("kernel not irreducible");
    in[pick] = 1;
    parent[pick] = from;
    order.push_back(pick);
  }
  Eigen::VectorXd subtree = v;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
  for (int i = d - 1; i >= 1; --i) {
    const int c = order[i], p = parent[c];
    f(p, c) = subtree(c);
    f(c, p) = -subtree(c);
    subtree(p) += subtree(c);
  }
  return f;
}

ExtendedReal free_lagrangian_flow_bound(const ModelSpec& spec, const VecRef& m, const VecRef& v) {
  check_point(spec, m);
  const Eigen::MatrixXd f = tree_flow(spec, m, v);
  const Eigen::MatrixXd w = edge_weights(spec, m);
  double total = 0.0;
  for (int a = 0; a < spec.d; ++a)
    for (int b = a + 1; b < spec.d; ++b) {
      const ExtendedReal t = cosh_conjugate(f(a, b), 2.0 * w(a, b));
      if (!t.finite()) return t;
      total += t.value();
    }
  return total;
}

ExtendedReal free_lagrangian_flow_bound_appendix(const ModelSpec& spec, const VecRef& m,
                                                 const VecRef& v) {
  check_point(spec, m);
  const Eigen::MatrixXd f = tree_flow(spec, m, v);
  const Eigen::MatrixXd w = edge_weights(spec, m);
  double total = 0.0;
  for (int a = 0; a < spec.d; ++a) {
    total += label_rate(spec, m, a);
    for (int b = 0; b < spec.d; ++b) {
      if (a == b || f(a, b) == 0.0) continue;
      if (w(a, b) == 0.0) return ExtendedReal::pos_inf();
      const double af = std::abs(f(a, b));
      total += 0.5 * af * std::log1p(af / w(a, b));
    }
  }
  return total;
}

}  // namespace mfgs
