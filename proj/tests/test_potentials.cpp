#include <doctest.h>

#include <cmath>
#include <random>

#include "mfgs/error.hpp"
#include "mfgs/potentials.hpp"
#include "test_support.hpp"

using namespace mfgs;
using doctest::Approx;

namespace {

ModelSpec potts(int d, double rate) {
  Polynomial F(d);
  for (int a = 0; a < d; ++a) {
    std::vector<int> e(d, 0);
    e[a] = 2;
    F.add_term(e, 0.5);
  }
  return complete_graph_model(d, rate, F);
}

// sup over a fine grid then golden refinement of v t - a (cosh(2t) - 1)
double grid_conjugate_d2(double v, double a) {
  double best_t = 0.0, best = 0.0;
  for (int k = -40000; k <= 40000; ++k) {
    const double t = k * 1e-4;
    const double val = v * t - a * (std::cosh(2 * t) - 1);
    if (val > best) best = val, best_t = t;
  }
  double lo = best_t - 1e-4, hi = best_t + 1e-4;
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  for (int it = 0; it < 100; ++it) {
    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    const double f1 = v * x1 - a * (std::cosh(2 * x1) - 1), f2 = v * x2 - a * (std::cosh(2 * x2) - 1);
    (f1 > f2 ? hi : lo) = f1 > f2 ? x2 : x1;
  }
  const double t = 0.5 * (lo + hi);
  return v * t - a * (std::cosh(2 * t) - 1);
}

}  // namespace

TEST_SUITE("potentials") {
  TEST_CASE("effective potential values") {
    const ModelSpec cw = curie_weiss(0.5);
    CHECK(effective_potential(cw, simplex_from_magnetization(0.0)) == Approx(0.0));
    for (double s : {-1.0, 1.0})
      CHECK(effective_potential(cw, simplex_from_magnetization(s * std::sqrt(0.75))) ==
            Approx(-0.125).epsilon(1e-12));
    const ModelSpec free3 = complete_graph_model(3, 0.8, Polynomial(3));
    CHECK(effective_potential(free3, Eigen::Vector3d::Constant(1.0 / 3)) == Approx(0.0));
    // closed form of the two-label case: lam - lam sqrt(1-m^2) - F
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      const double m = u(rng);
      CHECK(effective_potential(cw, simplex_from_magnetization(m)) ==
            Approx(0.5 - 0.5 * std::sqrt(1 - m * m) - 0.5 * m * m).epsilon(1e-12));
    }
  }

  TEST_CASE("finite-size correction") {
    const Eigen::Vector2d mid(0.5, 0.5);
    CHECK(finite_size_correction(curie_weiss(1.0), 100, mid) == Approx(9.9504e-3).epsilon(1e-4));
    CHECK(finite_size_correction(curie_weiss(1.0, SpinConvention::kSpinOperator), 100, mid) ==
          Approx(4.9752e-3).epsilon(1e-4));
    CHECK(finite_size_correction(curie_weiss(1.0), 100, Eigen::Vector2d(0.0, 1.0)) > 0.0);
    const double x100 = finite_size_correction(curie_weiss(1.0), 100, mid);
    const double x200 = finite_size_correction(curie_weiss(1.0), 200, mid);
    CHECK(x100 / x200 == Approx(2.0).epsilon(0.05));
    // kappa / (2 N min sqrt(m)) bound on interior points
    std::mt19937_64 rng(8);
    const ModelSpec p3 = potts(3, 0.7);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd m = test::random_simplex_point(rng, 3, 0.01);
      const double xi = finite_size_correction(p3, 50, m);
      CHECK(xi >= 0.0);
      CHECK(xi <= p3.kernel.sum() / (2 * 50 * m.cwiseSqrt().minCoeff()));
    }
  }

  TEST_CASE("tilted potential") {
    const ModelSpec cw = curie_weiss(0.5);
    const SimplexGrid grid(12, 2);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
    Eigen::VectorXd g(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) g(i) = std::exp(-0.5 * grid.log_mu(i));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd m = grid.coords(i);
      CHECK(tilted_potential(cw, grid, ones, i) == Approx(eval_F(cw, m)).epsilon(1e-14));
      const double fg = tilted_potential(cw, grid, i);
      CHECK(std::abs(fg + effective_potential(cw, m) - finite_size_correction(cw, 12, m)) < 1e-10);
      CHECK(tilted_potential(cw, grid, g, i) == Approx(fg).epsilon(1e-12));
    }
    // N = 4, m = (1/2, 1/2): explicit multinomial ratios, g = 1/sqrt(mu)
    const SimplexGrid g4(4, 2);
    const Eigen::Index i = g4.index(Eigen::Vector2i(2, 2));
    const double c22 = 6, c13 = 4;  // binomial(4,2), binomial(4,1)
    const double expect = 2 * 0.5 * 0.5 * (std::sqrt(c22 / c13) - 1) + 0.0;
    CHECK(tilted_potential(cw, g4, i) == Approx(expect).epsilon(1e-14));
    Eigen::VectorXd bad = Eigen::VectorXd::Ones(g4.size());
    bad(0) = 0.0;
    CHECK_THROWS_AS(tilted_potential(cw, g4, bad, i), DomainError);
  }

  TEST_CASE("Hamiltonians") {
    const double lam = 0.5;
    const ModelSpec cw = curie_weiss(lam);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 30; ++k) {
      const double m = u(rng), t = 2 * u(rng);
      const Eigen::Vector2d mm = simplex_from_magnetization(m);
      const double expect = lam * std::sqrt(1 - m * m) * std::cosh(2 * t) - lam + 0.5 * m * m;
      CHECK(hamiltonian(cw, mm, Eigen::Vector2d(-t, t)) == Approx(expect).epsilon(1e-12));
      CHECK(hamiltonian(cw, mm, Eigen::Vector2d::Zero()) ==
            Approx(-effective_potential(cw, mm)).epsilon(1e-12));
    }
    const ModelSpec p3 = potts(3, 0.6);
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd m = test::random_simplex_point(rng, 3);
      const Eigen::VectorXd th = test::random_velocity(rng, 3, 1.0);
      const double c = 3 * u(rng);
      CHECK(free_hamiltonian(p3, m, th.array() + c) ==
            Approx(free_hamiltonian(p3, m, th)).epsilon(1e-12));
      CHECK(free_hamiltonian(p3, m, Eigen::VectorXd::Constant(3, c)) == Approx(0.0));
    }
  }

  TEST_CASE("free Hamiltonian is convex and its gradient matches finite differences") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d : {2, 3, 4}) {
      const ModelSpec spec = potts(d, 0.9);
      for (int k = 0; k < 100; ++k) {
        const Eigen::VectorXd m = test::random_simplex_point(rng, d);
        const Eigen::VectorXd a = test::random_velocity(rng, d, 1.0);
        const Eigen::VectorXd b = test::random_velocity(rng, d, 1.0);
        const double mid = free_hamiltonian(spec, m, 0.5 * (a + b));
        CHECK(mid <= 0.5 * (free_hamiltonian(spec, m, a) + free_hamiltonian(spec, m, b)) + 1e-14);
        if (k < 20) {
          const Eigen::VectorXd g = free_hamiltonian_gradient(spec, m, a);
          const Eigen::VectorXd fd = test::fd_gradient(spec, m, a);
          CHECK((g - fd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));
        }
      }
    }
  }

  TEST_CASE("free Lagrangian") {
    const ModelSpec cw = curie_weiss(1.0);
    const Eigen::Vector2d mid(0.5, 0.5);
    CHECK(free_lagrangian(cw, mid, Eigen::Vector2d::Zero()).value() == 0.0);
    // magnetization velocity 2 sinh(1) is simplex velocity (-sinh 1, sinh 1)
    const double s = std::sinh(1.0);
    const ExtendedReal l = free_lagrangian(cw, mid, Eigen::Vector2d(-s, s));
    CHECK(l.value() == Approx(1 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(grid_conjugate_d2(2 * s, 1.0) == Approx(1 - std::exp(-1.0)).epsilon(1e-10));
    CHECK(free_lagrangian(cw, mid, Eigen::Vector2d(0.1, 0.0)).is_pos_inf());
    // mass cannot leave an empty label at the boundary
    CHECK(free_lagrangian(cw, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(-0.1, 0.1)).is_pos_inf());
    CHECK(free_lagrangian(cw, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d::Zero()).value() == 0.0);
  }

  TEST_CASE("two-label closed form") {
    const ModelSpec cw = curie_weiss(1.0);
    CHECK(free_lagrangian_closed_form(cw, 0.0, 0.0).value() == 0.0);
    CHECK(free_lagrangian_closed_form(cw, 0.0, 2 * std::sinh(1.0)).value() ==
          Approx(1 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(free_lagrangian_closed_form(cw, 1.0, 0.3).is_pos_inf());
    CHECK(free_lagrangian_closed_form(cw, 1.0, 0.0).value() == 0.0);
    CHECK_THROWS_AS(free_lagrangian_closed_form(potts(3, 1.0), 0.0, 0.0), DomainError);
    // |v| log |v| growth: ratio to (v/2) log v tends to 1
    const double r3 = free_lagrangian_closed_form(cw, 0.0, 1e3).value() / (0.5e3 * std::log(1e3));
    const double r4 = free_lagrangian_closed_form(cw, 0.0, 1e4).value() / (0.5e4 * std::log(1e4));
    CHECK(std::abs(r4 - 1) < std::abs(r3 - 1));
    CHECK(std::abs(r4 - 1) < 0.15);
    // agrees with the numeric transform and with direct maximization
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const ModelSpec cw5 = curie_weiss(0.5);
    for (int k = 0; k < 200; ++k) {
      const double m = 0.999 * u(rng), v = 3 * u(rng);
      const double closed = free_lagrangian_closed_form(cw5, m, v).value();
      const double numeric =
          free_lagrangian(cw5, simplex_from_magnetization(m), Eigen::Vector2d(-v / 2, v / 2)).value();
      CHECK(std::abs(closed - numeric) <= 1e-9);
      if (k < 10) CHECK(closed == Approx(grid_conjugate_d2(v, 0.5 * std::sqrt(1 - m * m))).epsilon(1e-9));
    }
  }

  TEST_CASE("Lagrangian and the r1 identity") {
    const ModelSpec cw = curie_weiss(0.5);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd m = test::random_simplex_point(rng, 2);
      CHECK(lagrangian(cw, m, Eigen::Vector2d::Zero()).value() ==
            Approx(effective_potential(cw, m)).epsilon(1e-14));
    }
    const Eigen::Vector2d star = simplex_from_magnetization(std::sqrt(0.75));
    CHECK(lagrangian(cw, star, Eigen::Vector2d::Zero()).value() == Approx(-0.125).epsilon(1e-12));
    // min over (m, v) of L equals -max_m H(m, 0)
    double minL = 1e300, maxH = -1e300;
    for (int i = 0; i <= 2000; ++i) {
      const Eigen::Vector2d m = simplex_from_magnetization(-1.0 + i * 1e-3);
      maxH = std::max(maxH, hamiltonian(cw, m, Eigen::Vector2d::Zero()));
      for (double v : {-0.2, -0.05, 0.0, 0.05, 0.2}) {
        const ExtendedReal l = lagrangian(cw, m, Eigen::Vector2d(-v, v));
        if (l.finite()) minL = std::min(minL, l.value());
      }
    }
    CHECK(minL == Approx(-maxH).epsilon(1e-12));
    CHECK(minL == Approx(-0.125).epsilon(1e-5));
  }

  TEST_CASE("lower bound") {
    const ModelSpec cw = curie_weiss(0.5);
    const Eigen::Vector2d m(0.3, 0.7);
    const double r0 = label_rate(cw, m, 0);
    Eigen::Vector2d v(-std::exp(1.0) * r0, std::exp(1.0) * r0);
    CHECK(std::abs(free_lagrangian_lower_bound(cw, m, v, 0).value()) < 1e-14);
    CHECK(free_lagrangian_lower_bound(cw, m, Eigen::Vector2d(-0.5 * r0, 0.5 * r0), 0).is_neg_inf());
    const Eigen::Vector2d v10(-10 * r0, 10 * r0);
    const double mag = 20 * r0;
    CHECK(free_lagrangian_lower_bound(cw, m, v10, 0).value() <
          free_lagrangian_closed_form(cw, magnetization(m), mag).value());
    CHECK(free_lagrangian_lower_bound(cw, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.1, -0.1), 0)
              .is_pos_inf());
    CHECK(free_lagrangian_lower_bound(cw, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d::Zero(), 0)
              .value() == 0.0);
  }

  TEST_CASE("flow bounds") {
    const ModelSpec cw = curie_weiss(0.5);
    const Eigen::Vector2d m(0.4, 0.6);
    CHECK(free_lagrangian_flow_bound(cw, m, Eigen::Vector2d::Zero()).value() == 0.0);
    const Eigen::Vector2d v(-0.3, 0.3);
    const Eigen::MatrixXd f = tree_flow(cw, m, v);
    CHECK(f(0, 1) == Approx(0.3));
    CHECK(f(1, 0) == Approx(-0.3));
    CHECK(free_lagrangian_flow_bound(cw, m, v).value() ==
          Approx(free_lagrangian(cw, m, v).value()).epsilon(1e-9));

    std::mt19937_64 rng(17);
    const ModelSpec p3 = potts(3, 0.6);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd mm = test::random_simplex_point(rng, 3);
      const Eigen::VectorXd vv = test::random_velocity(rng, 3, 0.5);
      const Eigen::MatrixXd ff = tree_flow(p3, mm, vv);
      CHECK((ff + ff.transpose()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK((ff.colwise().sum().transpose() - vv).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(free_lagrangian_flow_bound(p3, mm, vv) <= free_lagrangian_flow_bound_appendix(p3, mm, vv));
    }
    // boundary: zero-weight edges carry no flow
    CHECK(free_lagrangian_flow_bound(p3, Eigen::Vector3d(0.0, 0.5, 0.5), Eigen::Vector3d(0.2, -0.1, -0.1))
              .is_pos_inf());
  }

  TEST_CASE("sandwich, nonnegativity and biconjugacy") {
    std::mt19937_64 rng(1234);
    for (int d : {2, 3}) {
      const ModelSpec spec = d == 2 ? curie_weiss(0.5) : potts(3, 0.5);
      for (int k = 0; k < 200; ++k) {
        const Eigen::VectorXd m = test::random_simplex_point(rng, d);
        const Eigen::VectorXd v = test::random_velocity(rng, d, 1.0);
        const LegendreResult r = free_lagrangian_argmax(spec, m, v);
        const double L = r.value.value();
        CHECK(L > 0.0);
        for (int a = 0; a < d; ++a) CHECK(free_lagrangian_lower_bound(spec, m, v, a) <= L + 1e-12);
        CHECK(L <= free_lagrangian_flow_bound(spec, m, v).value() + 1e-12);
        const double H = free_hamiltonian(spec, m, r.theta);
        CHECK(std::abs(test::biconjugate(spec, m, r.theta) - H) <= 1e-6);
        // Fenchel-Young for nearby velocities
        const Eigen::VectorXd w = v + test::random_velocity(rng, d, 0.1);
        CHECK(w.dot(r.theta) - free_lagrangian(spec, m, w).value() <= H + 1e-10);
      }
    }
  }

  TEST_CASE("cosh conjugate edge cases") {
    CHECK(cosh_conjugate(0.0, 0.0).value() == 0.0);
    CHECK(cosh_conjugate(1.0, 0.0).is_pos_inf());
    CHECK_THROWS_AS(cosh_conjugate(1.0, -1.0), DomainError);
    // symmetric in phi, tiny phi ~ phi^2 / (2a)
    CHECK(cosh_conjugate(-0.7, 1.3).value() == Approx(cosh_conjugate(0.7, 1.3).value()));
    CHECK(cosh_conjugate(1e-6, 2.0).value() == Approx(1e-12 / 4.0).epsilon(1e-6));
  }
}
