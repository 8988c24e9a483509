#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "mfgs/error.hpp"
#include "mfgs/hj_halfspin.hpp"
#include "mfgs/spectral.hpp"

using namespace mfgs;
using doctest::Approx;

namespace {

// Dense symmetric spectrum of an assembled operator, ascending.
Eigen::VectorXd dense_spectrum(const OperatorMatrix& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Dense semigroup e^{T S} v for symmetric S.
Eigen::VectorXd dense_semigroup(const OperatorMatrix& S, const Eigen::VectorXd& v, double T) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.dense());
  const Eigen::MatrixXd& Q = es.eigenvectors();
  return Q * ((T * es.eigenvalues()).array().exp().matrix().asDiagonal() * (Q.transpose() * v));
}

ModelSpec free_spin_half(double lam) { return spin_model(0.5, lam, Polynomial(2)); }

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("assembled rates") {
    const double lam = 0.7;
    const int N = 10;
    const LumpedOperator op = assemble(curie_weiss(lam), N);
    for (Eigen::Index i = 0; i < op.grid.size(); ++i) {
      const double m = grid_magnetization(op.grid, i);
      for (SparseRM::InnerIterator it(op.S.offdiag, i); it; ++it) {
        const double mj = grid_magnetization(op.grid, it.col());
        // flipping a -1 spin up raises m; the row formula uses (1 -+ m)(1 +- m + 2/N)
        const double expect = mj > m ? N * lam / 2 * std::sqrt((1 - m) * (1 + m + 2.0 / N))
                                     : N * lam / 2 * std::sqrt((1 + m) * (1 - m + 2.0 / N));
        CHECK(it.value() == Approx(expect).epsilon(1e-13));
        CHECK(it.value() == op.S.offdiag.coeff(it.col(), i));
      }
    }
    const auto top = op.grid.index(Eigen::Vector2i(0, N));
    CHECK(op.S.offdiag.row(top).nonZeros() == 1);
    CHECK(op.exit_rate(top) > 0.0);
  }

  TEST_CASE("lumped spectrum matches the full Hilbert space") {
    for (int N : {1, 2, 3, 5}) {
      const ModelSpec spec = curie_weiss(0.8);
      const LumpedOperator op = assemble(spec, N);
      const GroundStateSolution gs = ground_state(op);
      const OracleResult full = full_hamiltonian_oracle(spec, N);
      CHECK(std::abs(gs.R1 - (N * 0.8 + full.E1)) <= 1e-10);
      CHECK((gs.h - full.lumped).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(gs.h.minCoeff() > 0.0);
    }
    // spin 1 has non-uniform label rates: compare with the shifted form
    const ModelSpec s1 = spin_model(1.0, 0.6, p_body_interaction(2, 1.0, 0.5),
                                    SpinConvention::kSpinOperator);
    const LumpedOperator op = assemble(s1, 2);
    CHECK(op.grid.size() == 6);
    const double R1 = -dense_spectrum(op.S)(5);
    CHECK(std::abs(R1 - full_hamiltonian_oracle(s1, 2, true).E1) <= 1e-10);
    // single free spin: ground energy of -B is minus the largest eigenvalue of K
    const ModelSpec f = free_spin_half(1.3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.kernel);
    CHECK(full_hamiltonian_oracle(f, 1).E1 == Approx(-es.eigenvalues().maxCoeff()));
    CHECK_THROWS_AS(full_hamiltonian_oracle(f, 13), SizeError);
  }

  TEST_CASE("ground state of Curie-Weiss") {
    const int N = 400;
    const LumpedOperator op = assemble(curie_weiss(0.5), N);
    const GroundStateSolution gs = ground_state(op);
    CHECK(std::abs(gs.R1 / N + 0.125) <= 5.0 / N);
    CHECK(gs.h.minCoeff() > 0.0);
    CHECK(gs.psi_normalized.minCoeff() == 0.0);
    // componentwise eigen-equation residual, relative to the local operator scale
    const Eigen::VectorXd Sh = op.S.apply(gs.h);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < op.grid.size(); ++i) {
      double scale = std::abs(op.S.diag(i)) * gs.h(i);
      for (SparseRM::InnerIterator it(op.S.offdiag, i); it; ++it) scale += it.value() * gs.h(it.col());
      worst = std::max(worst, std::abs(Sh(i) + gs.R1 * gs.h(i)) / scale);
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("power iteration agrees with a dense eigensolver") {
    const LumpedOperator op = assemble(p_body_model(3, 1.1), 60);
    const GroundStateSolution gs = ground_state(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.S.dense());
    const Eigen::Index n = op.grid.size();
    CHECK(-gs.R1 == Approx(es.eigenvalues()(n - 1)).epsilon(1e-12));
    Eigen::VectorXd v = es.eigenvectors().col(n - 1);
    if (v.sum() < 0) v = -v;
    for (Eigen::Index i = 0; i < n; ++i)
      if (v(i) > 1e-6) CHECK(gs.h(i) == Approx(v(i)).epsilon(1e-8));
  }

  TEST_CASE("non-convergence is reported") {
    const LumpedOperator op = assemble(curie_weiss(0.5), 50);
    PerronOptions opt;
    opt.max_iter = 3;
    CHECK_THROWS_AS(ground_state(op, opt), ConvergenceError);
  }

  TEST_CASE("Dirichlet restriction") {
    const LumpedOperator op = assemble(curie_weiss(0.5), 400);
    const GroundStateSolution gs = ground_state(op);
    CHECK(-dirichlet_eigenvalue(op, -1.0, 1.0) == Approx(gs.R1).epsilon(1e-12));
    const double ms = std::sqrt(0.75);
    const double Rl = -dirichlet_eigenvalue(op, ms - 0.2, ms + 0.2);
    CHECK(std::abs(Rl - gs.R1) <= 1e-3);
    CHECK(Rl >= gs.R1 - 1e-9);
    CHECK_THROWS_AS(dirichlet_eigenvalue(op, 0.3001, 0.3002), DomainError);
  }

  TEST_CASE("p=4 critical wells follow the zero-order formula") {
    const PBodyCritical pc = p_body_critical(4);
    const ModelSpec spec = p_body_model(4, pc.lambda_c);
    const HalfSpinModel model = HalfSpinModel::from_spec(spec);
    const int N = 400;
    const LumpedOperator op = assemble(spec, N);
    const double r1 = r1_and_minima(model).r1;
    const double c_zero = -dirichlet_eigenvalue(op, -0.45, 0.45) - N * r1;
    const double c_hat = -dirichlet_eigenvalue(op, pc.m_hat - 0.3, 1.0) - N * r1;
    const double c_hat_neg = -dirichlet_eigenvalue(op, -1.0, 0.3 - pc.m_hat) - N * r1;
    CHECK(c_hat == Approx(c_hat_neg).epsilon(1e-9));
    CHECK(c_zero == Approx(correction_candidates(model, 0.0).derived).epsilon(0.05));
    CHECK(c_hat == Approx(correction_candidates(model, pc.m_hat).derived).epsilon(0.05));
  }

  TEST_CASE("correction extrapolation") {
    const CorrectionFit fit = correction_extrapolation(curie_weiss(0.5), {200, 400, 800});
    CHECK(std::abs(fit.r1 + 0.125) <= 1e-4);
    const double derived = std::sqrt(0.75) - 1.0;
    CHECK(fit.c0 == Approx(derived).epsilon(0.05));
    const CorrectionFit free = correction_extrapolation(free_spin_half(0.9), {50, 100, 200});
    CHECK(std::abs(free.r1) <= 1e-10);
    CHECK(std::abs(free.c0) <= 1e-8);
    // exact quadratic data is recovered
    const CorrectionFit q = fit_correction({10, 20, 40}, {-1.0 * 10 + 0.3 + 2.0 / 10,
                                                          -1.0 * 20 + 0.3 + 2.0 / 20,
                                                          -1.0 * 40 + 0.3 + 2.0 / 40});
    CHECK(q.r1 == Approx(-1.0));
    CHECK(q.c0 == Approx(0.3));
    CHECK(q.c1 == Approx(2.0));
    CHECK_THROWS_AS(fit_correction({10, 10, 20}, {1, 1, 2}), DomainError);
  }

  TEST_CASE("Doob generator") {
    const int N = 50;
    const LumpedOperator op = assemble(curie_weiss(0.5), N);
    const GroundStateSolution gs = ground_state(op);
    const OperatorMatrix G = doob_generator(op, gs);
    const Eigen::VectorXd nu = gs.h.array().square();
    for (Eigen::Index i = 0; i < G.size(); ++i)
      for (SparseRM::InnerIterator it(G.offdiag, i); it; ++it) {
        const double back = G.offdiag.coeff(it.col(), i);
        CHECK(nu(i) * it.value() == Approx(nu(it.col()) * back).epsilon(1e-13));
      }
    CHECK(G.apply(Eigen::VectorXd::Ones(G.size())).cwiseAbs().maxCoeff() <= 1e-10 * N);
    // G is reversible w.r.t. h^2, so diag(h) G diag(1/h) is symmetric
    const Eigen::MatrixXd Gs = gs.h.asDiagonal() * G.dense() * gs.h.cwiseInverse().asDiagonal();
    CHECK((Gs - Gs.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Gs + Gs.transpose()), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd sS = dense_spectrum(op.S), sG = es.eigenvalues();
    const Eigen::Index n = sS.size();
    CHECK(sG(n - 1) == Approx(0.0).epsilon(1e-8).scale(N));
    CHECK(std::abs(sG(n - 2) - (sS(n - 2) - sS(n - 1))) <= 1e-8);
  }

  TEST_CASE("semigroup") {
    const int N = 30;
    const LumpedOperator op = assemble(curie_weiss(0.5), N);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd v(op.grid.size());
    for (auto& x : v) x = u(rng);
    CHECK(semigroup_apply(op.S, v, 0.0) == v);
    const GroundStateSolution gs = ground_state(op);
    const Eigen::VectorXd g1 = semigroup_apply(op.S, gs.h, 1.0);
    const Eigen::VectorXd expect = std::exp(-gs.R1) * gs.h;
    CHECK(((g1 - expect).array() / expect.array()).abs().maxCoeff() <= 1e-8);
    const Eigen::VectorXd a = semigroup_apply(op.S, v, 0.7);
    const Eigen::VectorXd b = dense_semigroup(op.S, v, 0.7);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10 * b.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(semigroup_apply(op.S, v, -1.0), DomainError);
  }
}
