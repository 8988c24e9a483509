#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "mfgs/error.hpp"
#include "mfgs/model.hpp"
#include "mfgs/model_file.hpp"
#include "mfgs/polynomial.hpp"
#include "test_support.hpp"

using namespace mfgs;
using doctest::Approx;

namespace {

bool has_violation(const ModelSpec& spec, const std::string& msg) {
  const auto rep = validate_spec(spec);
  return std::find(rep.violations.begin(), rep.violations.end(), msg) != rep.violations.end();
}

ModelSpec matrix_model(const Eigen::MatrixXd& K) {
  ModelSpec spec;
  spec.d = static_cast<int>(K.rows());
  spec.kernel = K;
  spec.interaction = Polynomial(spec.d);
  for (int a = 0; a < spec.d; ++a) spec.labels.push_back(std::to_string(a));
  return spec;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("spin one half preset is valid with uniform label rates") {
    const double lam = 0.7;
    const ModelSpec spec = curie_weiss(lam);
    const auto rep = validate_spec(spec);
    REQUIRE(rep.ok());
    REQUIRE(rep.rates.has_value());
    CHECK(rep.rates->kappa_alpha(0) == Approx(lam));
    CHECK(rep.rates->kappa_alpha(1) == Approx(lam));
    CHECK(rep.rates->kappa_total == Approx(2 * lam));
    CHECK(spec.labels == std::vector<std::string>{"-1", "+1"});
  }

  TEST_CASE("kernel invariants are reported by name") {
    Eigen::MatrixXd K(2, 2);
    K << 0, 1, 0.5, 0;
    CHECK(has_violation(matrix_model(K), "kernel not symmetric"));

    Eigen::MatrixXd K3 = Eigen::MatrixXd::Zero(3, 3);
    K3(0, 1) = K3(1, 0) = 1.0;
    CHECK(has_violation(matrix_model(K3), "kernel not irreducible"));

    Eigen::MatrixXd Kd(2, 2);
    Kd << 0.1, 1, 1, 0;
    CHECK(has_violation(matrix_model(Kd), "kernel diagonal not zero"));

    Eigen::MatrixXd Kn(2, 2);
    Kn << 0, -1, -1, 0;
    CHECK(has_violation(matrix_model(Kn), "kernel has negative entries"));

    CHECK_THROWS_AS(require_valid(matrix_model(K)), ModelError);
  }

  TEST_CASE("spin-s kernel entries") {
    const Eigen::MatrixXd K = spin_s_kernel(0.5, 1.0);
    CHECK(K(0, 1) == Approx(0.5));
    CHECK(K(1, 0) == Approx(0.5));
    const Eigen::MatrixXd K1 = spin_s_kernel(1.0, 2.0);
    CHECK(K1(0, 1) == Approx(std::sqrt(2.0)));
    CHECK(K1(1, 2) == Approx(std::sqrt(2.0)));
    CHECK(K1(0, 2) == 0.0);
    CHECK(K1(2, 0) == 0.0);
    CHECK(spin_s_kernel(0.5, 1.0, SpinConvention::kPauli)(0, 1) == Approx(1.0));
    CHECK_THROWS_AS(spin_s_kernel(1.0, 1.0, SpinConvention::kPauli), ModelError);
    CHECK_THROWS_AS(spin_dimension(0.3), ModelError);
    CHECK(spin_dimension(1.5) == 4);
  }

  TEST_CASE("p-body interaction expansions") {
    const Polynomial F1 = p_body_interaction(1, 0.5);
    Eigen::Vector2d m(0.3, 0.7);
    CHECK(F1(m) == Approx(0.7 - 0.3));

    const Polynomial F2 = p_body_interaction(2, 0.5);
    Polynomial expect(2);
    expect.add_term({2, 0}, 1.0);
    expect.add_term({1, 1}, -2.0);
    expect.add_term({0, 2}, 1.0);
    CHECK(F2 == expect);

    const Polynomial F2s1 = p_body_interaction(2, 1.0);
    CHECK(F2s1(Eigen::Vector3d(0, 0, 1)) == Approx(1.0));
    CHECK(F2s1(Eigen::Vector3d(1, 0, 0)) == Approx(1.0));
    CHECK(F2s1(Eigen::Vector3d(0, 1, 0)) == Approx(0.0));
  }

  TEST_CASE("interaction evaluation") {
    const ModelSpec cw = curie_weiss(0.5);
    CHECK(eval_F(cw, Eigen::Vector2d(0.5, 0.5)) == Approx(0.0));
    CHECK(eval_F(cw, Eigen::Vector2d(0.0, 1.0)) == Approx(0.5));
    const ModelSpec p4 = p_body_model(4, 1.0);
    CHECK(eval_F(p4, Eigen::Vector2d(0.25, 0.75)) == Approx(0.0625));
    CHECK_THROWS_AS(eval_F(cw, Eigen::Vector2d(0.5, 0.6)), DomainError);
    CHECK_THROWS_AS(eval_F(cw, Eigen::Vector3d(0.5, 0.5, 0.0)), DomainError);
  }

  TEST_CASE("polynomial derivative matches central differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> expo(0, 3);
    for (int trial = 0; trial < 20; ++trial) {
      Polynomial P(3);
      for (int t = 0; t < 5; ++t) P.add_term({expo(rng), expo(rng), expo(rng)}, coef(rng));
      const Eigen::VectorXd m = test::random_simplex_point(rng, 3, 0.05);
      for (int i = 0; i < 3; ++i) {
        const double h = 1e-5;
        Eigen::VectorXd mp = m, mm = m;
        mp(i) += h;
        mm(i) -= h;
        const double fd = (P(mp) - P(mm)) / (2 * h);
        CHECK(P.derivative(i)(m) == Approx(fd).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("magnetization form agrees with the simplex form") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int p = 1; p <= 6; ++p) {
      const Polynomial F = p_body_interaction(p, 0.5, 0.8);
      const Univariate f = Univariate::from_magnetization(F);
      CHECK(f.degree() == p);
      CHECK(f.is_even(1e-14) == (p % 2 == 0));
      for (int k = 0; k < 10; ++k) {
        const double mm = u(rng);
        CHECK(f(mm) == Approx(F(simplex_from_magnetization(mm))).epsilon(1e-12));
        CHECK(f(mm) == Approx(0.8 * std::pow(mm, p)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("model file presets and explicit matrices") {
    const auto j = nlohmann::json::parse(R"({
      "d": 2, "labels": ["-1", "+1"],
      "kernel": {"spin_s": {"s": 0.5, "lambda": 0.5, "convention": "pauli"}},
      "interaction": {"p_body": {"p": 2, "coeff": 0.5}}})");
    const ModelSpec a = model_from_json(j);
    const ModelSpec b = curie_weiss(0.5);
    CHECK(a.kernel.isApprox(b.kernel));
    CHECK(a.interaction == b.interaction);
    CHECK(validate_spec(a).ok());

    const auto jm = nlohmann::json::parse(R"({
      "kernel": {"matrix": [[0, 0.5], [0.5, 0]]},
      "interaction": {"terms": [{"exps": [2, 0], "coeff": 0.5}, {"exps": [1, 1], "coeff": -1},
                                {"exps": [0, 2], "coeff": 0.5}]}})");
    const ModelSpec c = model_from_json(jm);
    CHECK(c.interaction == b.interaction);
    CHECK(c.kernel(0, 1) == 0.5);

    const ModelSpec d = model_from_json(with_field(j, 2.0));
    CHECK(d.kernel(0, 1) == Approx(2.0));
    CHECK(model_from_json(with_field(jm, 1.0)).kernel(0, 1) == Approx(1.0));

    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"kernel": {}})")), ModelError);
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"d": 3,
      "kernel": {"matrix": [[0, 1], [1, 0]]}})")), ModelError);
  }

  TEST_CASE("model files accept comments") {
    const std::string path = "model_file_test.json";
    {
      std::ofstream f(path);
      f << "// comment line\n{\"kernel\": {\"spin_s\": {\"s\": 1, \"lambda\": 0.5, "
           "\"convention\": \"spin\"}}, \"interaction\": {\"p_body\": {\"p\": 2}}}\n";
    }
    const ModelSpec spec = load_model(path);
    CHECK(spec.d == 3);
    CHECK(validate_spec(spec).ok());
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model("does_not_exist.json"), ModelError);
  }
}
