#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mfgs/polynomial.hpp"

namespace mfgs {

inline constexpr double kSimplexTol = 1e-12;

struct ModelSpec {
  int d = 2;
  std::vector<std::string> labels;
  std::vector<double> label_values;  // numeric value of each label (magnetization weights)
  Eigen::MatrixXd kernel;            // K[a][b], jump rate a -> b
  Polynomial interaction;            // F(m_0, ..., m_{d-1})
  double field_strength = 0.0;
};

struct DerivedRates {
  Eigen::VectorXd kappa_alpha;  // row sums of K
  double kappa_total = 0.0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::optional<DerivedRates> rates;
  bool ok() const { return violations.empty(); }
};

DerivedRates derived_rates(const Eigen::MatrixXd& K);
ValidationReport validate_spec(const ModelSpec& spec);
// Throws ModelError listing the violations.
const ModelSpec& require_valid(const ModelSpec& spec);

enum class SpinConvention {
  kPauli,        // spin-1/2 only: B = lam * sigma^x, kernel entry lam
  kSpinOperator  // B = lam * S^x
};

// Labels -s, ..., s in increasing order; off-diagonal (lam/2) sqrt(s(s+1) - ab) for |a-b| = 1.
Eigen::MatrixXd spin_s_kernel(double s, double lam,
                              SpinConvention conv = SpinConvention::kSpinOperator);
int spin_dimension(double s);  // 2s+1, throws unless s is a positive half-integer
std::vector<double> spin_label_values(double s);

// coeff * (sum_a v_a m_a)^p
Polynomial p_body_interaction(int p, const std::vector<double>& label_values, double coeff = 1.0);
// Label values a/s, so the magnetization ranges over [-1, 1] (+-1 for spin-1/2).
Polynomial p_body_interaction(int p, double s, double coeff = 1.0);

// Spin-s model with interaction F; Pauli convention requires s = 1/2.
ModelSpec spin_model(double s, double lam, Polynomial F,
                     SpinConvention conv = SpinConvention::kPauli);
ModelSpec curie_weiss(double lam, SpinConvention conv = SpinConvention::kPauli);  // F = m^2/2
ModelSpec p_body_model(int p, double lam, SpinConvention conv = SpinConvention::kPauli);
// All off-diagonal entries equal to rate.
ModelSpec complete_graph_model(int d, double rate, Polynomial F);

bool on_simplex(const Eigen::Ref<const Eigen::VectorXd>& m, double tol = kSimplexTol);
void require_on_simplex(const Eigen::Ref<const Eigen::VectorXd>& m, int d);
double eval_F(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& m);

// Spin-1/2 helpers: m = m_1 - m_0 and back.
Eigen::Vector2d simplex_from_magnetization(double m);
double magnetization(const Eigen::Ref<const Eigen::VectorXd>& m);

}  // namespace mfgs
