#pragma once

#include <string>
#include <vector>

#include "mfgs/model.hpp"
#include "mfgs/polynomial.hpp"

namespace mfgs {

// Spin-1/2 model in the magnetization m = m_1 - m_0, with
// H(m, theta) = lam sqrt(1-m^2) cosh(2 theta) - lam + F(m).
struct HalfSpinModel {
  double lambda = 0.0;  // kernel entry K[0][1]
  Univariate F, dF, d2F;

  static HalfSpinModel from_spec(const ModelSpec& spec);
  HalfSpinModel(double lam, Univariate f);
  HalfSpinModel() = default;

  double V(double m) const;
  double dV(double m) const;
  double d2V(double m) const;
  double H(double m, double theta) const;
  bool symmetric() const { return F.is_even(1e-14); }
};

struct MinimaOptions {
  int scan_points = 4096;
  double polish_tol = 1e-12;
  double merge_tol = 1e-8;
  double band_rel = 1e-10;  // global-minimum band: band_rel * (1 + |r1|)
};

struct R1Minima {
  double r1 = 0.0;
  std::vector<double> minima;  // sorted
  double r1_dual = 0.0;        // lam - max_t (lam |t| - G(t))
  std::vector<double> t_set;   // maximizers of the dual problem, sorted
};

R1Minima r1_and_minima(const HalfSpinModel& model, const MinimaOptions& opt = {});
R1Minima r1_and_minima(const ModelSpec& spec, const MinimaOptions& opt = {});

struct PBodyCritical {
  double lambda_c = 0.0;
  double m_hat = 0.0;
  std::vector<double> t_set;  // {1/(p-1), 1}
  double lambda_c_numeric = 0.0;
  double m_hat_numeric = 0.0;
};

// Closed forms plus an independent numeric solve of the two-maximizer condition.
PBodyCritical p_body_critical(int p);

// Nonnegative root of H(m, theta) = -r1; zero on the minimizer set.
double theta_of_m(const HalfSpinModel& model, double r1, double m);
double chi0(const HalfSpinModel& model, double m);

struct CorrectionCandidates {
  double chi0 = 0.0;
  double sqrt_v2_over_rate = 0.0;  // sqrt(V''(m) / (lam sqrt(1-m^2)))
  double harmonic = 0.0;           // sqrt(lam chi0)
  double derived = 0.0;            // sqrt(lam chi0) - lam / sqrt(1-m^2)
};
CorrectionCandidates correction_candidates(const HalfSpinModel& model, double m);

enum class Selection { kSingleton, kChiUnique, kSymmetricPair, kAmbiguous };
std::string to_string(Selection s);

struct HJProfile {
  double lambda_field = 0.0;
  double r1 = 0.0;
  std::vector<double> minima;
  std::vector<double> chi0;      // aligned with minima
  Selection selection = Selection::kSingleton;
  std::vector<double> selected;  // minima of psi
  std::vector<double> shocks;
  std::vector<double> m, theta, psi;
  std::vector<int> branch;  // index into selected attaining the minimum
  // For ambiguous selection: one single-well psi table per tied minimum.
  std::vector<std::vector<double>> candidate_psi;
};

struct ProfileOptions {
  int samples = 4001;
  double quad_tol = 1e-12;
  double chi_tie_rel = 1e-9;
  MinimaOptions minima;
};

// psi(m) = min over selected s of |int_s^m theta|.
class PsiFunction {
 public:
  PsiFunction(HalfSpinModel model, double r1, std::vector<double> minima,
              std::vector<double> selected, double quad_tol = 1e-12);

  double theta(double m) const { return theta_of_m(model_, r1_, m); }
  // Antiderivative of theta with Theta(0) = 0.
  double Theta(double m) const;
  double operator()(double m) const;
  std::vector<double> operator()(const std::vector<double>& ms) const;
  int branch(double m) const;
  std::vector<double> shocks() const;

  const std::vector<double>& selected() const { return selected_; }
  double r1() const { return r1_; }
  const HalfSpinModel& model() const { return model_; }

 private:
  double integral(double a, double b) const;  // splits at minimizers

  HalfSpinModel model_;
  double r1_;
  std::vector<double> minima_, selected_, theta_sel_;
  double tol_;
};

HJProfile admissible_psi(const HalfSpinModel& model, const ProfileOptions& opt = {});
HJProfile admissible_psi(const ModelSpec& spec, const ProfileOptions& opt = {});
// Evaluator for the selected profile (first candidate when ambiguous).
PsiFunction psi_function(const HalfSpinModel& model, const HJProfile& profile,
                         double quad_tol = 1e-12);

struct StructureIssue {
  std::string check;  // "derivative", "shock", "lower-kink"
  double location;
  std::string detail;
};

struct StructureReport {
  std::vector<StructureIssue> issues;
  std::vector<double> upper_kinks;
  int derivative_points_checked = 0;
  bool ok() const { return issues.empty(); }
};

StructureReport viscosity_structure_check(const HalfSpinModel& model, const HJProfile& profile,
                                          double deriv_tol = 1e-6);

}  // namespace mfgs
