#include "mfgs/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mfgs/error.hpp"

namespace mfgs {

DerivedRates derived_rates(const Eigen::MatrixXd& K) {
  DerivedRates r;
  r.kappa_alpha = K.rowwise().sum();
  r.kappa_total = r.kappa_alpha.sum();
  return r;
}

ValidationReport validate_spec(const ModelSpec& spec) {
  ValidationReport rep;
  auto& v = rep.violations;
  const int d = spec.d;
  if (d < 2) v.push_back("d must be at least 2");
  if (spec.kernel.rows() != d || spec.kernel.cols() != d) {
    v.push_back("kernel must be " + std::to_string(d) + "x" + std::to_string(d));
    return rep;
  }
  if (!spec.labels.empty() && static_cast<int>(spec.labels.size()) != d)
    v.push_back("labels must have d entries");
  if (!spec.label_values.empty() && static_cast<int>(spec.label_values.size()) != d)
    v.push_back("label values must have d entries");
  if (spec.field_strength < 0) v.push_back("field strength negative");
  const auto& K = spec.kernel;
  if (!K.allFinite()) v.push_back("kernel has non-finite entries");
  if ((K.array() < 0).any()) v.push_back("kernel has negative entries");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 0)
    v.push_back("kernel not symmetric");
  if (K.diagonal().cwiseAbs().maxCoeff() > 0) v.push_back("kernel diagonal not zero");
  // Connectivity of the graph {K > 0}.
  std::vector<int> seen(d, 0), stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    for (int b = 0; b < d; ++b)
      if (!seen[b] && (K(a, b) > 0 || K(b, a) > 0)) {
        seen[b] = 1;
        stack.push_back(b);
      }
  }
  if (std::accumulate(seen.begin(), seen.end(), 0) != d) v.push_back("kernel not irreducible");
  if (spec.interaction.nvars() != d && !spec.interaction.is_zero())
    v.push_back("interaction must be a polynomial in d variables");
  for (const auto& [e, c] : spec.interaction.terms())
    if (!std::isfinite(c)) {
      v.push_back("interaction has non-finite coefficient");
      break;
    }
  if (rep.ok()) rep.rates = derived_rates(K);
  return rep;
}

const ModelSpec& require_valid(const ModelSpec& spec) {
  auto rep = validate_spec(spec);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "invalid model:";
    for (const auto& s : rep.violations) os << ' ' << s << ';';
    throw ModelError(os.str());
  }
  return spec;
}

int spin_dimension(double s) {
  const double two_s = 2.0 * s;
  if (!(s > 0) || std::abs(two_s - std::round(two_s)) > 1e-12)
    throw ModelError("spin must be a positive half-integer");
  return static_cast<int>(std::lround(two_s)) + 1;
}

std::vector<double> spin_label_values(double s) {
  const int d = spin_dimension(s);
  std::vector<double> out(d);
  for (int i = 0; i < d; ++i) out[i] = -s + i;
  return out;
}

Eigen::MatrixXd spin_s_kernel(double s, double lam, SpinConvention conv) {
  if (lam < 0) throw ModelError("field strength negative");
  const int d = spin_dimension(s);
  if (conv == SpinConvention::kPauli && d != 2)
    throw ModelError("Pauli convention only applies to spin 1/2");
  const double scale = conv == SpinConvention::kPauli ? 2.0 : 1.0;
  const auto vals = spin_label_values(s);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    const double w = scale * 0.5 * lam * std::sqrt(s * (s + 1) - vals[i] * vals[i + 1]);
    K(i, i + 1) = w;
    K(i + 1, i) = w;
  }
  return K;
}

Polynomial p_body_interaction(int p, const std::vector<double>& label_values, double coeff) {
  if (p < 1) throw ModelError("p-body interaction needs p >= 1");
  const int d = static_cast<int>(label_values.size());
  Polynomial lin(d);
  for (int a = 0; a < d; ++a) {
    Exponents e(d, 0);
    e[a] = 1;
    lin.add_term(e, label_values[a]);
  }
  Polynomial out = lin.pow(p);
  out *= coeff;
  return out;
}

Polynomial p_body_interaction(int p, double s, double coeff) {
  auto vals = spin_label_values(s);
  for (auto& x : vals) x /= s;
  return p_body_interaction(p, vals, coeff);
}

ModelSpec spin_model(double s, double lam, Polynomial F, SpinConvention conv) {
  ModelSpec spec;
  spec.d = spin_dimension(s);
  spec.kernel = spin_s_kernel(s, lam, conv);
  spec.label_values = spin_label_values(s);
  for (auto& x : spec.label_values) x /= s;
  for (double x : spin_label_values(s)) {
    std::ostringstream os;
    if (spec.d == 2)
      os << (x < 0 ? "-1" : "+1");
    else
      os << x;
    spec.labels.push_back(os.str());
  }
  spec.interaction = std::move(F);
  spec.field_strength = lam;
  return spec;
}

ModelSpec curie_weiss(double lam, SpinConvention conv) {
  return spin_model(0.5, lam, p_body_interaction(2, 0.5, 0.5), conv);
}

ModelSpec p_body_model(int p, double lam, SpinConvention conv) {
  return spin_model(0.5, lam, p_body_interaction(p, 0.5), conv);
}

ModelSpec complete_graph_model(int d, double rate, Polynomial F) {
  ModelSpec spec;
  spec.d = d;
  spec.kernel = Eigen::MatrixXd::Constant(d, d, rate);
  spec.kernel.diagonal().setZero();
  for (int a = 0; a < d; ++a) {
    spec.labels.push_back(std::to_string(a));
    spec.label_values.push_back(a);
  }
  spec.interaction = F.is_zero() ? Polynomial(d) : std::move(F);
  spec.field_strength = rate;
  return spec;
}

bool on_simplex(const Eigen::Ref<const Eigen::VectorXd>& m, double tol) {
  return m.size() > 0 && m.minCoeff() >= -tol && std::abs(m.sum() - 1.0) <= tol;
}

void require_on_simplex(const Eigen::Ref<const Eigen::VectorXd>& m, int d) {
  if (m.size() != d) throw DomainError("point has wrong dimension");
  if (!on_simplex(m)) throw DomainError("point is off the simplex");
}

double eval_F(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& m) {
  require_on_simplex(m, spec.d);
  if (spec.interaction.is_zero()) return 0.0;
  return spec.interaction(m);
}

Eigen::Vector2d simplex_from_magnetization(double m) { return {(1.0 - m) / 2, (1.0 + m) / 2}; }

double magnetization(const Eigen::Ref<const Eigen::VectorXd>& m) { return m(1) - m(0); }

}  // namespace mfgs
