#include "mfgs/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfgs/error.hpp"

namespace mfgs {

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Polynomial p(nvars);
  Exponents e(nvars, 0);
  e.at(i) = 1;
  p.add_term(e, 1.0);
  return p;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    deg = std::max(deg, s);
  }
  return deg;
}

void Polynomial::add_term(const Exponents& e, double coeff) {
  if (static_cast<int>(e.size()) != nvars_)
    throw ModelError("monomial has " + std::to_string(e.size()) + " exponents, expected " +
                     std::to_string(nvars_));
  for (int k : e)
    if (k < 0) throw ModelError("negative exponent in monomial");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (coeff != 0.0) terms_.emplace(e, coeff);
    return;
  }
  it->second += coeff;
  if (it->second == 0.0) terms_.erase(it);
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents f = e;
    f[i] -= 1;
    out.add_term(f, c * e[i]);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (nvars_ == 0 && terms_.empty()) nvars_ = o.nvars_;
  if (o.nvars_ != nvars_ && !o.terms_.empty()) throw ModelError("polynomial arity mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw ModelError("polynomial arity mismatch");
  Polynomial out(a.nvars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

Polynomial Polynomial::pow(int p) const {
  if (p < 0) throw ModelError("negative polynomial power");
  Polynomial result = constant(nvars_, 1.0);
  Polynomial base = *this;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

Univariate Univariate::from_magnetization(const Polynomial& F) {
  if (F.nvars() != 2) throw ModelError("magnetization form needs exactly two labels");
  const int deg = F.degree();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(deg + 1);
  // (1-m)^a (1+m)^b / 2^(a+b), expanded by repeated convolution.
  for (const auto& [e, coeff] : F.terms()) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(e[0] + e[1] + 1);
    t(0) = coeff / std::ldexp(1.0, e[0] + e[1]);
    int len = 1;
    auto mul = [&](double s) {
      for (int k = len; k >= 1; --k) t(k) = t(k) + s * t(k - 1);
      ++len;
    };
    for (int k = 0; k < e[0]; ++k) mul(-1.0);
    for (int k = 0; k < e[1]; ++k) mul(1.0);
    c.head(t.size()) += t;
  }
  return Univariate(c);
}

Univariate Univariate::derivative() const {
  if (c_.size() <= 1) return Univariate();
  Eigen::VectorXd d(c_.size() - 1);
  for (Eigen::Index k = 1; k < c_.size(); ++k) d(k - 1) = c_(k) * static_cast<double>(k);
  return Univariate(d);
}

bool Univariate::is_even(double tol) const {
  for (Eigen::Index k = 1; k < c_.size(); k += 2)
    if (std::abs(c_(k)) > tol) return false;
  return true;
}

}  // namespace mfgs
