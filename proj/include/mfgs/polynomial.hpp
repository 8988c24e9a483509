#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace mfgs {

using Exponents = std::vector<int>;

// Sparse real polynomial in d variables (the simplex coordinates m_0..m_{d-1}).
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int i);

  int nvars() const { return nvars_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const std::map<Exponents, double>& terms() const { return terms_; }

  // Merges into an existing monomial; exact zeros are dropped.
  void add_term(const Exponents& e, double coeff);

  template <typename Derived>
  typename Derived::Scalar operator()(const Eigen::MatrixBase<Derived>& m) const {
    using S = typename Derived::Scalar;
    S acc(0);
    for (const auto& [e, c] : terms_) {
      S t(c);
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= m(i);
      acc += t;
    }
    return acc;
  }

  Polynomial derivative(int i) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  Polynomial pow(int p) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  int nvars_ = 0;
  std::map<Exponents, double> terms_;
};

// Dense univariate polynomial, coefficient k multiplies x^k.
class Univariate {
 public:
  Univariate() = default;
  explicit Univariate(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {}

  // Rewrites a two-label interaction in the magnetization m = m_1 - m_0,
  // i.e. m_0 = (1-m)/2 and m_1 = (1+m)/2.
  static Univariate from_magnetization(const Polynomial& F);

  template <typename S>
  S operator()(S x) const {
    S acc(0);
    for (Eigen::Index k = c_.size() - 1; k >= 0; --k) acc = acc * x + S(c_(k));
    return acc;
  }

  Univariate derivative() const;
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Eigen::VectorXd& coeffs() const { return c_; }
  bool is_even(double tol = 0.0) const;

 private:
  Eigen::VectorXd c_ = Eigen::VectorXd::Zero(1);
};

}  // namespace mfgs
