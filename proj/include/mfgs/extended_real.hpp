#pragma once

#include <limits>
#include <ostream>

namespace mfgs {

// Cost values that may be +inf ("forbidden move") or -inf ("bound vacuous").
// Arithmetic is never done on the infinite states; callers branch on them.
class ExtendedReal {
 public:
  enum class Kind { kFinite, kPosInf, kNegInf };

  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit by design

  static constexpr ExtendedReal pos_inf() { return ExtendedReal(Kind::kPosInf); }
  static constexpr ExtendedReal neg_inf() { return ExtendedReal(Kind::kNegInf); }

  constexpr bool finite() const { return kind_ == Kind::kFinite; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::kPosInf; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::kNegInf; }
  constexpr Kind kind() const { return kind_; }

  double value() const;  // throws DomainError when infinite
  constexpr double value_or(double fallback) const { return finite() ? value_ : fallback; }

  // Maps to IEEE infinities, for printing and comparisons only.
  constexpr double to_double() const {
    if (kind_ == Kind::kPosInf) return std::numeric_limits<double>::infinity();
    if (kind_ == Kind::kNegInf) return -std::numeric_limits<double>::infinity();
    return value_;
  }

  friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    return a.to_double() < b.to_double();
  }
  friend constexpr bool operator<=(const ExtendedReal& a, const ExtendedReal& b) {
    return a.to_double() <= b.to_double();
  }
  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::kFinite || a.value_ == b.value_);
  }

 private:
  constexpr explicit ExtendedReal(Kind k) : kind_(k) {}
  double value_ = 0.0;
  Kind kind_ = Kind::kFinite;
};

std::ostream& operator<<(std::ostream& os, const ExtendedReal& x);

}  // namespace mfgs
