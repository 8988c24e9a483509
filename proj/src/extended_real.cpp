#include "mfgs/extended_real.hpp"

#include "mfgs/error.hpp"

namespace mfgs {

double ExtendedReal::value() const {
  if (!finite()) throw DomainError(is_pos_inf() ? "value is +inf" : "value is -inf");
  return value_;
}

std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
  if (x.is_pos_inf()) return os << "+inf";
  if (x.is_neg_inf()) return os << "-inf";
  return os << x.value_or(0.0);
}

}  // namespace mfgs
