#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <exception>

namespace mfgs {

// Worker threads for OpenMP regions; MFGS_THREADS caps the OpenMP default.
int worker_threads();

// Reductions over fixed blocks of kReductionBlock entries, summed in block order.
// Results do not depend on the number of threads.
inline constexpr Eigen::Index kReductionBlock = 4096;
double blocked_sum(const Eigen::Ref<const Eigen::VectorXd>& x);
double blocked_dot(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);
inline double blocked_norm(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::sqrt(blocked_dot(x, x));
}

// Carries the first exception thrown inside an OpenMP region out to the caller.
class ExceptionGuard {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(mfgs_exception_guard)
      if (!first_) first_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::exception_ptr first_;
};

}  // namespace mfgs
