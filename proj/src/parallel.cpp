#include "mfgs/parallel.hpp"

#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mfgs {

int worker_threads() {
  int n = 1;
#ifdef _OPENMP
  n = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("MFGS_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return n;
}

namespace {

template <typename F>
double blocked_reduce(Eigen::Index n, F&& block_value) {
  const Eigen::Index nb = (n + kReductionBlock - 1) / kReductionBlock;
  if (nb <= 1) return nb == 0 ? 0.0 : block_value(0, n);
  std::vector<double> part(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static) num_threads(worker_threads()) if (nb > 4)
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index lo = b * kReductionBlock;
    part[b] = block_value(lo, std::min(n, lo + kReductionBlock));
  }
  double s = 0.0;
  for (double p : part) s += p;
  return s;
}

}  // namespace

double blocked_sum(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return blocked_reduce(x.size(), [&](Eigen::Index lo, Eigen::Index hi) {
    return x.segment(lo, hi - lo).sum();
  });
}

double blocked_dot(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  return blocked_reduce(x.size(), [&](Eigen::Index lo, Eigen::Index hi) {
    return x.segment(lo, hi - lo).dot(y.segment(lo, hi - lo));
  });
}

}  // namespace mfgs
