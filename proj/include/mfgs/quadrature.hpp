#pragma once

#include <functional>

namespace mfgs {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of accepted |K15 - G7| estimates
  int evaluations = 0;
};

// Adaptive Gauss-Kronrod 7/15 on [a, b]; endpoints are never evaluated.
QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 60);

}  // namespace mfgs
