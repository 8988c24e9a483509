#include "mfgs/quadrature.hpp"

#include <cmath>

namespace mfgs {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& f, double a, double b, double& k, double& g) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  k = kWgk[7] * fc;
  g = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double s = f(c - x) + f(c + x);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  k *= h;
  g *= h;
}

void recurse(const std::function<double(double)>& f, double a, double b, double tol,
             double rel_tol, int depth, QuadratureResult& out) {
  double k, g;
  gk15(f, a, b, k, g);
  out.evaluations += 15;
  const double err = std::abs(k - g);
  if (err <= std::max(tol, rel_tol * std::abs(k)) || depth == 0 || b - a < 1e-15) {
    out.value += k;
    out.error += err;
    return;
  }
  const double c = 0.5 * (a + b);
  recurse(f, a, c, 0.5 * tol, rel_tol, depth - 1, out);
  recurse(f, c, b, 0.5 * tol, rel_tol, depth - 1, out);
}

}  // namespace

QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  if (b < a) {
    out = integrate_gk(f, b, a, abs_tol, rel_tol, max_depth);
    out.value = -out.value;
    return out;
  }
  recurse(f, a, b, abs_tol, rel_tol, max_depth, out);
  return out;
}

}  // namespace mfgs
