#include "mfgs/hj_halfspin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgs/error.hpp"
#include "mfgs/quadrature.hpp"

namespace mfgs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

// Maximizer of f on [a, b] by golden section.
double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

// Root of an increasing-through-zero g on [lo, hi] (g(lo) <= 0 <= g(hi)), Newton with bisection.
double safeguarded_root(const std::function<double(double)>& g,
                        const std::function<double(double)>& dg, double lo, double hi,
                        double tol) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if (gx < 0)
      lo = x;
    else
      hi = x;
    const double d = dg(x);
    double nx = (d > 0) ? x - gx / d : 0.5 * (lo + hi);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) < 0.25 * tol) return nx;
    x = nx;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> merge_sorted(std::vector<double> xs, double tol) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

}  // namespace

HalfSpinModel::HalfSpinModel(double lam, Univariate f)
    : lambda(lam), F(std::move(f)), dF(F.derivative()), d2F(dF.derivative()) {
  if (!(lam > 0)) throw ModelError("spin-1/2 analysis needs a positive field");
}

HalfSpinModel HalfSpinModel::from_spec(const ModelSpec& spec) {
  require_valid(spec);
  if (spec.d != 2) throw ModelError("spin-1/2 analysis needs exactly two labels");
  Univariate f = spec.interaction.is_zero() ? Univariate()
                                            : Univariate::from_magnetization(spec.interaction);
  return HalfSpinModel(spec.kernel(0, 1), std::move(f));
}

double HalfSpinModel::V(double m) const {
  return lambda - lambda * std::sqrt(std::max(0.0, 1.0 - m * m)) - F(m);
}
double HalfSpinModel::dV(double m) const {
  return lambda * m / std::sqrt(1.0 - m * m) - dF(m);
}
double HalfSpinModel::d2V(double m) const {
  return lambda / std::pow(1.0 - m * m, 1.5) - d2F(m);
}
double HalfSpinModel::H(double m, double theta) const {
  return lambda * std::sqrt(std::max(0.0, 1.0 - m * m)) * std::cosh(2.0 * theta) - lambda + F(m);
}

R1Minima r1_and_minima(const HalfSpinModel& model, const MinimaOptions& opt) {
  const int n = std::max(opt.scan_points, 3);
  std::vector<double> ms(n), vs(n);
  for (int k = 0; k < n; ++k) {
    ms[k] = -1.0 + 2.0 * k / (n - 1);
    vs[k] = model.V(ms[k]);
  }
  std::vector<double> cand;
  for (int k = 0; k < n; ++k) {
    const bool left = k == 0 || vs[k] <= vs[k - 1];
    const bool right = k == n - 1 || vs[k] <= vs[k + 1];
    if (!(left && right)) continue;
    const double lo = ms[std::max(k - 1, 0)], hi = ms[std::min(k + 1, n - 1)];
    const double glo = lo <= -1.0 ? -kInf : model.dV(lo);
    const double ghi = hi >= 1.0 ? kInf : model.dV(hi);
    double x;
    if (glo <= 0 && ghi >= 0) {
      x = safeguarded_root([&](double m) { return model.dV(m); },
                           [&](double m) { return model.d2V(m); }, lo, hi, opt.polish_tol);
    } else {
      x = golden_max([&](double m) { return -model.V(m); }, lo, hi, opt.polish_tol);
    }
    cand.push_back(x);
  }
  R1Minima out;
  out.r1 = kInf;
  for (double x : cand) out.r1 = std::min(out.r1, model.V(x));
  const double band = opt.band_rel * (1.0 + std::abs(out.r1));
  std::vector<double> mins;
  for (double x : cand)
    if (model.V(x) <= out.r1 + band) mins.push_back(x);
  out.minima = merge_sorted(mins, opt.merge_tol);

  // Dual route: maximize lam |t| + F(sign(t) sqrt(1 - t^2)) on each half.
  double best = -kInf;
  std::vector<double> tcand;
  for (int side : {-1, 1}) {
    auto phi = [&](double t) {  // t in [0, 1]
      return model.lambda * t + model.F(side * std::sqrt(std::max(0.0, 1.0 - t * t)));
    };
    std::vector<double> ts(n), ps(n);
    for (int k = 0; k < n; ++k) {
      ts[k] = static_cast<double>(k) / (n - 1);
      ps[k] = phi(ts[k]);
    }
    for (int k = 0; k < n; ++k) {
      const bool left = k == 0 || ps[k] >= ps[k - 1];
      const bool right = k == n - 1 || ps[k] >= ps[k + 1];
      if (!(left && right)) continue;
      const double lo = ts[std::max(k - 1, 0)], hi = ts[std::min(k + 1, n - 1)];
      double t = golden_max(phi, lo, hi, opt.polish_tol);
      if (phi(ts[k]) > phi(t)) t = ts[k];
      best = std::max(best, phi(t));
      tcand.push_back(side * t);
    }
  }
  out.r1_dual = model.lambda - best;
  const double tband = opt.band_rel * (1.0 + std::abs(best));
  std::vector<double> tset;
  for (double t : tcand) {
    const double side = t < 0 || (t == 0 && std::signbit(t)) ? -1.0 : 1.0;
    const double at = std::abs(t);
    const double v = model.lambda * at + model.F(side * std::sqrt(std::max(0.0, 1.0 - at * at)));
    if (v >= best - tband) tset.push_back(t);
  }
  out.t_set = merge_sorted(tset, opt.merge_tol);
  return out;
}

R1Minima r1_and_minima(const ModelSpec& spec, const MinimaOptions& opt) {
  return r1_and_minima(HalfSpinModel::from_spec(spec), opt);
}

PBodyCritical p_body_critical(int p) {
  if (p <= 2) throw DomainError("p-body criticality needs p > 2");
  PBodyCritical out;
  const double q = p - 1.0;
  out.lambda_c = p / q * std::pow(1.0 - 1.0 / (q * q), 0.5 * p - 1.0);
  out.m_hat = std::sqrt(p * (p - 2.0)) / q;
  out.t_set = {1.0 / q, 1.0};

  // h(t) = lam t + (1-t^2)^{p/2}; its interior local max t_a(lam) solves
  // lam = p t (1-t^2)^{p/2-1} on [0, t_p], located by a grid scan and bisection.
  const double tp = 1.0 / std::sqrt(q);
  auto slope = [&](double t) { return p * t * std::pow(1.0 - t * t, 0.5 * p - 1.0); };
  auto interior_max = [&](double lam) {
    const int n = 4096;
    double lo = 0.0, hi = tp, best = -kInf;
    for (int k = 0; k <= n; ++k) {
      const double t = tp * k / n;
      const double v = lam * t + std::pow(1.0 - t * t, 0.5 * p);
      if (v > best) {
        best = v;
        lo = tp * std::max(k - 1, 0) / n;
        hi = tp * std::min(k + 1, n) / n;
      }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < lam ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto excess = [&](double lam) {
    const double t = interior_max(lam);
    return lam * t + std::pow(1.0 - t * t, 0.5 * p) - lam;
  };
  double lo = 1e-6, hi = slope(tp);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  out.lambda_c_numeric = 0.5 * (lo + hi);
  const double t1 = interior_max(out.lambda_c_numeric);
  out.m_hat_numeric = std::sqrt(1.0 - t1 * t1);
  return out;
}

double theta_of_m(const HalfSpinModel& model, double r1, double m) {
  if (std::abs(m) > 1.0) throw DomainError("magnetization outside [-1, 1]");
  const double s = std::sqrt(std::max(0.0, 1.0 - m * m));
  const double gap = model.V(m) - r1;
  if (s == 0.0) return gap > 0 ? kInf : 0.0;
  const double eps = gap / (model.lambda * s);
  if (eps < -1e-8) throw DomainError("theta equation has no root: r1 exceeds V(m)");
  if (eps <= 0) return 0.0;
  // acosh(1 + eps) / 2 without cancellation
  return 0.5 * std::log1p(eps + std::sqrt(eps * (2.0 + eps)));
}

double chi0(const HalfSpinModel& model, double m) {
  const double s2 = 1.0 - m * m;
  return model.lambda / s2 - std::sqrt(s2) * model.d2F(m);
}

CorrectionCandidates correction_candidates(const HalfSpinModel& model, double m) {
  CorrectionCandidates c;
  const double s = std::sqrt(1.0 - m * m);
  c.chi0 = chi0(model, m);
  c.sqrt_v2_over_rate = std::sqrt(std::max(0.0, model.d2V(m) / (model.lambda * s)));
  c.harmonic = std::sqrt(std::max(0.0, model.lambda * c.chi0));
  c.derived = c.harmonic - model.lambda / s;
  return c;
}

std::string to_string(Selection s) {
  switch (s) {
    case Selection::kSingleton: return "singleton";
    case Selection::kChiUnique: return "chi0-unique";
    case Selection::kSymmetricPair: return "symmetric-pair";
    case Selection::kAmbiguous: return "ambiguous";
  }
  return "unknown";
}

PsiFunction::PsiFunction(HalfSpinModel model, double r1, std::vector<double> minima,
                         std::vector<double> selected, double quad_tol)
    : model_(std::move(model)),
      r1_(r1),
      minima_(std::move(minima)),
      selected_(std::move(selected)),
      tol_(quad_tol) {
  if (selected_.empty()) throw DomainError("profile needs at least one selected minimum");
  std::sort(minima_.begin(), minima_.end());
  std::sort(selected_.begin(), selected_.end());
  for (double s : selected_) theta_sel_.push_back(Theta(s));
}

double PsiFunction::integral(double a, double b) const {
  if (a == b) return 0.0;
  if (b < a) return -integral(b, a);
  std::vector<double> cuts{a};
  for (double x : minima_)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  // theta has an integrable log singularity at +-1; keep nodes that round onto it finite
  const double edge = std::nextafter(1.0, 0.0);
  auto f = [&](double m) { return theta(std::clamp(m, -edge, edge)); };
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    s += integrate_gk(f, cuts[k], cuts[k + 1], tol_, 1e-13).value;
  return s;
}

double PsiFunction::Theta(double m) const { return integral(0.0, m); }

double PsiFunction::operator()(double m) const {
  const double T = Theta(m);
  double best = kInf;
  for (double ts : theta_sel_) best = std::min(best, std::abs(T - ts));
  return best;
}

std::vector<double> PsiFunction::operator()(const std::vector<double>& ms) const {
  // cumulative integration over sorted breakpoints, anchored at 0
  std::vector<double> pts = ms;
  pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> cum(pts.size(), 0.0);
  const auto zero = std::lower_bound(pts.begin(), pts.end(), 0.0) - pts.begin();
  for (auto k = zero + 1; k < static_cast<long>(pts.size()); ++k)
    cum[k] = cum[k - 1] + integral(pts[k - 1], pts[k]);
  for (auto k = zero - 1; k >= 0; --k) cum[k] = cum[k + 1] - integral(pts[k], pts[k + 1]);
  std::vector<double> out(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto k = std::lower_bound(pts.begin(), pts.end(), ms[i]) - pts.begin();
    double best = kInf;
    for (double ts : theta_sel_) best = std::min(best, std::abs(cum[k] - ts));
    out[i] = best;
  }
  return out;
}

int PsiFunction::branch(double m) const {
  const double T = Theta(m);
  int arg = 0;
  for (std::size_t k = 1; k < theta_sel_.size(); ++k)
    if (std::abs(T - theta_sel_[k]) < std::abs(T - theta_sel_[arg])) arg = static_cast<int>(k);
  return arg;
}

std::vector<double> PsiFunction::shocks() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < selected_.size(); ++k) {
    const double target = 0.5 * (theta_sel_[k] + theta_sel_[k + 1]);
    double lo = selected_[k], hi = selected_[k + 1];
    for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      (Theta(mid) < target ? lo : hi) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

HJProfile admissible_psi(const HalfSpinModel& model, const ProfileOptions& opt) {
  const R1Minima rm = r1_and_minima(model, opt.minima);
  HJProfile prof;
  prof.lambda_field = model.lambda;
  prof.r1 = rm.r1;
  prof.minima = rm.minima;
  for (double m : prof.minima) prof.chi0.push_back(chi0(model, m));

  std::vector<double> tied;
  if (prof.minima.size() == 1) {
    prof.selection = Selection::kSingleton;
    tied = prof.minima;
  } else {
    const double cmin = *std::min_element(prof.chi0.begin(), prof.chi0.end());
    for (std::size_t k = 0; k < prof.minima.size(); ++k)
      if (prof.chi0[k] <= cmin + opt.chi_tie_rel * (1.0 + std::abs(cmin)))
        tied.push_back(prof.minima[k]);
    bool mirrored = model.symmetric();
    for (double x : tied) {
      bool found = false;
      for (double y : tied) found = found || std::abs(x + y) <= 10 * opt.minima.merge_tol;
      mirrored = mirrored && found;
    }
    if (tied.size() == 1)
      prof.selection = Selection::kChiUnique;
    else if (mirrored)
      prof.selection = Selection::kSymmetricPair;
    else
      prof.selection = Selection::kAmbiguous;
  }

  const int n = std::max(opt.samples, 5);
  prof.m.resize(n);
  prof.theta.resize(n);
  for (int k = 0; k < n; ++k) {
    prof.m[k] = -1.0 + 2.0 * k / (n - 1);
    prof.theta[k] = theta_of_m(model, prof.r1, prof.m[k]);
  }
  if (prof.selection == Selection::kAmbiguous) {
    for (double s : tied)
      prof.candidate_psi.push_back(
          PsiFunction(model, prof.r1, prof.minima, {s}, opt.quad_tol)(prof.m));
    return prof;
  }
  prof.selected = tied;
  const PsiFunction psi(model, prof.r1, prof.minima, prof.selected, opt.quad_tol);
  prof.psi = psi(prof.m);
  prof.shocks = psi.shocks();
  prof.branch.resize(n);
  for (int k = 0; k < n; ++k) {
    int b = 0;
    for (std::size_t j = 0; j < prof.shocks.size(); ++j)
      if (prof.m[k] > prof.shocks[j]) b = static_cast<int>(j) + 1;
    prof.branch[k] = b;
  }
  return prof;
}

HJProfile admissible_psi(const ModelSpec& spec, const ProfileOptions& opt) {
  return admissible_psi(HalfSpinModel::from_spec(spec), opt);
}

PsiFunction psi_function(const HalfSpinModel& model, const HJProfile& profile, double quad_tol) {
  std::vector<double> sel = profile.selected;
  if (sel.empty() && !profile.minima.empty()) sel = {profile.minima.front()};
  return PsiFunction(model, profile.r1, profile.minima, sel, quad_tol);
}

StructureReport viscosity_structure_check(const HalfSpinModel& model, const HJProfile& profile,
                                          double deriv_tol) {
  StructureReport rep;
  const auto& m = profile.m;
  const auto& psi = profile.psi;
  const int n = static_cast<int>(psi.size());
  if (n < 5 || m.size() != psi.size()) {
    rep.issues.push_back({"profile", std::nan(""), "no psi table (ambiguous selection?)"});
    return rep;
  }
  const double h = m[1] - m[0];
  auto near = [&](double x, const std::vector<double>& set, double r) {
    for (double y : set)
      if (std::abs(x - y) <= r) return true;
    return false;
  };
  // (i) |psi'| = theta at smooth points, fourth-order central differences
  // on coarse tables the truncation error is estimated from the stencil of step 2h
  auto fd = [&](int k, int s) {
    return (-psi[k + 2 * s] + 8 * psi[k + s] - 8 * psi[k - s] + psi[k - 2 * s]) / (12 * s * h);
  };
  for (int k = 4; k + 4 < n; ++k) {
    if (std::abs(m[k]) > 0.95) continue;
    if (near(m[k], profile.minima, 5 * h) || near(m[k], profile.shocks, 5 * h)) continue;
    const double d = fd(k, 1);
    const double trunc = std::abs(fd(k, 2) - d) / 15.0;
    const double th = theta_of_m(model, profile.r1, m[k]);
    ++rep.derivative_points_checked;
    if (std::abs(std::abs(d) - th) > deriv_tol * std::max(1.0, th) + 2 * trunc)
      rep.issues.push_back({"derivative", m[k],
                            "|psi'| = " + std::to_string(std::abs(d)) + " vs theta " +
                                std::to_string(th)});
  }
  std::vector<double> slope(n - 1);
  for (int k = 0; k + 1 < n; ++k) slope[k] = (psi[k + 1] - psi[k]) / h;
  // (ii) every table maximum is a declared shock with slopes +theta | -theta
  for (int k = 1; k + 1 < n; ++k) {
    if (slope[k - 1] > 0 && slope[k] < 0 && !near(m[k], profile.shocks, 2 * h))
      rep.issues.push_back({"shock", m[k], "undeclared local maximum"});
  }
  for (double s : profile.shocks) {
    const int j = static_cast<int>(std::floor((s - m[0]) / h));
    if (j < 2 || j + 3 >= n) continue;
    const double left = slope[j - 1], right = slope[j + 2];
    const double thl = theta_of_m(model, profile.r1, 0.5 * (m[j - 1] + m[j]));
    const double thr = theta_of_m(model, profile.r1, 0.5 * (m[j + 2] + m[j + 3]));
    const double tol = 10 * deriv_tol * std::max(1.0, thl);
    if (!(left > 0 && right < 0) || std::abs(left - thl) > tol || std::abs(right + thr) > tol)
      rep.issues.push_back({"shock", s, "not an upper kink with slopes +theta/-theta"});
    else
      rep.upper_kinks.push_back(s);
  }
  // at most one + to - change between consecutive minimizers
  std::vector<double> cuts = {-1.0};
  cuts.insert(cuts.end(), profile.minima.begin(), profile.minima.end());
  cuts.push_back(1.0);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    int changes = 0;
    for (int k = 1; k + 1 < n; ++k)
      if (m[k] > cuts[c] && m[k] < cuts[c + 1] && slope[k - 1] > 0 && slope[k] < 0) ++changes;
    if (changes > 1)
      rep.issues.push_back({"shock", 0.5 * (cuts[c] + cuts[c + 1]),
                            "more than one sign change of psi' between minimizers"});
  }
  // (iii) no valley kink away from the minimizer set
  for (int k = 1; k + 1 < n; ++k)
    if (slope[k - 1] < 0 && slope[k] > 0 && !near(m[k], profile.minima, 2 * h))
      rep.issues.push_back({"lower-kink", m[k], "local minimum of psi outside the minimizer set"});
  return rep;
}

}  // namespace mfgs
