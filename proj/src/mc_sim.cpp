#include "mfgs/mc_sim.hpp"

#include <cmath>
#include <limits>

#include "mfgs/error.hpp"
#include "mfgs/parallel.hpp"

namespace mfgs {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_state(const JumpChain& c, Eigen::Index i) {
  if (i < 0 || i >= c.exit_rate.size()) throw DomainError("state index outside the grid");
}

// Streaming log-sum-exp in a fixed order.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;
  void add(double x) {
    if (x <= max) {
      scaled += std::exp(x - max);
    } else {
      scaled = scaled * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  double log() const { return scaled > 0 ? max + std::log(scaled) : max; }
};

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix(seed ^ splitmix(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix(key_ + splitmix(counter_++)); }

double CounterRng::uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double CounterRng::exponential() { return -std::log(uniform()); }

JumpChain tilted_chain(const LumpedOperator& op) {
  return {op.S.offdiag, op.exit_rate, op.Fg, op.N()};
}

JumpChain untilted_chain(const LumpedOperator& op) {
  JumpChain c;
  c.N = op.N();
  const auto& grid = op.grid;
  const int d = op.spec.d;
  std::vector<Eigen::Triplet<double>> trip;
  c.exit_rate = Eigen::VectorXd::Zero(grid.size());
  c.potential.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto cnt = grid.counts(i);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        if (a == b || cnt(a) == 0 || op.spec.kernel(a, b) == 0.0) continue;
        const double r = cnt(a) * op.spec.kernel(a, b);
        trip.emplace_back(i, grid.step(i, a, b), r);
        c.exit_rate(i) += r;
      }
    c.potential(i) = eval_F(op.spec, grid.coords(i));
  }
  c.rates.resize(grid.size(), grid.size());
  c.rates.setFromTriplets(trip.begin(), trip.end());
  return c;
}

JumpChain ground_chain(const LumpedOperator& op, const GroundStateSolution& gs) {
  JumpChain c;
  c.N = op.N();
  c.rates = doob_generator(op, gs).offdiag;
  c.exit_rate = Eigen::VectorXd::Zero(c.rates.rows());
  for (Eigen::Index i = 0; i < c.rates.outerSize(); ++i)
    for (SparseRM::InnerIterator it(c.rates, i); it; ++it) c.exit_rate(i) += it.value();
  c.potential = Eigen::VectorXd::Zero(c.rates.rows());
  return c;
}

PathSample simulate_path(const JumpChain& chain, Eigen::Index start, double T, std::uint64_t seed,
                         std::uint64_t path_index, bool record) {
  check_state(chain, start);
  if (T < 0) throw DomainError("simulation time must be nonnegative");
  CounterRng rng(seed, path_index);
  PathSample p;
  Eigen::Index s = start;
  if (record) p.states.push_back(s);
  double t = 0.0;
  while (true) {
    const double total = chain.exit_rate(s);
    const double hold = total > 0 ? rng.exponential() / total
                                   : std::numeric_limits<double>::infinity();
    if (t + hold >= T) {
      p.integral += (T - t) * chain.potential(s);
      break;
    }
    p.integral += hold * chain.potential(s);
    t += hold;
    double u = rng.uniform() * total;
    Eigen::Index next = -1;
    for (SparseRM::InnerIterator it(chain.rates, s); it; ++it) {
      next = it.col();
      u -= it.value();
      if (u < 0) break;
    }
    s = next;
    if (record) {
      p.jump_times.push_back(t);
      p.states.push_back(s);
    }
  }
  p.terminal = s;
  return p;
}

FeynmanKacEstimate estimate_weighted(const JumpChain& chain, Eigen::Index start,
                                     std::optional<Eigen::Index> target, double T, long n_paths,
                                     std::uint64_t seed, double log_prefactor) {
  if (n_paths < 100) throw DomainError("estimator needs at least 100 paths");
  check_state(chain, start);
  if (target) check_state(chain, *target);
  std::vector<double> logw(n_paths);
  std::vector<char> hit(n_paths);
  ExceptionGuard guard;
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (long p = 0; p < n_paths; ++p) guard.run([&] {
    const PathSample s = simulate_path(chain, start, T, seed, static_cast<std::uint64_t>(p), false);
    hit[p] = !target || s.terminal == *target;
    logw[p] = chain.N * s.integral;
  });
  guard.rethrow();
  FeynmanKacEstimate e;
  e.start = start;
  e.target = target;
  e.T = T;
  e.N = chain.N;
  e.n_paths = n_paths;
  e.seed = seed;
  LogSum s1, s2;
  for (long p = 0; p < n_paths; ++p)
    if (hit[p]) {
      ++e.hits;
      s1.add(logw[p]);
      s2.add(2.0 * logw[p]);
    }
  if (e.hits == 0) {
    e.no_hit = true;
    e.log_mean = -std::numeric_limits<double>::infinity();
    e.log_z = e.log_mean;
    return e;
  }
  const double n = static_cast<double>(n_paths);
  e.log_mean = s1.log() - std::log(n) + log_prefactor;
  // sample variance relative to mean^2: (E[X^2]/E[X]^2 - 1) n/(n-1)
  const double ratio = std::exp(s2.log() - std::log(n) - 2.0 * (s1.log() - std::log(n)));
  const double rel_var = std::max(0.0, ratio - 1.0) * n / (n - 1.0);
  const double rel_se = std::sqrt(rel_var / n);
  e.mean = std::exp(e.log_mean);
  e.std_error = e.mean * rel_se;
  e.log_z = e.log_mean / chain.N;
  e.log_z_se = rel_se / chain.N;
  return e;
}

FeynmanKacEstimate estimate_Z(const LumpedOperator& op, Eigen::Index start,
                              std::optional<Eigen::Index> target, double T, long n_paths,
                              std::uint64_t seed) {
  return estimate_weighted(tilted_chain(op), start, target, T, n_paths, seed);
}

FeynmanKacEstimate estimate_Z_untilted(const LumpedOperator& op, Eigen::Index start,
                                       Eigen::Index target, double T, long n_paths,
                                       std::uint64_t seed) {
  const double pre = 0.5 * (op.grid.log_mu(start) - op.grid.log_mu(target));
  return estimate_weighted(untilted_chain(op), start, target, T, n_paths, seed, pre);
}

GroundChainSample sample_ground_chain(const LumpedOperator& op, const GroundStateSolution& gs,
                                      Eigen::Index start, double T, long n_paths,
                                      std::uint64_t seed, Eigen::Index max_flux_states) {
  if (n_paths < 1) throw DomainError("need at least one path");
  const JumpChain chain = ground_chain(op, gs);
  check_state(chain, start);
  const Eigen::Index n = op.grid.size();
  const bool want_flux = n <= max_flux_states;
  GroundChainSample out;
  out.n_paths = n_paths;
  out.empirical = Eigen::VectorXd::Zero(n);
  if (want_flux) out.flux = Eigen::MatrixXd::Zero(n, n);
  // integer counts: the merged totals do not depend on scheduling
  ExceptionGuard guard;
#pragma omp parallel num_threads(worker_threads())
  {
    Eigen::VectorXd emp = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd flux = want_flux ? Eigen::MatrixXd::Zero(n, n) : Eigen::MatrixXd();
    long jumps = 0;
#pragma omp for schedule(static)
    for (long p = 0; p < n_paths; ++p) guard.run([&] {
      const PathSample s =
          simulate_path(chain, start, T, seed, static_cast<std::uint64_t>(p), true);
      emp(s.terminal) += 1.0;
      jumps += static_cast<long>(s.jump_times.size());
      if (want_flux)
        for (std::size_t k = 0; k < s.jump_times.size(); ++k)
          if (s.jump_times[k] >= 0.5 * T) flux(s.states[k], s.states[k + 1]) += 1.0;
    });
#pragma omp critical
    {
      out.empirical += emp;
      out.total_jumps += jumps;
      if (want_flux) out.flux += flux;
    }
  }
  guard.rethrow();
  out.empirical /= static_cast<double>(n_paths);
  return out;
}

double total_variation(const Eigen::Ref<const Eigen::VectorXd>& p,
                       const Eigen::Ref<const Eigen::VectorXd>& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace mfgs
