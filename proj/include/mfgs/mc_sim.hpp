#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "mfgs/spectral.hpp"

namespace mfgs {

// Stateless hash of (seed, stream, counter): each path owns a stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  double uniform();      // in (0, 1)
  double exponential();  // rate 1
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct PathSample {
  std::vector<double> jump_times;
  std::vector<Eigen::Index> states;  // states[0] is the start
  double integral = 0.0;             // int_0^T potential(m(t)) dt
  Eigen::Index terminal = 0;
};

// A jump process with symmetric-or-not nonnegative rates and a per-state potential.
struct JumpChain {
  SparseRM rates;
  Eigen::VectorXd exit_rate;
  Eigen::VectorXd potential;  // Feynman-Kac weight is exp(N * integral)
  int N = 1;
};

JumpChain tilted_chain(const LumpedOperator& op);    // rates of S_N, potential F_g
JumpChain untilted_chain(const LumpedOperator& op);  // rates c_a K_ab, potential F
JumpChain ground_chain(const LumpedOperator& op, const GroundStateSolution& gs);

PathSample simulate_path(const JumpChain& chain, Eigen::Index start, double T, std::uint64_t seed,
                         std::uint64_t path_index = 0, bool record = true);

struct FeynmanKacEstimate {
  Eigen::Index start = 0;
  std::optional<Eigen::Index> target;  // none: unconstrained expectation
  double T = 0.0;
  int N = 0;
  long n_paths = 0;
  std::uint64_t seed = 0;
  long hits = 0;
  double log_mean = 0.0;  // natural log of the mean weight (with any prefactor)
  double mean = 0.0;
  double std_error = 0.0;
  double log_z = 0.0;     // log_mean / N
  double log_z_se = 0.0;  // delta method: std_error / (mean N)
  bool no_hit = false;
};

// Mean of exp(N int potential) 1{m(T) = target}, times exp(log_prefactor).
FeynmanKacEstimate estimate_weighted(const JumpChain& chain, Eigen::Index start,
                                     std::optional<Eigen::Index> target, double T, long n_paths,
                                     std::uint64_t seed, double log_prefactor = 0.0);

// <target| exp(T S_N) |start> under the default tilt.
FeynmanKacEstimate estimate_Z(const LumpedOperator& op, Eigen::Index start,
                              std::optional<Eigen::Index> target, double T, long n_paths,
                              std::uint64_t seed);
// Same quantity from g = 1 dynamics with the sqrt(mu(start)/mu(target)) prefactor.
FeynmanKacEstimate estimate_Z_untilted(const LumpedOperator& op, Eigen::Index start,
                                       Eigen::Index target, double T, long n_paths,
                                       std::uint64_t seed);

struct GroundChainSample {
  Eigen::VectorXd empirical;  // terminal distribution over the grid
  Eigen::MatrixXd flux;       // jump counts i -> j during [T/2, T], summed over paths
  long n_paths = 0;
  long total_jumps = 0;
};

// Flux is only recorded for grids of at most max_flux_states points.
GroundChainSample sample_ground_chain(const LumpedOperator& op, const GroundStateSolution& gs,
                                      Eigen::Index start, double T, long n_paths,
                                      std::uint64_t seed, Eigen::Index max_flux_states = 2000);

double total_variation(const Eigen::Ref<const Eigen::VectorXd>& p,
                       const Eigen::Ref<const Eigen::VectorXd>& q);

}  // namespace mfgs
