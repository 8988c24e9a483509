#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mfgs {

using Counts = Eigen::VectorXi;

struct Move {
  int from_label;
  int to_label;
};

struct Neighbor {
  Move move;
  Eigen::Index target;
};

inline constexpr std::int64_t kDefaultGridCap = 5'000'000;

// Delta_d^N stored as integer count vectors (columns), lexicographically ascending.
class SimplexGrid {
 public:
  SimplexGrid(int N, int d, std::int64_t cap = kDefaultGridCap);

  int N() const { return N_; }
  int d() const { return d_; }
  Eigen::Index size() const { return points_.cols(); }

  auto counts(Eigen::Index i) const { return points_.col(i); }
  const Eigen::MatrixXi& points() const { return points_; }
  Eigen::VectorXd coords(Eigen::Index i) const { return points_.col(i).cast<double>() / N_; }

  // Rank of a count vector; throws DomainError when it is not on the grid.
  Eigen::Index index(const Eigen::Ref<const Counts>& c) const;
  bool contains(const Eigen::Ref<const Counts>& c) const;

  // Every move with a nonempty source label, regardless of rates.
  std::vector<Neighbor> neighbors(Eigen::Index i) const;
  // Target of moving one unit from a to b, or -1 when label a is empty.
  Eigen::Index step(Eigen::Index i, int from, int to) const;

  double log_multinomial(Eigen::Index i) const;
  double log_mu(Eigen::Index i) const;  // log of c_N(m) / d^N

  // Number of points of Delta_d^N, or -1 on overflow of int64.
  static std::int64_t count(int N, int d);

 private:
  std::int64_t compositions(int r, int k) const;  // ways to write r as k ordered parts

  int N_, d_;
  Eigen::MatrixXi points_;
  std::vector<std::int64_t> binom_;  // binom_[n * (d_ + 1) + k] = C(n, k)
};

// For d = 2, point i has counts (i, N - i) and magnetization (N - 2i)/N.
inline double grid_magnetization(const SimplexGrid& g, Eigen::Index i) {
  return static_cast<double>(g.N() - 2 * i) / g.N();
}

}  // namespace mfgs
