#include "mfgs/simplex.hpp"

#include <cmath>
#include <string>

#include "mfgs/error.hpp"

namespace mfgs {

std::int64_t SimplexGrid::count(int N, int d) {
  // C(N+d-1, d-1) with overflow detection
  long double acc = 1;
  std::int64_t exact = 1;
  for (int k = 1; k <= d - 1; ++k) {
    acc = acc * (N + k) / k;
    if (acc > 9e18L) return -1;
    exact = exact * (N + k) / k;  // stays integral at each step
  }
  return exact;
}

SimplexGrid::SimplexGrid(int N, int d, std::int64_t cap) : N_(N), d_(d) {
  if (N < 1) throw DomainError("grid needs N >= 1");
  if (d < 2) throw DomainError("grid needs d >= 2");
  const std::int64_t n = count(N, d);
  if (n < 0 || n > cap)
    throw SizeError("simplex grid with N=" + std::to_string(N) + ", d=" + std::to_string(d) +
                    " exceeds the cap of " + std::to_string(cap) + " points");
  binom_.assign(static_cast<std::size_t>(N + d + 1) * (d + 1), 0);
  for (int a = 0; a <= N + d; ++a) {
    binom_[a * (d + 1)] = 1;
    for (int k = 1; k <= std::min(a, d); ++k)
      binom_[a * (d + 1) + k] =
          binom_[(a - 1) * (d + 1) + k - 1] + (k <= a - 1 ? binom_[(a - 1) * (d + 1) + k] : 0);
  }
  points_.resize(d, n);
  Counts c = Counts::Zero(d);
  c(d - 1) = N;
  for (Eigen::Index i = 0; i < n; ++i) {
    points_.col(i) = c;
    if (i + 1 == n) break;
    // next in lexicographic order: bump the last position j < d-1 that can grow
    int j = d - 2;
    int rest = c(d - 1);
    while (rest == 0) {
      rest += c(j);
      c(j) = 0;
      --j;
    }
    c(j) += 1;
    for (int k = j + 1; k < d; ++k) c(k) = 0;
    int used = 0;
    for (int k = 0; k <= j; ++k) used += c(k);
    c(d - 1) = N - used;
  }
}

std::int64_t SimplexGrid::compositions(int r, int k) const {
  if (k == 0) return r == 0 ? 1 : 0;
  return binom_[static_cast<std::size_t>(r + k - 1) * (d_ + 1) + k - 1];
}

bool SimplexGrid::contains(const Eigen::Ref<const Counts>& c) const {
  return c.size() == d_ && c.minCoeff() >= 0 && c.sum() == N_;
}

Eigen::Index SimplexGrid::index(const Eigen::Ref<const Counts>& c) const {
  if (!contains(c)) throw DomainError("count vector is not on the grid");
  // sum over positions of the number of points with a smaller entry there
  std::int64_t rank = 0;
  int R = N_;
  for (int i = 0; i + 1 < d_; ++i) {
    const int k = d_ - i - 1;  // parts remaining after position i
    // sum_{v < c_i} C(R - v + k - 1, k - 1) = C(R + k, k) - C(R - c_i + k, k)
    rank += binom_[static_cast<std::size_t>(R + k) * (d_ + 1) + k] -
            binom_[static_cast<std::size_t>(R - c(i) + k) * (d_ + 1) + k];
    R -= c(i);
  }
  return static_cast<Eigen::Index>(rank);
}

Eigen::Index SimplexGrid::step(Eigen::Index i, int from, int to) const {
  if (points_(from, i) == 0) return -1;
  Counts c = points_.col(i);
  c(from) -= 1;
  c(to) += 1;
  return index(c);
}

std::vector<Neighbor> SimplexGrid::neighbors(Eigen::Index i) const {
  std::vector<Neighbor> out;
  out.reserve(static_cast<std::size_t>(d_) * (d_ - 1));
  for (int a = 0; a < d_; ++a) {
    if (points_(a, i) == 0) continue;
    for (int b = 0; b < d_; ++b)
      if (b != a) out.push_back({{a, b}, step(i, a, b)});
  }
  return out;
}

double SimplexGrid::log_multinomial(Eigen::Index i) const {
  double s = std::lgamma(N_ + 1.0);
  for (int a = 0; a < d_; ++a) s -= std::lgamma(points_(a, i) + 1.0);
  return s;
}

double SimplexGrid::log_mu(Eigen::Index i) const { return log_multinomial(i) - N_ * std::log(d_); }

}  // namespace mfgs
