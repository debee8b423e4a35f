#include "hrl/haar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

namespace hrl {

namespace {

// Sign of h^(e) on the child with corner bits c: -1 per oscillating axis in
// the upper half.
inline double child_sign(unsigned c, unsigned e) { return (std::popcount(c & e) & 1) ? -1.0 : 1.0; }

// Index (at level m+1) of child c of the level-m cube with coordinates k.
inline std::size_t child_index(int n, int m, const std::array<std::size_t, kMaxDim>& k, unsigned c) {
  std::size_t idx = 0;
  for (int i = n - 1; i >= 0; --i) idx = (idx << (m + 1)) | (2 * k[i] + ((c >> i) & 1U));
  return idx;
}

inline std::array<std::size_t, kMaxDim> decode(int n, int level, std::size_t idx) {
  std::array<std::size_t, kMaxDim> k{};
  const std::size_t mask = (std::size_t{1} << level) - 1;
  for (int i = 0; i < n; ++i) k[i] = (idx >> (i * level)) & mask;
  return k;
}

// Block averages of the level-J values down to level M.
std::vector<double> block_averages(const GridFunction& u, int M) {
  const int n = u.dim();
  std::vector<double> avg(u.values().begin(), u.values().end());
  const unsigned nchild = 1U << n;
  for (int m = u.level() - 1; m >= M; --m) {
    std::vector<double> next(std::size_t{1} << (n * m));
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      const auto k = decode(n, m, idx);
      double s = 0.0;
      for (unsigned c = 0; c < nchild; ++c) s += avg[child_index(n, m, k, c)];
      next[idx] = s / nchild;
    }
    avg.swap(next);
  }
  return avg;
}

}  // namespace

// --------------------------------------------------------- HaarCoefficients

HaarCoefficients::HaarCoefficients(int n, int J) : n_(n), J_(J) {
  if (n < 1 || n > kMaxDim || J < 0) throw std::invalid_argument("bad Haar coefficient shape");
  levels_.resize(static_cast<std::size_t>(J));
  const std::size_t ndir = (std::size_t{1} << n) - 1;
  for (int j = 0; j < J; ++j) levels_[j].assign(ndir << (n * j), 0.0);
}

std::size_t HaarCoefficients::band_offset(int j, Direction e) const {
  if (j < 0 || j >= J_) throw std::invalid_argument("coefficient level out of range");
  if (e.dim() != n_) throw std::invalid_argument("direction dimension mismatch");
  return static_cast<std::size_t>(e.index()) << (n_ * j);
}

std::span<double> HaarCoefficients::band(int j, Direction e) {
  return std::span<double>(levels_[j]).subspan(band_offset(j, e), std::size_t{1} << (n_ * j));
}

std::span<const double> HaarCoefficients::band(int j, Direction e) const {
  return std::span<const double>(levels_[j]).subspan(band_offset(j, e), std::size_t{1} << (n_ * j));
}

double HaarCoefficients::coefficient(const DyadicCube& q, Direction e) const { return band(q.level, e)[q.index()]; }

void HaarCoefficients::set_coefficient(const DyadicCube& q, Direction e, double value) {
  band(q.level, e)[q.index()] = value;
}

void HaarCoefficients::write_csv(std::ostream& os, bool include_zero) const {
  os.precision(17);
  os << "level";
  for (int i = 0; i < n_; ++i) os << ",k" << (i + 1);
  os << ",eps_bits,value\n";
  os << "mean";
  for (int i = 0; i < n_; ++i) os << ",";
  os << ",," << mean_ << "\n";
  for (int j = 0; j < J_; ++j) {
    for (const Direction& e : Direction::all(n_)) {
      const auto b = band(j, e);
      for (std::size_t idx = 0; idx < b.size(); ++idx) {
        if (b[idx] == 0.0 && !include_zero) continue;
        const auto k = decode(n_, j, idx);
        os << j;
        for (int i = 0; i < n_; ++i) os << "," << k[i];
        os << "," << e.str() << "," << b[idx] << "\n";
      }
    }
  }
}

// ------------------------------------------------------ analysis/synthesis

HaarCoefficients haar_analyze(const GridFunction& u) {
  const int n = u.dim();
  const int J = u.level();
  HaarCoefficients out(n, J);
  const unsigned nchild = 1U << n;
  const auto dirs = Direction::all(n);
  std::vector<double> avg(u.values().begin(), u.values().end());
  std::vector<double> a(nchild);
  for (int m = J - 1; m >= 0; --m) {
    std::vector<double> next(std::size_t{1} << (n * m));
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      const auto k = decode(n, m, idx);
      double s = 0.0;
      for (unsigned c = 0; c < nchild; ++c) {
        a[c] = avg[child_index(n, m, k, c)];
        s += a[c];
      }
      next[idx] = s / nchild;
      for (const Direction& e : dirs) {
        double t = 0.0;
        for (unsigned c = 0; c < nchild; ++c) t += child_sign(c, e.bits()) * a[c];
        out.band(m, e)[idx] = t / nchild;
      }
    }
    avg.swap(next);
  }
  out.set_mean(avg[0]);
  return out;
}

GridFunction haar_synthesize(const HaarCoefficients& coef) {
  const int n = coef.dim();
  const int J = coef.level();
  const unsigned nchild = 1U << n;
  const auto dirs = Direction::all(n);
  std::vector<double> avg{coef.mean()};
  for (int m = 0; m < J; ++m) {
    std::vector<double> next(std::size_t{1} << (n * (m + 1)));
    for (std::size_t idx = 0; idx < avg.size(); ++idx) {
      const auto k = decode(n, m, idx);
      for (unsigned c = 0; c < nchild; ++c) {
        double v = avg[idx];
        for (const Direction& e : dirs) v += child_sign(c, e.bits()) * coef.band(m, e)[idx];
        next[child_index(n, m, k, c)] = v;
      }
    }
    avg.swap(next);
  }
  return GridFunction(n, J, std::move(avg));
}

GridFunction haar_function(const DyadicCube& q, Direction e, int J) {
  if (q.level >= J) throw std::invalid_argument("Haar function level must be below the grid level");
  HaarCoefficients c(q.n, J);
  c.set_coefficient(q, e, 1.0);
  return haar_synthesize(c);
}

// ---------------------------------------------------------------- projections

GridFunction directional_project(const GridFunction& u, Direction e) {
  return directional_project(u, e, 0, u.level() - 1);
}

GridFunction directional_project(const GridFunction& u, Direction e, int jmin, int jmax) {
  if (e.dim() != u.dim()) throw std::invalid_argument("direction dimension mismatch");
  const HaarCoefficients c = haar_analyze(u);
  HaarCoefficients kept(u.dim(), u.level());
  for (int j = std::max(jmin, 0); j <= std::min(jmax, u.level() - 1); ++j) {
    const auto src = c.band(j, e);
    std::copy(src.begin(), src.end(), kept.band(j, e).begin());
  }
  return haar_synthesize(kept);
}

std::vector<GridFunction> vector_project(std::span<const GridFunction> v) {
  if (v.empty()) throw std::invalid_argument("vector_project needs at least one component");
  const int n = v[0].dim();
  if (static_cast<int>(v.size()) != n) {
    throw std::invalid_argument("vector_project needs n = " + std::to_string(n) + " components, got " +
                                std::to_string(v.size()));
  }
  std::vector<GridFunction> out;
  out.reserve(v.size());
  for (int j = 0; j < n; ++j) {
    require_same_shape(v[0], v[j]);
    out.push_back(directional_project(v[j], Direction::unit(n, j)));
  }
  return out;
}

GridFunction conditional_expectation(const GridFunction& u, int M) {
  if (M < 0 || M > u.level()) {
    throw std::invalid_argument("conditional expectation level " + std::to_string(M) + " outside 0.." +
                                std::to_string(u.level()));
  }
  const int n = u.dim();
  const int J = u.level();
  const std::vector<double> avg = block_averages(u, M);
  GridFunction out(n, J);
  const int shift = J - M;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const auto c = out.coords(idx);
    std::size_t coarse = 0;
    for (int i = n - 1; i >= 0; --i) coarse = (coarse << M) | (c[i] >> shift);
    out[idx] = avg[coarse];
  }
  return out;
}

GridFunction square_function(const GridFunction& u) {
  const int n = u.dim();
  const int J = u.level();
  const HaarCoefficients c = haar_analyze(u);
  const auto dirs = Direction::all(n);
  const unsigned nchild = 1U << n;
  // acc holds the partial sum over ancestors at each level-m cube.
  std::vector<double> acc{0.0};
  for (int m = 0; m < J; ++m) {
    std::vector<double> next(std::size_t{1} << (n * (m + 1)));
    for (std::size_t idx = 0; idx < acc.size(); ++idx) {
      double s = acc[idx];
      for (const Direction& e : dirs) {
        const double v = c.band(m, e)[idx];
        s += v * v;
      }
      const auto k = decode(n, m, idx);
      for (unsigned ch = 0; ch < nchild; ++ch) next[child_index(n, m, k, ch)] = s;
    }
    acc.swap(next);
  }
  for (double& v : acc) v = std::sqrt(v);
  return GridFunction(n, J, std::move(acc));
}

double bmo_d_norm(const GridFunction& u) {
  const int n = u.dim();
  const int J = u.level();
  const HaarCoefficients c = haar_analyze(u);
  const auto dirs = Direction::all(n);
  const unsigned nchild = 1U << n;
  // tail[idx] = sum over W inside the cube of sum_e c_W^2 |W|, bottom-up.
  std::vector<double> tail(std::size_t{1} << (n * J), 0.0);
  double best = 0.0;
  for (int m = J - 1; m >= 0; --m) {
    const double vol = std::ldexp(1.0, -n * m);
    std::vector<double> next(std::size_t{1} << (n * m));
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      const auto k = decode(n, m, idx);
      double s = 0.0;
      for (unsigned ch = 0; ch < nchild; ++ch) s += tail[child_index(n, m, k, ch)];
      for (const Direction& e : dirs) {
        const double v = c.band(m, e)[idx];
        s += v * v * vol;
      }
      next[idx] = s;
      best = std::max(best, s / vol);
    }
    tail.swap(next);
  }
  return std::sqrt(c.mean() * c.mean() + best);
}

}  // namespace hrl
