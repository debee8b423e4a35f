#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's transforms.

#include <cmath>
#include <vector>

#include "hrl/dyadic.hpp"

namespace oracle {

// h_Q^(e) evaluated at point x by direct geometry.
inline double haar_at(const hrl::DyadicCube& q, unsigned ebits, const double* x) {
  double v = 1.0;
  const double side = std::ldexp(1.0, -q.level);
  for (int i = 0; i < q.n; ++i) {
    const double lo = q.k[i] * side;
    if (x[i] < lo || x[i] >= lo + side) return 0.0;
    if ((ebits >> i) & 1U) v *= (x[i] < lo + side / 2) ? 1.0 : -1.0;
  }
  return v;
}

inline std::vector<double> cell_center(const hrl::GridFunction& u, std::size_t idx) {
  const auto c = u.coords(idx);
  std::vector<double> x(u.dim());
  const double h = std::ldexp(1.0, -u.level());
  for (int i = 0; i < u.dim(); ++i) x[i] = (c[i] + 0.5) * h;
  return x;
}

// <u, h_Q^(e)> / |Q| by direct summation over cells.
inline double haar_coefficient(const hrl::GridFunction& u, const hrl::DyadicCube& q, unsigned ebits) {
  double s = 0.0;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const auto x = cell_center(u, idx);
    s += u[idx] * haar_at(q, ebits, x.data());
  }
  return s * u.cell_volume() / q.volume();
}

// All cubes of levels 0..J-1.
inline std::vector<hrl::DyadicCube> all_cubes(int n, int J) {
  std::vector<hrl::DyadicCube> out;
  for (int j = 0; j < J; ++j) {
    const std::size_t count = std::size_t{1} << (n * j);
    for (std::size_t i = 0; i < count; ++i) out.push_back(hrl::DyadicCube::from_index(n, j, i));
  }
  return out;
}

// max over dyadic Q (levels 0..J-1) of |Q|^-1 int_Q |u - m_Q|^2, plus mean^2.
inline double bmo_oscillation(const hrl::GridFunction& u) {
  double best = 0.0;
  for (const auto& q : all_cubes(u.dim(), u.level())) {
    double s = 0.0, s2 = 0.0, cnt = 0.0;
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
      const auto x = cell_center(u, idx);
      if (haar_at(q, 0, x.data()) == 0.0) continue;
      s += u[idx];
      s2 += u[idx] * u[idx];
      cnt += 1.0;
    }
    const double m = s / cnt;
    best = std::max(best, s2 / cnt - m * m);
  }
  const double mean = u.mean();
  return std::sqrt(mean * mean + best);
}

// int_a^b sin(2 pi k x) dx.
inline double sin_integral(double k, double a, double b) {
  return (std::cos(2 * M_PI * k * a) - std::cos(2 * M_PI * k * b)) / (2 * M_PI * k);
}

}  // namespace oracle
