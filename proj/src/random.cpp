#include "hrl/random.hpp"

#include <algorithm>

#include "hrl/fourier.hpp"

namespace hrl {

GridFunction random_field(int n, int J, std::uint64_t seed, std::uint64_t stream) {
  GridFunction u(n, J);
  CounterRng rng(seed, stream);
  for (double& v : u.values()) v = rng.uniform(-1.0, 1.0);
  return u;
}

GridFunction random_mean_zero_field(int n, int J, std::uint64_t seed, std::uint64_t stream) {
  GridFunction u = random_field(n, J, seed, stream);
  const double m = u.mean();
  for (double& v : u.values()) v -= m;
  return u;
}

GridFunction random_haar_field(int n, int J, int jmin, int jmax, std::uint64_t seed, std::uint64_t stream,
                               std::span<const Direction> dirs) {
  if (jmin < 0 || jmax >= J || jmin > jmax) throw std::invalid_argument("Haar level window outside 0..J-1");
  std::vector<Direction> use(dirs.begin(), dirs.end());
  if (use.empty()) use = Direction::all(n);
  HaarCoefficients c(n, J);
  CounterRng rng(seed, stream);
  for (int j = jmin; j <= jmax; ++j) {
    for (const Direction& e : use) {
      for (double& v : c.band(j, e)) v = rng.uniform(-1.0, 1.0);
    }
  }
  return haar_synthesize(c);
}

GridFunction random_cone_field(int n, int J, int i0, int kmax, std::uint64_t seed, std::uint64_t stream) {
  if (i0 < 0 || i0 >= n) throw std::invalid_argument("axis out of range");
  const int half = (1 << J) / 2;
  if (kmax < 1 || kmax >= half) throw std::invalid_argument("cone band must satisfy 1 <= kmax < N/2");
  SpectralField s(n, J);
  CounterRng rng(seed, stream);
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const Mode m = s.mode(idx);
    int other = 0;
    bool in_band = true;
    for (int i = 0; i < n; ++i) {
      if (std::abs(m.k[i]) > kmax) in_band = false;
      if (i != i0) other = std::max(other, std::abs(m.k[i]));
    }
    if (!in_band || m.k[i0] <= 0 || 2 * m.k[i0] < other) continue;
    // One draw per Hermitian pair, keyed by the representative with k_{i0} > 0.
    const double re = rng.normal(), im = rng.normal();
    s[idx] = cplx(re, im);
    Mode neg = m;
    for (int i = 0; i < n; ++i) neg.k[i] = -m.k[i];
    s[s.index_of(neg)] = cplx(re, -im);
  }
  return s.inverse();
}

}  // namespace hrl
