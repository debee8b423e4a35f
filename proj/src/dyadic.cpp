#include "hrl/dyadic.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace hrl {

namespace {

void check_dim(int n) {
  if (n < 1 || n > kMaxDim) {
    throw std::invalid_argument("dimension must be in 1..3, got " + std::to_string(n));
  }
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffU);
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::invalid_argument("truncated HRL1 header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

// ---------------------------------------------------------------- Direction

Direction::Direction(int n, unsigned bits) : n_(n), bits_(bits) {
  check_dim(n);
  if (bits == 0 || bits >= (1U << n)) {
    throw std::invalid_argument("direction bits must be a nonzero pattern of " + std::to_string(n) + " bits");
  }
}

Direction Direction::unit(int n, int axis) {
  check_dim(n);
  if (axis < 0 || axis >= n) throw std::invalid_argument("axis out of range");
  return Direction(n, 1U << axis);
}

std::vector<Direction> Direction::all(int n) {
  check_dim(n);
  std::vector<Direction> out;
  for (unsigned b = 1; b < (1U << n); ++b) out.emplace_back(n, b);
  return out;
}

std::string Direction::str() const {
  std::string s;
  for (int i = 0; i < n_; ++i) s += oscillates(i) ? '1' : '0';
  return s;
}

// --------------------------------------------------------------- DyadicCube

DyadicCube::DyadicCube(int n_, int level_, std::array<std::int64_t, kMaxDim> k_) : n(n_), level(level_), k(k_) {
  check_dim(n);
  if (level < 0 || level > 62) throw std::invalid_argument("cube level out of range");
  const std::int64_t extent = std::int64_t{1} << level;
  for (int i = 0; i < n; ++i) {
    if (k[i] < 0 || k[i] >= extent) {
      throw std::invalid_argument("cube coordinate out of range at level " + std::to_string(level));
    }
  }
  for (int i = n; i < kMaxDim; ++i) k[i] = 0;
}

double DyadicCube::side() const { return std::ldexp(1.0, -level); }
double DyadicCube::volume() const { return std::ldexp(1.0, -n * level); }
double DyadicCube::diameter() const { return side() * std::sqrt(static_cast<double>(n)); }

std::size_t DyadicCube::index() const {
  std::size_t idx = 0;
  for (int i = n - 1; i >= 0; --i) idx = (idx << level) | static_cast<std::size_t>(k[i]);
  return idx;
}

DyadicCube DyadicCube::from_index(int n, int level, std::size_t index) {
  std::array<std::int64_t, kMaxDim> k{};
  const std::size_t mask = (std::size_t{1} << level) - 1;
  for (int i = 0; i < n; ++i) {
    k[i] = static_cast<std::int64_t>((index >> (i * level)) & mask);
  }
  return DyadicCube(n, level, k);
}

DyadicCube DyadicCube::predecessor(int lambda) const {
  if (lambda < 0 || lambda > level) throw std::invalid_argument("predecessor beyond level 0");
  std::array<std::int64_t, kMaxDim> kp{};
  for (int i = 0; i < n; ++i) kp[i] = k[i] >> lambda;
  return DyadicCube(n, level - lambda, kp);
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.n != n || other.level < level) return false;
  const int d = other.level - level;
  for (int i = 0; i < n; ++i) {
    if ((other.k[i] >> d) != k[i]) return false;
  }
  return true;
}

std::size_t DyadicCube::rank_in_predecessor(int lambda) const {
  std::size_t r = 0;
  const std::int64_t mask = (std::int64_t{1} << lambda) - 1;
  for (int i = n - 1; i >= 0; --i) r = (r << lambda) | static_cast<std::size_t>(k[i] & mask);
  return r;
}

std::string DyadicCube::str() const {
  std::ostringstream os;
  os << "Q(j=" << level << ";";
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << k[i];
  os << ")";
  return os.str();
}

// ------------------------------------------------------------- GridFunction

GridFunction::GridFunction(int n, int J) : n_(n), J_(J) {
  check_dim(n);
  if (J < 0 || n * J > 30) throw std::invalid_argument("grid level out of range");
  values_.assign(std::size_t{1} << (n * J), 0.0);
}

GridFunction::GridFunction(int n, int J, std::vector<double> values) : GridFunction(n, J) {
  if (values.size() != values_.size()) {
    throw std::invalid_argument("value count " + std::to_string(values.size()) + " does not match 2^(nJ) = " +
                                std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("non-finite value at cell " + std::to_string(i));
  }
  values_ = std::move(values);
}

double GridFunction::cell_volume() const { return std::ldexp(1.0, -n_ * J_); }

std::array<std::size_t, kMaxDim> GridFunction::coords(std::size_t index) const {
  std::array<std::size_t, kMaxDim> c{};
  const std::size_t mask = side() - 1;
  for (int i = 0; i < n_; ++i) c[i] = (index >> (i * J_)) & mask;
  return c;
}

std::size_t GridFunction::index(const std::array<std::size_t, kMaxDim>& c) const {
  std::size_t idx = 0;
  for (int i = n_ - 1; i >= 0; --i) idx = (idx << J_) | c[i];
  return idx;
}

double GridFunction::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void GridFunction::write_binary(std::ostream& os) const {
  os.write("HRL1", 4);
  put_u32(os, static_cast<std::uint32_t>(n_));
  put_u32(os, static_cast<std::uint32_t>(J_));
  put_u32(os, 0);
  for (double v : values_) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

GridFunction GridFunction::read_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "HRL1", 4) != 0) throw std::invalid_argument("bad magic, expected HRL1");
  const int n = static_cast<int>(get_u32(is));
  const int J = static_cast<int>(get_u32(is));
  (void)get_u32(is);
  GridFunction u(n, J);
  for (double& v : u.values_) {
    std::uint64_t bits;
    is.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if (!is) throw std::invalid_argument("truncated HRL1 payload");
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(&v, &bits, sizeof bits);
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in HRL1 payload");
  }
  return u;
}

void require_same_shape(const GridFunction& a, const GridFunction& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("grid shape mismatch: (n=" + std::to_string(a.dim()) + ", J=" +
                                std::to_string(a.level()) + ") vs (n=" + std::to_string(b.dim()) +
                                ", J=" + std::to_string(b.level()) + ")");
  }
}

double inner(const GridFunction& a, const GridFunction& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.cell_volume();
}

double l2_norm(const GridFunction& u) { return std::sqrt(inner(u, u)); }

double lp_norm(const GridFunction& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm requires finite p >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (double v : u.values()) s += v * v;
  } else {
    for (double v : u.values()) s += std::pow(std::abs(v), p);
  }
  return std::pow(s * u.cell_volume(), 1.0 / p);
}

GridFunction embed(const FieldFn& fn, int n, int J, int quad_order) {
  // Gauss-Legendre nodes/weights on [0,1].
  std::vector<double> nodes, weights;
  switch (quad_order) {
    case 1:
      nodes = {0.5};
      weights = {1.0};
      break;
    case 3: {
      const double a = std::sqrt(0.6) / 2.0;
      nodes = {0.5 - a, 0.5, 0.5 + a};
      weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    case 5: {
      const double x1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double x2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      nodes = {0.5 - x2 / 2, 0.5 - x1 / 2, 0.5, 0.5 + x1 / 2, 0.5 + x2 / 2};
      weights = {w2 / 2, w1 / 2, 64.0 / 225.0, w1 / 2, w2 / 2};
      break;
    }
    default:
      throw std::invalid_argument("quad_order must be 1, 3 or 5");
  }
  GridFunction u(n, J);
  const double h = std::ldexp(1.0, -J);
  const std::size_t q = nodes.size();
  std::size_t qn = 1;
  for (int i = 0; i < n; ++i) qn *= q;
  std::array<double, kMaxDim> x{};
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const auto c = u.coords(idx);
    double acc = 0.0;
    for (std::size_t t = 0; t < qn; ++t) {
      std::size_t r = t;
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        const std::size_t qi = r % q;
        r /= q;
        x[i] = (static_cast<double>(c[i]) + nodes[qi]) * h;
        w *= weights[qi];
      }
      const double v = fn(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample in cell " + std::to_string(idx));
      acc += w * v;
    }
    u[idx] = acc;
  }
  return u;
}

}  // namespace hrl
