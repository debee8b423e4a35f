#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrl {

inline constexpr int kMaxDim = 3;

// Thrown when a computation would exceed a configured resource cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Oscillation pattern of a Haar function: bit i set means the function
/// oscillates along axis i (0-based). The all-zero pattern is not a direction.
class Direction {
 public:
  Direction(int n, unsigned bits);

  static Direction unit(int n, int axis);
  static std::vector<Direction> all(int n);

  int dim() const { return n_; }
  unsigned bits() const { return bits_; }
  bool oscillates(int axis) const { return (bits_ >> axis) & 1U; }
  // Position in all(n), 0 .. 2^n - 2.
  int index() const { return static_cast<int>(bits_) - 1; }
  // "10" for (1,0): axis 0 first.
  std::string str() const;

  bool operator==(const Direction&) const = default;

 private:
  int n_;
  unsigned bits_;
};

/// Dyadic cube prod_i [k_i 2^-j, (k_i+1) 2^-j) of the unit torus.
struct DyadicCube {
  int n = 1;
  int level = 0;
  std::array<std::int64_t, kMaxDim> k{};

  DyadicCube() = default;
  DyadicCube(int n, int level, std::array<std::int64_t, kMaxDim> k);

  double side() const;
  double volume() const;
  double diameter() const;
  // Linear index inside its level, axis 0 fastest.
  std::size_t index() const;
  static DyadicCube from_index(int n, int level, std::size_t index);

  // The ancestor lambda levels up; requires lambda <= level.
  DyadicCube predecessor(int lambda) const;
  bool contains(const DyadicCube& other) const;
  // Lexicographic rank (axis 0 fastest) of this cube inside predecessor(lambda).
  std::size_t rank_in_predecessor(int lambda) const;

  std::string str() const;
  bool operator==(const DyadicCube&) const = default;
};

/// Piecewise-constant real field on the 2^(nJ)-cell dyadic grid of [0,1)^n.
/// Cell with integer coordinates (c_0, .., c_{n-1}) sits at index
/// c_0 + c_1 N + c_2 N^2, N = 2^J.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(int n, int J);
  GridFunction(int n, int J, std::vector<double> values);

  int dim() const { return n_; }
  int level() const { return J_; }
  std::size_t side() const { return std::size_t{1} << J_; }
  std::size_t size() const { return values_.size(); }
  double cell_volume() const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::array<std::size_t, kMaxDim> coords(std::size_t index) const;
  std::size_t index(const std::array<std::size_t, kMaxDim>& c) const;

  double mean() const;
  bool same_shape(const GridFunction& other) const { return n_ == other.n_ && J_ == other.J_; }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

  // Flat little-endian binary: "HRL1", uint32 n, uint32 J, uint32 reserved,
  // then 2^(nJ) float64 values.
  void write_binary(std::ostream& os) const;
  static GridFunction read_binary(std::istream& is);

 private:
  int n_ = 0;
  int J_ = 0;
  std::vector<double> values_;
};

void require_same_shape(const GridFunction& a, const GridFunction& b);

// L^2 inner product with the Lebesgue measure of the torus.
double inner(const GridFunction& a, const GridFunction& b);
double l2_norm(const GridFunction& u);
double lp_norm(const GridFunction& u, double p);

using FieldFn = std::function<double(std::span<const double>)>;

/// Cell averages of fn by tensor Gauss-Legendre quadrature with
/// quad_order in {1, 3, 5} points per axis.
GridFunction embed(const FieldFn& fn, int n, int J, int quad_order = 3);

}  // namespace hrl
