#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hrl/dyadic.hpp"

namespace hrl {

using cplx = std::complex<double>;

/// Integer frequency of a grid mode, components in (-N/2, N/2].
struct Mode {
  int n = 1;
  int half = 1;  // N/2
  std::array<int, kMaxDim> k{};

  bool is_zero() const;
  bool nyquist(int axis) const { return k[axis] == half; }
  double norm() const;
};

/// Discrete Fourier coefficients u_hat(k) = N^-n sum_x u(x) e^{-2 pi i k.x},
/// stored in the GridFunction cell order.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int n, int J);

  static SpectralField forward(const GridFunction& u);
  // Real part of the inverse transform; max |imag| is reported if requested.
  GridFunction inverse(double* max_imag = nullptr) const;

  int dim() const { return n_; }
  int level() const { return J_; }
  std::size_t size() const { return data_.size(); }
  Mode mode(std::size_t idx) const;
  std::size_t index_of(const Mode& m) const;

  cplx& operator[](std::size_t i) { return data_[i]; }
  cplx operator[](std::size_t i) const { return data_[i]; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

 private:
  int n_ = 0;
  int J_ = 0;
  std::vector<cplx> data_;
};

using Symbol = std::function<cplx(const Mode&)>;

enum class ZeroModePolicy { zero, reject };

/// Fourier multiplier. The symbol is never evaluated at the zero mode.
struct MultiplierOp {
  std::string name;
  Symbol symbol;
  ZeroModePolicy zero_mode = ZeroModePolicy::zero;

  GridFunction apply(const GridFunction& u) const;
  GridFunction apply_adjoint(const GridFunction& u) const;
  void apply_inplace(SpectralField& s, bool adjoint = false) const;
};

// Odd symbols drop their +-i factor on Nyquist modes of their axis, so real
// fields stay real.
MultiplierOp riesz_op(int axis);
MultiplierOp derivative_op(int axis);
MultiplierOp antiderivative_op(int axis);

GridFunction riesz(const GridFunction& u, int axis);
GridFunction derivative(const GridFunction& u, int axis);
GridFunction antiderivative(const GridFunction& u, int axis);

enum class InverseMode { direct, composite };

/// Inverse of R_{i0}. Rejects fields with spectral mass on k_{i0} = 0 or on
/// the Nyquist plane k_{i0} = N/2.
GridFunction riesz_inverse(const GridFunction& u, int i0, InverseMode mode = InverseMode::direct);
// Throws naming the first offending mode; tol is relative to ||u||_2.
void check_riesz_admissible(const GridFunction& u, int i0, double tol = 1e-12);
void check_riesz_admissible(const SpectralField& s, double norm, int i0, double tol = 1e-12);

// b(t) = 15/16 (1 - t^2)^2 on [-1, 1].
double kernel_b(double t);
// d(x) = prod b(x_i) - 2^n prod b(2 x_i).
double kernel_d(std::span<const double> x);

inline constexpr int kScaleMin = -6;
inline constexpr int kScaleMaxOffset = 16;

/// Discrete d_s at grid level J: the cell-pair average of the continuum kernel,
/// as a 1D tent-weighted periodized profile of b_s tensorized over axes.
class ResolvingKernel {
 public:
  ResolvingKernel(int n, int J, int s);

  int dim() const { return n_; }
  int level() const { return J_; }
  int scale() const { return s_; }

  // Multiplier of beta_s (upper) and beta_{s+1}; delta = beta_s - beta_{s+1}.
  double beta_symbol(const Mode& m, int which) const;
  double delta_symbol(const Mode& m) const { return beta_symbol(m, 0) - beta_symbol(m, 1); }

  // Sum and first moment of the unperiodized discrete d_s (cell units).
  double total_mass() const;
  double first_moment(int axis) const;

 private:
  int n_, J_, s_;
  std::vector<double> taps_[2];  // 1D taps, centre at index radius_[w]
  long radius_[2];
  std::vector<double> hat_[2];  // 1D periodized DFT, indexed by mode m mod N
};

// Shared immutable kernel for (n, J, s); cached.
const ResolvingKernel& resolving_kernel(int n, int J, int s);

void check_scale(int J, int s);
GridFunction delta_conv(const GridFunction& u, int s);
GridFunction beta_conv(const GridFunction& u, int s);

}  // namespace hrl
