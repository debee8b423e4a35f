#include "hrl/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace hrl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int J, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_tuple(n, J, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t total = std::size_t{1} << (n * J);
    int dims[kMaxDim];
    for (int i = 0; i < n; ++i) dims[i] = 1 << J;
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(n, dims, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (!p) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute(int n, int J, int sign, const std::vector<cplx>& in, std::vector<cplx>& out) {
  fftw_plan p = plan_cache().get(n, J, sign);
  // Planned out-of-place; the input is not modified for c2c transforms.
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

std::string mode_str(const Mode& m) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < m.n; ++i) os << (i ? "," : "") << m.k[i];
  os << ")";
  return os.str();
}

void check_axis(int axis, int n) {
  if (axis < 0 || axis >= n) {
    throw std::invalid_argument("axis " + std::to_string(axis + 1) + " out of range 1.." + std::to_string(n));
  }
}

}  // namespace

// --------------------------------------------------------------------- Mode

bool Mode::is_zero() const {
  for (int i = 0; i < n; ++i) {
    if (k[i] != 0) return false;
  }
  return true;
}

double Mode::norm() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += static_cast<double>(k[i]) * k[i];
  return std::sqrt(s);
}

// ------------------------------------------------------------ SpectralField

SpectralField::SpectralField(int n, int J) : n_(n), J_(J) {
  if (n < 1 || n > kMaxDim || J < 0 || n * J > 30) throw std::invalid_argument("bad spectral field shape");
  data_.assign(std::size_t{1} << (n * J), cplx{});
}

SpectralField SpectralField::forward(const GridFunction& u) {
  SpectralField s(u.dim(), u.level());
  std::vector<cplx> in(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) in[i] = u[i];
  execute(u.dim(), u.level(), FFTW_FORWARD, in, s.data_);
  const double scale = 1.0 / static_cast<double>(u.size());
  for (cplx& c : s.data_) c *= scale;
  return s;
}

GridFunction SpectralField::inverse(double* max_imag) const {
  std::vector<cplx> out(data_.size());
  execute(n_, J_, FFTW_BACKWARD, data_, out);
  std::vector<double> vals(out.size());
  double mi = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    vals[i] = out[i].real();
    mi = std::max(mi, std::abs(out[i].imag()));
  }
  if (max_imag) *max_imag = mi;
  return GridFunction(n_, J_, std::move(vals));
}

Mode SpectralField::mode(std::size_t idx) const {
  Mode m;
  m.n = n_;
  const int N = 1 << J_;
  m.half = N / 2;
  const std::size_t mask = static_cast<std::size_t>(N) - 1;
  for (int i = 0; i < n_; ++i) {
    const int c = static_cast<int>((idx >> (i * J_)) & mask);
    m.k[i] = (c <= N / 2) ? c : c - N;
  }
  if (N == 1) m.half = -1;
  return m;
}

std::size_t SpectralField::index_of(const Mode& m) const {
  const int N = 1 << J_;
  std::size_t idx = 0;
  for (int i = n_ - 1; i >= 0; --i) {
    const int c = ((m.k[i] % N) + N) % N;
    idx = (idx << J_) | static_cast<std::size_t>(c);
  }
  return idx;
}

// -------------------------------------------------------------- multipliers

void MultiplierOp::apply_inplace(SpectralField& s, bool adjoint) const {
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const Mode m = s.mode(idx);
    if (m.is_zero()) {
      s[idx] = 0.0;
      continue;
    }
    const cplx sym = symbol(m);
    s[idx] *= adjoint ? std::conj(sym) : sym;
  }
}

namespace {

GridFunction apply_multiplier(const MultiplierOp& op, const GridFunction& u, bool adjoint) {
  SpectralField s = SpectralField::forward(u);
  if (op.zero_mode == ZeroModePolicy::reject && std::abs(s[0]) > 1e-12 * std::max(l2_norm(u), 1e-300)) {
    throw std::invalid_argument(op.name + ": input has a nonzero mean");
  }
  op.apply_inplace(s, adjoint);
  return s.inverse();
}

}  // namespace

GridFunction MultiplierOp::apply(const GridFunction& u) const { return apply_multiplier(*this, u, false); }

GridFunction MultiplierOp::apply_adjoint(const GridFunction& u) const { return apply_multiplier(*this, u, true); }

MultiplierOp riesz_op(int axis) {
  return {"R" + std::to_string(axis + 1), [axis](const Mode& m) -> cplx {
            const double r = m.k[axis] / m.norm();
            return m.nyquist(axis) ? cplx(r, 0.0) : cplx(0.0, -r);
          }};
}

MultiplierOp derivative_op(int axis) {
  return {"D" + std::to_string(axis + 1), [axis](const Mode& m) -> cplx {
            const double r = kTwoPi * m.k[axis];
            return m.nyquist(axis) ? cplx(r, 0.0) : cplx(0.0, r);
          }};
}

// Zero on k_axis = 0, where no antiderivative exists.
MultiplierOp antiderivative_op(int axis) {
  return {"E" + std::to_string(axis + 1), [axis](const Mode& m) -> cplx {
            if (m.k[axis] == 0) return 0.0;
            const double r = 1.0 / (kTwoPi * m.k[axis]);
            return m.nyquist(axis) ? cplx(r, 0.0) : cplx(0.0, -r);
          }};
}

GridFunction riesz(const GridFunction& u, int axis) {
  check_axis(axis, u.dim());
  return riesz_op(axis).apply(u);
}

GridFunction derivative(const GridFunction& u, int axis) {
  check_axis(axis, u.dim());
  return derivative_op(axis).apply(u);
}

GridFunction antiderivative(const GridFunction& u, int axis) {
  check_axis(axis, u.dim());
  return antiderivative_op(axis).apply(u);
}

void check_riesz_admissible(const SpectralField& s, double norm, int i0, double tol) {
  check_axis(i0, s.dim());
  const double thr = tol * norm;
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const Mode m = s.mode(idx);
    if (m.k[i0] != 0 && !m.nyquist(i0)) continue;
    if (std::abs(s[idx]) > thr) {
      throw std::invalid_argument("riesz_inverse: spectral mass " + std::to_string(std::abs(s[idx])) +
                                  " at forbidden frequency " + mode_str(m) + " (k_" + std::to_string(i0 + 1) +
                                  (m.k[i0] == 0 ? " = 0)" : " = N/2)"));
    }
  }
}

void check_riesz_admissible(const GridFunction& u, int i0, double tol) {
  check_riesz_admissible(SpectralField::forward(u), l2_norm(u), i0, tol);
}

GridFunction riesz_inverse(const GridFunction& u, int i0, InverseMode mode) {
  check_axis(i0, u.dim());
  SpectralField s = SpectralField::forward(u);
  check_riesz_admissible(s, l2_norm(u), i0);
  if (mode == InverseMode::direct) {
    MultiplierOp inv{"R" + std::to_string(i0 + 1) + "^-1", [i0](const Mode& m) -> cplx {
                       if (m.k[i0] == 0 || m.nyquist(i0)) return 0.0;
                       return cplx(0.0, m.norm() / m.k[i0]);
                     }};
    inv.apply_inplace(s);
    return s.inverse();
  }
  // -R_{i0} - sum_{i != i0} E_{i0} d_i R_i, each factor applied as its own multiplier.
  GridFunction out = -1.0 * riesz_op(i0).apply(u);
  const MultiplierOp e = antiderivative_op(i0);
  for (int i = 0; i < u.dim(); ++i) {
    if (i == i0) continue;
    out -= e.apply(derivative_op(i).apply(riesz_op(i).apply(u)));
  }
  return out;
}

// ------------------------------------------------------------------ kernels

double kernel_b(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double w = 1.0 - t * t;
  return 15.0 / 16.0 * w * w;
}

double kernel_d(std::span<const double> x) {
  double a = 1.0, b = 1.0;
  for (double xi : x) {
    a *= kernel_b(xi);
    b *= 2.0 * kernel_b(2.0 * xi);
  }
  return a - b;
}

namespace {

// int_a^b f with 3-point Gauss-Legendre (exact for quintics).
template <class F>
double gauss3(F f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double x = std::sqrt(0.6) * h;
  return h * (5.0 / 9.0 * f(c - x) + 8.0 / 9.0 * f(c) + 5.0 / 9.0 * f(c + x));
}

// Taps K[m] = int (1/R) b(x/R) tent(x - m) dx, R = 2^(J-s) in cell units.
std::vector<double> tent_taps(int J, int s, long& radius) {
  const double R = std::ldexp(1.0, J - s);
  radius = static_cast<long>(std::ceil(R)) + 1;
  std::vector<double> taps(2 * radius + 1, 0.0);
  for (long m = -radius; m <= radius; ++m) {
    double acc = 0.0;
    for (int side = 0; side < 2; ++side) {
      double a = side ? static_cast<double>(m) : static_cast<double>(m - 1);
      double b = a + 1.0;
      a = std::max(a, -R);
      b = std::min(b, R);
      if (a >= b) continue;
      auto f = [&](double x) { return kernel_b(x / R) / R * std::max(0.0, 1.0 - std::abs(x - m)); };
      acc += gauss3(f, a, b);
    }
    taps[m + radius] = acc;
  }
  return taps;
}

}  // namespace

ResolvingKernel::ResolvingKernel(int n, int J, int s) : n_(n), J_(J), s_(s) {
  check_scale(J, s);
  const std::size_t N = std::size_t{1} << J;
  for (int w = 0; w < 2; ++w) {
    taps_[w] = tent_taps(J, s + w, radius_[w]);
    std::vector<double> per(N, 0.0);
    for (long m = -radius_[w]; m <= radius_[w]; ++m) {
      const long r = ((m % static_cast<long>(N)) + static_cast<long>(N)) % static_cast<long>(N);
      per[static_cast<std::size_t>(r)] += taps_[w][m + radius_[w]];
    }
    const SpectralField f = SpectralField::forward(GridFunction(1, J, std::move(per)));
    hat_[w].resize(N);
    for (std::size_t k = 0; k < N; ++k) hat_[w][k] = f[k].real() * static_cast<double>(N);
  }
}

double ResolvingKernel::beta_symbol(const Mode& m, int which) const {
  const int N = 1 << J_;
  double v = 1.0;
  for (int i = 0; i < n_; ++i) v *= hat_[which][static_cast<std::size_t>(((m.k[i] % N) + N) % N)];
  return v;
}

double ResolvingKernel::total_mass() const {
  double r[2];
  for (int w = 0; w < 2; ++w) {
    double s = 0.0;
    for (double t : taps_[w]) s += t;
    r[w] = std::pow(s, n_);
  }
  return r[0] - r[1];
}

double ResolvingKernel::first_moment(int axis) const {
  if (axis < 0 || axis >= n_) throw std::invalid_argument("axis out of range");
  double r[2];
  for (int w = 0; w < 2; ++w) {
    double s = 0.0, m1 = 0.0;
    for (long m = -radius_[w]; m <= radius_[w]; ++m) {
      s += taps_[w][m + radius_[w]];
      m1 += static_cast<double>(m) * taps_[w][m + radius_[w]];
    }
    r[w] = m1 * std::pow(s, n_ - 1);
  }
  return r[0] - r[1];
}

void check_scale(int J, int s) {
  const int lo = std::max(kScaleMin, J - 22);
  const int hi = J + kScaleMaxOffset;
  if (s < lo || s > hi) {
    std::ostringstream os;
    os << "scale s = " << s << " not resolvable at J = " << J << " (window [" << lo << ", " << hi << "]";
    if (s > hi) os << "; needs J >= " << s - kScaleMaxOffset;
    os << ")";
    throw std::invalid_argument(os.str());
  }
}

const ResolvingKernel& resolving_kernel(int n, int J, int s) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<ResolvingKernel>> cache;
  check_scale(J, s);
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[std::make_tuple(n, J, s)];
  if (!slot) slot = std::make_unique<ResolvingKernel>(n, J, s);
  return *slot;
}

GridFunction delta_conv(const GridFunction& u, int s) {
  const ResolvingKernel& k = resolving_kernel(u.dim(), u.level(), s);
  SpectralField f = SpectralField::forward(u);
  for (std::size_t idx = 0; idx < f.size(); ++idx) f[idx] *= k.delta_symbol(f.mode(idx));
  return f.inverse();
}

GridFunction beta_conv(const GridFunction& u, int s) {
  const ResolvingKernel& k = resolving_kernel(u.dim(), u.level(), s);
  SpectralField f = SpectralField::forward(u);
  for (std::size_t idx = 0; idx < f.size(); ++idx) f[idx] *= k.beta_symbol(f.mode(idx), 0);
  return f.inverse();
}

}  // namespace hrl
