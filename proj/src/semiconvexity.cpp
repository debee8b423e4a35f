#include "hrl/semiconvexity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hrl/fourier.hpp"
#include "hrl/haar.hpp"

namespace hrl {

namespace {

constexpr double kConvexTol = 1e-9;

template <class F>
double pair_sum(std::span<const double> a, F&& term) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) s += term(a[i], a[j]);
  return s;
}

GridFunction apply_pointwise(const VectorField& v, const Integrand& f) {
  GridFunction out(v[0].dim(), v[0].level());
  std::vector<double> a(v.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = v[i][idx];
    out[idx] = f.f(a);
  }
  return out;
}

}  // namespace

void require_vector_field(const VectorField& v) {
  if (v.empty()) throw std::invalid_argument("vector field has no components");
  const int n = v[0].dim();
  if (static_cast<int>(v.size()) != n) {
    throw std::invalid_argument("vector field on dimension " + std::to_string(n) + " needs " + std::to_string(n) +
                                " components, got " + std::to_string(v.size()));
  }
  for (const GridFunction& g : v) require_same_shape(v[0], g);
}

// ---------------------------------------------------------------- integrands

std::vector<Integrand> integrand_registry(int n) {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("integrands need n in 2..3");
  auto sq = [](std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
  };
  return {
      {"ab", n, [](std::span<const double> a) { return pair_sum(a, [](double x, double y) { return x * y; }); }, 2.0,
       1.0},
      {"abs_sum", n,
       [](std::span<const double> a) {
         double s = 0.0;
         for (double x : a) s += std::abs(x);
         return s;
       },
       1.0, static_cast<double>(n)},
      {"quad_ab", n,
       [sq](std::span<const double> a) { return sq(a) + pair_sum(a, [](double x, double y) { return x * y; }); }, 2.0,
       static_cast<double>(n)},
      {"pos_product", n,
       [](std::span<const double> a) {
         return pair_sum(a, [](double x, double y) { return std::max(x, 0.0) * std::max(y, 0.0); });
       },
       2.0, 1.0},
  };
}

const Integrand& find_integrand(const std::vector<Integrand>& reg, const std::string& name) {
  for (const Integrand& f : reg)
    if (f.name == name) return f;
  std::string known;
  for (const Integrand& f : reg) known += (known.empty() ? "" : ", ") + f.name;
  throw std::invalid_argument("unknown integrand '" + name + "' (known: " + known + ")");
}

double separate_convexity_margin(const Integrand& f) {
  const int n = f.n;
  constexpr int kSteps = 60;  // [-3, 3] with step 0.1
  constexpr double h = 0.1;
  std::array<int, kMaxDim> c{};
  std::array<double, kMaxDim> a{};
  double worst = std::numeric_limits<double>::infinity();
  const std::span<const double> view(a.data(), n);
  for (;;) {
    for (int i = 0; i < n; ++i) a[i] = -3.0 + h * c[i];
    for (int i = 0; i < n; ++i) {
      if (c[i] == 0 || c[i] == kSteps) continue;
      const double mid = f.f(view);
      a[i] += h;
      const double up = f.f(view);
      a[i] -= 2 * h;
      const double down = f.f(view);
      a[i] += h;
      worst = std::min(worst, up - 2 * mid + down);
    }
    int d = 0;
    while (d < n && ++c[d] > kSteps) c[d++] = 0;
    if (d == n) break;
  }
  return worst;
}

void validate_separately_convex(const Integrand& f) {
  const double m = separate_convexity_margin(f);
  if (m < -kConvexTol) {
    std::ostringstream os;
    os << "integrand '" << f.name << "' is not separately convex: second difference " << m << " on the probe lattice";
    throw std::invalid_argument(os.str());
  }
}

// ------------------------------------------------------------------------ A0

std::vector<GridFunction> a0_apply(const VectorField& v) {
  require_vector_field(v);
  const int n = v[0].dim();
  std::vector<GridFunction> out;
  out.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.push_back(i == j ? GridFunction(n, v[0].level()) : derivative(v[j], i));
  return out;
}

double a0_max_abs(const VectorField& v) {
  double m = 0.0;
  for (const GridFunction& g : a0_apply(v))
    for (double x : g.values()) m = std::max(m, std::abs(x));
  return m;
}

double vector_lp_norm(const VectorField& v, double p) {
  require_vector_field(v);
  GridFunction mag(v[0].dim(), v[0].level());
  for (std::size_t idx = 0; idx < mag.size(); ++idx) {
    double s = 0.0;
    for (const GridFunction& g : v) s += g[idx] * g[idx];
    mag[idx] = std::sqrt(s);
  }
  return lp_norm(mag, p);
}

// -------------------------------------------------------------------- Jensen

double jensen_base_defect(const Integrand& f, std::span<const double> a, std::span<const double> c) {
  const int n = f.n;
  if (static_cast<int>(a.size()) != n || static_cast<int>(c.size()) != n)
    throw std::invalid_argument("base point and amplitudes need n entries");
  // h_Q^(e_i) restricted to Q depends on x_i alone: average over the 2^n
  // half-cube sign patterns.
  std::array<double, kMaxDim> x{};
  double s = 0.0;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    for (int i = 0; i < n; ++i) x[i] = a[i] + (((mask >> i) & 1U) ? -c[i] : c[i]);
    s += f.f(std::span<const double>(x.data(), n));
  }
  return s / (1U << n) - f.f(a);
}

double jensen_range_check(const VectorField& v, const Integrand& f, int M) {
  require_vector_field(v);
  if (f.n != v[0].dim()) throw std::invalid_argument("integrand and field dimensions differ");
  validate_separately_convex(f);
  if (M < 0 || M > v[0].level()) throw std::invalid_argument("level M outside 0..J");
  const VectorField pv = vector_project(v);
  const GridFunction lhs = conditional_expectation(apply_pointwise(pv, f), M);
  VectorField epv;
  for (const GridFunction& g : pv) epv.push_back(conditional_expectation(g, M));
  const GridFunction rhs = apply_pointwise(epv, f);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < lhs.size(); ++idx) worst = std::min(worst, lhs[idx] - rhs[idx]);
  return worst;
}

double residual_ratio(const VectorField& v, double p) {
  require_vector_field(v);
  if (!(p >= 2.0)) throw std::invalid_argument("residual ratio is stated for p >= 2");
  const int n = v[0].dim();
  for (int j = 0; j < n; ++j) {
    if (std::abs(v[j].mean()) > 1e-12 * (1.0 + l2_norm(v[j])))
      throw std::invalid_argument("component " + std::to_string(j + 1) + " is not mean-zero");
  }
  const VectorField pv = vector_project(v);
  VectorField res;
  for (int j = 0; j < n; ++j) res.push_back(v[j] - pv[j]);
  const double num = vector_lp_norm(res, p);
  double cross = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) cross += lp_norm(riesz(v[j], i), p);
  const double den = std::sqrt(vector_lp_norm(v, p) * cross);
  const double tiny = 1e-13 * (1.0 + vector_lp_norm(v, p));
  if (num <= tiny && den <= tiny) return 0.0;
  if (den <= tiny) return std::numeric_limits<double>::infinity();
  return num / den;
}

// ---------------------------------------------------------- semicontinuity

namespace {

GridFunction sine_along(int n, int J, int axis, int r) {
  return embed([=](std::span<const double> x) { return std::sin(2 * std::numbers::pi * r * x[axis]); }, n, J, 5);
}

}  // namespace

SequenceSpec compliant_sequence(int n) {
  return {"compliant", [n](int r, int J) {
            VectorField v;
            for (int i = 0; i < n; ++i) v.push_back(sine_along(n, J, i, r));
            return v;
          }};
}

SequenceSpec contrast_sequence(int n) {
  return {"contrast", [n](int r, int J) {
            const GridFunction s = sine_along(n, J, 0, r);
            return VectorField(n, s);
          }};
}

std::vector<SemicontinuityRow> semicontinuity_experiment(const Integrand& f, const FieldFn& phi,
                                                        const SequenceSpec& seq, const std::vector<int>& rs, int J,
                                                        int M) {
  validate_separately_convex(f);
  if (rs.empty()) throw std::invalid_argument("empty r list");
  if (M < 0 || M > J) throw std::invalid_argument("level M outside 0..J");
  for (int r : rs) {
    if (r < 1 || r > (1 << (J - 3)))
      throw std::invalid_argument("r = " + std::to_string(r) + " is not resolved at J = " + std::to_string(J) +
                                  " (need 1 <= r <= " + std::to_string(1 << std::max(J - 3, 0)) + ")");
  }
  const GridFunction w = embed(phi, f.n, J, 5);
  for (double x : w.values())
    if (x < 0.0) throw std::invalid_argument("test function must be nonnegative");

  std::vector<SemicontinuityRow> rows;
  VectorField last;
  for (int r : rs) {
    VectorField v = seq.generate(r, J);
    require_vector_field(v);
    if (v[0].dim() != f.n || v[0].level() != J) throw std::invalid_argument("sequence shape mismatch");
    SemicontinuityRow row;
    row.experiment = seq.name;
    row.f_name = f.name;
    row.r = r;
    row.I_r = inner(apply_pointwise(v, f), w);
    row.compliant = a0_max_abs(v) <= 1e-8;
    rows.push_back(row);
    last = std::move(v);
  }
  VectorField limit;
  for (const GridFunction& g : last) limit.push_back(conditional_expectation(g, M));
  const double I_limit = inner(apply_pointwise(limit, f), w);
  for (auto& row : rows) row.I_limit = I_limit;
  return rows;
}

}  // namespace hrl
