#include "hrl/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "hrl/fourier.hpp"
#include "hrl/random.hpp"

namespace hrl {

// ------------------------------------------------------------ power iteration

NormEstimate op_norm2_estimate(const LinearFieldOp& op, int iters, std::uint64_t seed, double tol) {
  if (iters < 10) throw std::invalid_argument("op_norm2_estimate needs at least 10 iterations");
  GridFunction x = random_field(op.n, op.J, seed, 0x9041);
  if (op.restrict) x = op.restrict(x);
  double nx = l2_norm(x);
  if (nx == 0.0) throw std::invalid_argument(op.name + ": start vector vanishes on the operator domain");
  x *= 1.0 / nx;
  NormEstimate est;
  double prev = 0.0;
  for (int k = 0; k < iters; ++k) {
    const GridFunction y = op.apply(x);
    const double val = l2_norm(y);
    est.last_change = std::abs(val - prev) / std::max(val, 1e-300);
    est.value = std::max(est.value, val);
    est.iterations = k + 1;
    prev = val;
    if (val == 0.0) {
      est.last_change = 0.0;
      break;
    }
    GridFunction z = op.adjoint(y);
    if (op.restrict) z = op.restrict(z);
    const double nz = l2_norm(z);
    if (nz == 0.0) break;
    x = (1.0 / nz) * z;
    if (k >= 9 && est.last_change < 1e-13) break;
  }
  est.converged = est.last_change <= tol;
  return est;
}

double linearity_defect(const LinearFieldOp& op, std::uint64_t seed) {
  GridFunction a = random_field(op.n, op.J, seed, 1), b = random_field(op.n, op.J, seed, 2);
  if (op.restrict) {
    a = op.restrict(a);
    b = op.restrict(b);
  }
  const double s = -1.75;
  const GridFunction lhs = op.apply(a + s * b);
  const GridFunction rhs = op.apply(a) + s * op.apply(b);
  return l2_norm(lhs - rhs) / std::max(l2_norm(lhs) + l2_norm(rhs), 1e-300);
}

// ---------------------------------------------------------------------- T_ell

void check_t_ell_range(int J, int ell, LevelRange levels) {
  if (levels.jmin < 0 || levels.jmax > J - 1 || levels.jmin > levels.jmax) {
    throw std::invalid_argument("level range [" + std::to_string(levels.jmin) + ", " + std::to_string(levels.jmax) +
                                "] outside 0.." + std::to_string(J - 1));
  }
  std::ostringstream bad;
  int count = 0;
  for (int j = levels.jmin; j <= levels.jmax; ++j) {
    try {
      check_scale(J, j + ell);
    } catch (const std::invalid_argument&) {
      bad << (count++ ? ", " : "") << "(j=" << j << ", ell=" << ell << ")";
    }
  }
  if (count) throw std::invalid_argument("unresolvable (j, ell) pairs at J=" + std::to_string(J) + ": " + bad.str());
}

GridFunction t_ell(const GridFunction& u, Direction e, int ell, LevelRange levels) {
  check_t_ell_range(u.level(), ell, levels);
  const SpectralField f = SpectralField::forward(u);
  HaarCoefficients out(u.dim(), u.level());
  for (int j = levels.jmin; j <= levels.jmax; ++j) {
    const ResolvingKernel& k = resolving_kernel(u.dim(), u.level(), j + ell);
    SpectralField g = f;
    for (std::size_t idx = 0; idx < g.size(); ++idx) g[idx] *= k.delta_symbol(g.mode(idx));
    const HaarCoefficients c = haar_analyze(g.inverse());
    const auto src = c.band(j, e);
    auto dst = out.band(j, e);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = -src[i];
  }
  return haar_synthesize(out);
}

GridFunction t_ell_adjoint(const GridFunction& v, Direction e, int ell, LevelRange levels) {
  check_t_ell_range(v.level(), ell, levels);
  const HaarCoefficients c = haar_analyze(v);
  SpectralField acc(v.dim(), v.level());
  for (int j = levels.jmin; j <= levels.jmax; ++j) {
    HaarCoefficients one(v.dim(), v.level());
    const auto src = c.band(j, e);
    std::copy(src.begin(), src.end(), one.band(j, e).begin());
    const SpectralField g = SpectralField::forward(haar_synthesize(one));
    const ResolvingKernel& k = resolving_kernel(v.dim(), v.level(), j + ell);
    for (std::size_t idx = 0; idx < g.size(); ++idx) acc[idx] -= k.delta_symbol(g.mode(idx)) * g[idx];
  }
  return acc.inverse();
}

LinearFieldOp t_ell_op(int n, int J, Direction e, int ell, LevelRange levels) {
  check_t_ell_range(J, ell, levels);
  LinearFieldOp op;
  op.name = "T_" + std::to_string(ell) + "^(" + e.str() + ")";
  op.n = n;
  op.J = J;
  op.apply = [=](const GridFunction& u) { return t_ell(u, e, ell, levels); };
  op.adjoint = [=](const GridFunction& v) { return t_ell_adjoint(v, e, ell, levels); };
  return op;
}

GridFunction riesz_admissible_part(const GridFunction& u, int i0) {
  SpectralField s = SpectralField::forward(u);
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const Mode m = s.mode(idx);
    if (m.k[i0] == 0 || m.nyquist(i0)) s[idx] = 0.0;
  }
  return s.inverse();
}

LinearFieldOp t_ell_riesz_inverse_op(int n, int J, Direction e, int i0, int ell, LevelRange levels) {
  if (i0 < 0 || i0 >= n || !e.oscillates(i0)) {
    throw std::invalid_argument("direction " + e.str() + " does not oscillate along axis " + std::to_string(i0 + 1));
  }
  check_t_ell_range(J, ell, levels);
  const MultiplierOp inv{"R^-1", [i0](const Mode& m) -> cplx {
                           if (m.k[i0] == 0 || m.nyquist(i0)) return 0.0;
                           return cplx(0.0, m.norm() / m.k[i0]);
                         }};
  LinearFieldOp op;
  op.name = "T_" + std::to_string(ell) + "^(" + e.str() + ") R_" + std::to_string(i0 + 1) + "^-1";
  op.n = n;
  op.J = J;
  op.apply = [=](const GridFunction& u) { return t_ell(inv.apply(u), e, ell, levels); };
  op.adjoint = [=](const GridFunction& v) { return inv.apply_adjoint(t_ell_adjoint(v, e, ell, levels)); };
  op.restrict = [i0](const GridFunction& u) { return riesz_admissible_part(u, i0); };
  return op;
}

double t_ell_riesz_ratio(Direction e, int i0, int ell, double p, LevelRange levels, const FieldFamily& family,
                         int trials) {
  if (!e.oscillates(i0)) {
    throw std::invalid_argument("direction " + e.str() + " does not oscillate along axis " + std::to_string(i0 + 1));
  }
  if (trials < 1 || !family) throw std::invalid_argument("t_ell_riesz_ratio: empty family");
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    const GridFunction w = family(t);
    try {
      check_riesz_admissible(w, i0);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("inadmissible sample " + std::to_string(t) + ": " + err.what());
    }
    const double den = lp_norm(riesz(w, i0), p);
    if (den == 0.0) throw std::invalid_argument("inadmissible sample " + std::to_string(t) + ": R w = 0");
    best = std::max(best, lp_norm(t_ell(w, e, ell, levels), p) / den);
  }
  return best;
}

// ----------------------------------------------------------------- ring covers

namespace {

// Gap between [a1, b1] and [a2, b2] on a circle of length P.
std::int64_t periodic_gap(std::int64_t a1, std::int64_t b1, std::int64_t a2, std::int64_t b2, std::int64_t P) {
  std::int64_t best = -1;
  for (std::int64_t k = -1; k <= 1; ++k) {
    const std::int64_t g = std::max<std::int64_t>({0, a2 + k * P - b1, a1 - b2 - k * P});
    if (best < 0 || g < best) best = g;
  }
  return best;
}

std::uint64_t cube_key(const DyadicCube& c) {
  return (static_cast<std::uint64_t>(c.level) << 58) ^ static_cast<std::uint64_t>(c.index());
}

}  // namespace

RingCover ring_cover(const DyadicCube& q, Direction e, int lambda, double C, int J) {
  if (e.dim() != q.n) throw std::invalid_argument("direction dimension mismatch");
  if (lambda < 0 || q.level + lambda > J - 1) {
    throw std::invalid_argument("ring cover of " + q.str() + " at lambda=" + std::to_string(lambda) +
                                " exceeds grid level J-1=" + std::to_string(J - 1));
  }
  if (!(C > 0.0)) throw std::invalid_argument("proximity constant must be positive");
  const int n = q.n;
  const int L = q.level + lambda;
  // Work in half fine-cell units so the internal midplanes are integral.
  const std::int64_t P = std::int64_t{2} << L;
  const std::int64_t span = std::int64_t{2} << lambda;
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (int i = 0; i < n; ++i) {
    lo[i] = q.k[i] * span;
    hi[i] = lo[i] + span;
  }
  struct Piece {
    int axis;
    std::int64_t pos;
  };
  std::vector<Piece> pieces;
  for (int a = 0; a < n; ++a) {
    pieces.push_back({a, lo[a]});
    pieces.push_back({a, hi[a]});
    if (e.oscillates(a)) pieces.push_back({a, lo[a] + span / 2});
  }
  const double t = 2.0 * C * std::sqrt(static_cast<double>(n));
  const double t2 = t * t * (1.0 - 1e-12);

  const std::int64_t M = std::int64_t{1} << L;
  const std::int64_t reach = static_cast<std::int64_t>(std::ceil(C * std::sqrt(static_cast<double>(n)))) + 1;
  std::array<std::vector<std::int64_t>, kMaxDim> cand;
  for (int i = 0; i < n; ++i) {
    const std::int64_t first = q.k[i] * (std::int64_t{1} << lambda) - reach;
    const std::int64_t last = (q.k[i] + 1) * (std::int64_t{1} << lambda) + reach;
    if (last - first + 1 >= M) {
      for (std::int64_t c = 0; c < M; ++c) cand[i].push_back(c);
    } else {
      for (std::int64_t c = first; c <= last; ++c) cand[i].push_back(((c % M) + M) % M);
      std::sort(cand[i].begin(), cand[i].end());
      cand[i].erase(std::unique(cand[i].begin(), cand[i].end()), cand[i].end());
    }
  }

  RingCover out;
  out.q = q;
  out.degenerate = lambda <= 1;
  std::array<std::size_t, kMaxDim> it{};
  while (true) {
    std::array<std::int64_t, kMaxDim> ec{};
    for (int i = 0; i < n; ++i) ec[i] = cand[i][it[i]];
    double best = INFINITY;
    for (const Piece& pc : pieces) {
      double d2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const std::int64_t a1 = 2 * ec[i], b1 = a1 + 2;
        const std::int64_t g = (i == pc.axis) ? periodic_gap(a1, b1, pc.pos, pc.pos, P)
                                              : periodic_gap(a1, b1, lo[i], hi[i], P);
        d2 += static_cast<double>(g) * static_cast<double>(g);
      }
      best = std::min(best, d2);
    }
    if (best < t2) out.cells.emplace_back(n, L, ec);
    int i = 0;
    while (i < n && ++it[i] == cand[i].size()) it[i++] = 0;
    if (i == n) break;
  }
  out.measure_constant = static_cast<double>(out.cells.size()) * std::ldexp(1.0, -(n - 1) * lambda);
  return out;
}

std::vector<DyadicCube> default_sparse_family(int n, int j0, int j1) {
  if (j0 < 0 || j1 < j0) throw std::invalid_argument("bad sparse family level window");
  std::vector<DyadicCube> out;
  for (int j = j0; j <= j1; ++j) {
    const std::int64_t stride = std::int64_t{1} << (j - j0 + 1);
    const std::int64_t extent = std::int64_t{1} << j;
    const std::int64_t per_axis = (extent + stride - 1) / stride;
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) total *= per_axis;
    for (std::int64_t t = 0; t < total; ++t) {
      std::array<std::int64_t, kMaxDim> k{};
      std::int64_t r = t;
      for (int i = 0; i < n; ++i) {
        k[i] = (r % per_axis) * stride;
        r /= per_axis;
      }
      out.emplace_back(n, j, k);
    }
  }
  return out;
}

RingFamily build_ring_family(const std::vector<DyadicCube>& cubes, Direction e, int lambda, double C, int J) {
  RingFamily fam{e, lambda, C, J, {}};
  std::unordered_map<std::uint64_t, std::size_t> seen_q;
  for (const DyadicCube& q : cubes) {
    if (!seen_q.emplace(cube_key(q), fam.covers.size()).second) {
      throw std::invalid_argument("family lists " + q.str() + " twice");
    }
    fam.covers.push_back(ring_cover(q, e, lambda, C, J));
  }
  // Owner of every cover cell; same-level collisions violate disjointness.
  std::unordered_map<std::uint64_t, std::size_t> owner;
  std::vector<int> cover_levels;
  for (std::size_t a = 0; a < fam.covers.size(); ++a) {
    for (const DyadicCube& E : fam.covers[a].cells) {
      auto [pos, fresh] = owner.emplace(cube_key(E), a);
      if (!fresh) {
        throw std::invalid_argument("covers of " + fam.covers[pos->second].q.str() + " and " +
                                    fam.covers[a].q.str() + " share the cell " + E.str());
      }
    }
    cover_levels.push_back(fam.covers[a].q.level + lambda);
  }
  std::sort(cover_levels.begin(), cover_levels.end());
  cover_levels.erase(std::unique(cover_levels.begin(), cover_levels.end()), cover_levels.end());
  // Every containment E subset E0 between covers is found through ancestors.
  for (std::size_t a = 0; a < fam.covers.size(); ++a) {
    const DyadicCube& q = fam.covers[a].q;
    for (const DyadicCube& E : fam.covers[a].cells) {
      for (int lv : cover_levels) {
        if (lv >= E.level) break;
        const DyadicCube anc = E.predecessor(E.level - lv);
        auto it = owner.find(cube_key(anc));
        if (it == owner.end()) continue;
        const DyadicCube& q0 = fam.covers[it->second].q;
        if (!q0.contains(q)) {
          throw std::invalid_argument("nesting violated for (" + q.str() + ", " + q0.str() + "): cover cell " +
                                      E.str() + " lies in cover cell " + anc.str() + " but " + q.str() +
                                      " is not inside " + q0.str());
        }
        if (q.contains(q0) && !(q == q0)) {
          throw std::invalid_argument("nesting violated for (" + q0.str() + ", " + q.str() + "): cover cells " +
                                      anc.str() + " and " + E.str() + " intersect without containment");
        }
      }
    }
  }
  return fam;
}

GridFunction ring_projection(const GridFunction& u, const RingFamily& family) {
  if (u.level() != family.J) throw std::invalid_argument("ring projection: grid level mismatch");
  const HaarCoefficients c = haar_analyze(u);
  HaarCoefficients out(u.dim(), u.level());
  for (const RingCover& rc : family.covers) {
    const double v = c.coefficient(rc.q, family.e);
    for (const DyadicCube& E : rc.cells) out.set_coefficient(E, family.e, v);
  }
  return haar_synthesize(out);
}

GridFunction ring_projection_adjoint(const GridFunction& v, const RingFamily& family) {
  if (v.level() != family.J) throw std::invalid_argument("ring projection: grid level mismatch");
  const HaarCoefficients c = haar_analyze(v);
  HaarCoefficients out(v.dim(), v.level());
  for (const RingCover& rc : family.covers) {
    double s = 0.0;
    for (const DyadicCube& E : rc.cells) s += c.coefficient(E, family.e) * E.volume();
    out.set_coefficient(rc.q, family.e, s / rc.q.volume());
  }
  return haar_synthesize(out);
}

LinearFieldOp ring_projection_op(const RingFamily& family) {
  LinearFieldOp op;
  op.name = "S_ring(lambda=" + std::to_string(family.lambda) + ")";
  op.n = family.e.dim();
  op.J = family.J;
  op.apply = [family](const GridFunction& u) { return ring_projection(u, family); };
  op.adjoint = [family](const GridFunction& v) { return ring_projection_adjoint(v, family); };
  return op;
}

// -------------------------------------------------------------- rearrangement

RearrangementProfile sine_profile() {
  return {"sine", [](double a, double b) {
            return std::sin(std::numbers::pi * (a + b)) * std::sin(std::numbers::pi * (b - a)) / std::numbers::pi;
          }};
}

namespace {

// Dense array with per-axis extents, axis 0 fastest.
struct Tensor {
  std::array<std::size_t, kMaxDim> dims{1, 1, 1};
  std::vector<double> v;
};

// out[p] = sum_m taps[m] in[(p*stride + m) mod N] along one axis, p < count.
Tensor correlate_axis(const Tensor& in, int axis, const std::vector<double>& taps, std::size_t stride,
                      std::size_t count) {
  Tensor out;
  out.dims = in.dims;
  out.dims[axis] = count;
  std::size_t inner = 1, outer = 1;
  for (int i = 0; i < axis; ++i) inner *= in.dims[i];
  for (int i = axis + 1; i < kMaxDim; ++i) outer *= in.dims[i];
  const std::size_t N = in.dims[axis];
  out.v.assign(inner * count * outer, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t p = 0; p < count; ++p) {
      double* dst = &out.v[(o * count + p) * inner];
      for (std::size_t m = 0; m < taps.size(); ++m) {
        const double* src = &in.v[(o * N + (p * stride + m) % N) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += taps[m] * src[i];
      }
    }
  }
  return out;
}

// Transpose of correlate_axis: expands an axis of extent count back to N.
Tensor scatter_axis(const Tensor& in, int axis, const std::vector<double>& taps, std::size_t stride, std::size_t N) {
  Tensor out;
  out.dims = in.dims;
  out.dims[axis] = N;
  std::size_t inner = 1, outer = 1;
  for (int i = 0; i < axis; ++i) inner *= in.dims[i];
  for (int i = axis + 1; i < kMaxDim; ++i) outer *= in.dims[i];
  const std::size_t count = in.dims[axis];
  out.v.assign(inner * N * outer, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t p = 0; p < count; ++p) {
      const double* src = &in.v[(o * count + p) * inner];
      for (std::size_t m = 0; m < taps.size(); ++m) {
        double* dst = &out.v[(o * N + (p * stride + m) % N) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += taps[m] * src[i];
      }
    }
  }
  return out;
}

// Cell averages of the profile stretched to 2^(J-w) cells.
std::vector<double> profile_template(const RearrangementProfile& prof, int J, int w) {
  const std::size_t L = std::size_t{1} << (J - w);
  std::vector<double> t(L);
  for (std::size_t m = 0; m < L; ++m) {
    t[m] = static_cast<double>(L) * prof.integral(static_cast<double>(m) / L, static_cast<double>(m + 1) / L);
  }
  return t;
}

void check_spec(const RearrangementSpec& s) {
  if (s.e.dim() != s.n) throw std::invalid_argument("direction dimension mismatch");
  if (s.lambda < 0 || s.wmin < 0 || s.wmin > s.wmax || s.wmax + s.lambda > s.J - 1) {
    throw std::invalid_argument("rearrangement levels: need 0 <= wmin <= wmax and wmax + lambda <= J - 1");
  }
  if (!s.profile.integral) throw std::invalid_argument("rearrangement profile missing");
  const double m = s.profile.integral(0.0, 1.0);
  if (!(std::abs(m) <= 1e-9)) {
    throw std::invalid_argument("profile '" + s.profile.name + "' has mean " + std::to_string(m) +
                                ", exceeding the zero-mean tolerance 1e-9");
  }
}

}  // namespace

GridFunction rearrangement_op(const GridFunction& u, const RearrangementSpec& spec) {
  check_spec(spec);
  require_same_shape(u, GridFunction(spec.n, spec.J));
  const int n = spec.n, J = spec.J;
  HaarCoefficients out(n, J);
  Tensor base;
  for (int i = 0; i < n; ++i) base.dims[i] = u.side();
  base.v.assign(u.values().begin(), u.values().end());
  for (int w = spec.wmin; w <= spec.wmax; ++w) {
    const int q = w + spec.lambda;
    const auto taps = profile_template(spec.profile, J, w);
    Tensor t = base;
    for (int a = 0; a < n; ++a) {
      t = correlate_axis(t, a, taps, std::size_t{1} << (J - q), std::size_t{1} << q);
    }
    // <u, phi_Q> = h^n * correlation; coefficient divides by |Q|.
    const double scale = u.cell_volume() / std::ldexp(1.0, -n * q);
    auto band = out.band(q, spec.e);
    for (std::size_t i = 0; i < band.size(); ++i) band[i] = scale * t.v[i];
  }
  return haar_synthesize(out);
}

GridFunction rearrangement_adjoint(const GridFunction& v, const RearrangementSpec& spec) {
  check_spec(spec);
  require_same_shape(v, GridFunction(spec.n, spec.J));
  const int n = spec.n, J = spec.J;
  const HaarCoefficients c = haar_analyze(v);
  std::vector<double> acc(v.size(), 0.0);
  for (int w = spec.wmin; w <= spec.wmax; ++w) {
    const int q = w + spec.lambda;
    const auto taps = profile_template(spec.profile, J, w);
    Tensor t;
    for (int i = 0; i < n; ++i) t.dims[i] = std::size_t{1} << q;
    const auto band = c.band(q, spec.e);
    t.v.assign(band.begin(), band.end());
    for (int a = n - 1; a >= 0; --a) t = scatter_axis(t, a, taps, std::size_t{1} << (J - q), v.side());
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += t.v[i];
  }
  return GridFunction(n, J, std::move(acc));
}

LinearFieldOp rearrangement_linear_op(const RearrangementSpec& spec) {
  check_spec(spec);
  LinearFieldOp op;
  op.name = "S_rearrange(lambda=" + std::to_string(spec.lambda) + ")";
  op.n = spec.n;
  op.J = spec.J;
  op.apply = [spec](const GridFunction& u) { return rearrangement_op(u, spec); };
  op.adjoint = [spec](const GridFunction& v) { return rearrangement_adjoint(v, spec); };
  return op;
}

}  // namespace hrl
