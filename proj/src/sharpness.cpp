#include "hrl/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hrl/fourier.hpp"
#include "hrl/haar.hpp"
#include "hrl/random.hpp"

namespace hrl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxN0 = 3;  // layer levels reach 2 * 2^n0 * n0

struct Term {
  double amp, freq, phase;  // amp cos(freq y + phase)
};

struct Piece {
  double lo, hi;
  std::vector<Term> terms;
};

const std::vector<Piece>& pieces(Profile p) {
  static const std::vector<Piece> a{{0.0, 1.0, {{1.0, 2 * kPi, -kPi / 2}}}};
  static const std::vector<Piece> at{{0.0, 1.0, {{2 * kPi, 2 * kPi, 0.0}}}};
  static const std::vector<Piece> b{{-1.0, 1.0, {{1.0, kPi, -kPi / 2}}}};
  static const std::vector<Piece> bt{{-1.0, 1.0, {{-1.0 / kPi, 0.0, 0.0}, {-1.0 / kPi, kPi, 0.0}}}};
  static const std::vector<Piece> h{{0.0, 0.5, {{1.0, 0.0, 0.0}}}, {0.5, 1.0, {{-1.0, 0.0, 0.0}}}};
  static const std::vector<Piece> ind{{0.0, 1.0, {{1.0, 0.0, 0.0}}}};
  switch (p) {
    case Profile::A: return a;
    case Profile::A_tilde: return at;
    case Profile::B: return b;
    case Profile::B_tilde: return bt;
    case Profile::haar: return h;
    case Profile::indicator: return ind;
  }
  throw std::invalid_argument("unknown profile");
}

double sinc(double z) { return std::abs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z; }

// int_a^b cos(w u + phi) du
double cos_integral(double a, double b, double w, double phi) {
  const double h = b - a;
  return h * std::cos(w * (a + b) / 2 + phi) * sinc(w * h / 2);
}

Atom haar_atom(const DyadicCube& q) { return {Profile::haar, static_cast<double>(q.k[0]) * q.side(), q.side()}; }
Atom indicator_atom(const DyadicCube& q) {
  return {Profile::indicator, static_cast<double>(q.k[1]) * q.side(), q.side()};
}

std::uint64_t low_mask(int bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

// Coarser-layer blocks that can meet Q = I x J: ancestor I', odd J' near J.
template <class F>
void for_each_coarser_partner(const SquareCollection& c, int k, const DyadicCube& q, F&& f) {
  const int m = q.level;
  for (int kp = 1; kp < k; ++kp) {
    const int mp = c.levels[kp - 1];
    const int shift = m - mp;
    const std::int64_t ip = q.k[0] >> shift;
    const std::int64_t base = q.k[1] >> shift;
    for (std::int64_t jp = base - 1; jp <= base + 2; ++jp) {
      if (jp < 0 || jp >= (std::int64_t{1} << mp) || (jp & 1) == 0) continue;
      f(DyadicCube(2, mp, {ip, jp, 0}));
    }
  }
}

}  // namespace

// ------------------------------------------------------------------ epsilon

double DyadicEps::value() const { return std::ldexp(1.0, -n0); }

std::string DyadicEps::str() const { return "1/" + std::to_string(std::int64_t{1} << n0); }

DyadicEps DyadicEps::parse(const std::string& s) {
  double v = 0.0;
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      v = std::stod(s);
    } else {
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      v = num / den;
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("epsilon '" + s + "' is not a number");
  }
  int e = 0;
  const double mant = std::frexp(v, &e);
  if (!(v > 0.0) || mant != 0.5 || e > 0 || 1 - e < 1) {
    throw std::invalid_argument("epsilon '" + s + "' must be 2^-n0 with n0 >= 1");
  }
  DyadicEps out{1 - e};
  if (out.n0 > kMaxN0) throw std::invalid_argument("epsilon '" + s + "' is below 1/8");
  return out;
}

// ----------------------------------------------------------------- profiles

double profile_value(Profile p, double y) {
  for (const Piece& pc : pieces(p)) {
    const bool last = &pc == &pieces(p).back();
    if (y < pc.lo || y > pc.hi || (!last && y == pc.hi)) continue;
    double v = 0.0;
    for (const Term& t : pc.terms) v += t.amp * std::cos(t.freq * y + t.phase);
    return v;
  }
  return 0.0;
}

double overlap(const Atom& a0, const Atom& b0) {
  const bool swap = b0.scale < a0.scale;
  const Atom& a = swap ? b0 : a0;
  const Atom& b = swap ? a0 : b0;
  // x = a.origin + a.scale u; y_b = d + r u
  const double d = (a.origin - b.origin) / b.scale;
  const double r = a.scale / b.scale;
  double total = 0.0;
  for (const Piece& pa : pieces(a.profile)) {
    for (const Piece& pb : pieces(b.profile)) {
      const double lo = std::max(pa.lo, (pb.lo - d) / r);
      const double hi = std::min(pa.hi, (pb.hi - d) / r);
      if (!(hi > lo)) continue;
      for (const Term& ta : pa.terms) {
        for (const Term& tb : pb.terms) {
          const double wm = ta.freq - tb.freq * r, pm = ta.phase - tb.freq * d - tb.phase;
          const double wp = ta.freq + tb.freq * r, pp = ta.phase + tb.freq * d + tb.phase;
          total += 0.5 * ta.amp * tb.amp * (cos_integral(lo, hi, wm, pm) + cos_integral(lo, hi, wp, pp));
        }
      }
    }
  }
  return total * a.scale;
}

// ------------------------------------------------------------------- blocks

Atom BlockSpec::x1() const {
  return {variant == Variant::plain ? Profile::A : Profile::A_tilde, static_cast<double>(q.k[0]) * q.side(),
          q.side()};
}

Atom BlockSpec::x2() const {
  return {variant == Variant::plain ? Profile::B : Profile::B_tilde, static_cast<double>(q.k[1]) * q.side(),
          eps.value() * q.side()};
}

double BlockSpec::value(double x1v, double x2v) const {
  const Atom a = x1(), b = x2();
  return profile_value(a.profile, (x1v - a.origin) / a.scale) * profile_value(b.profile, (x2v - b.origin) / b.scale);
}

double block_inner_products(const BlockSpec& qp, const DyadicCube& q, InnerKind kind) {
  if (q.n != 2 || qp.q.n != 2) throw std::invalid_argument("blocks live in dimension 2");
  if (kind == InnerKind::vs_haar10) return overlap(qp.x1(), haar_atom(q)) * overlap(qp.x2(), indicator_atom(q));
  const BlockSpec other{q, qp.eps, qp.variant};
  return overlap(qp.x1(), other.x1()) * overlap(qp.x2(), other.x2());
}

BlockSpec single_block(DyadicEps eps, Variant v) { return {DyadicCube(2, 1, {0, 1, 0}), eps, v}; }

// --------------------------------------------------------------- collection

double SquareCollection::total_count() const {
  double s = 0.0;
  for (int k = 1; k <= layers(); ++k) s += std::ldexp(1.0, log2_count(k));
  return s;
}

double SquareCollection::layer_measure(int k) const { return std::ldexp(1.0, log2_count(k) - 2 * levels[k - 1]); }

double SquareCollection::total_measure() const {
  double s = 0.0;
  for (int k = 1; k <= layers(); ++k) s += layer_measure(k);
  return s;
}

DyadicCube SquareCollection::cube(int k, std::uint64_t i, std::uint64_t odd_rank) const {
  const int m = levels.at(k - 1);
  if (i >> m || odd_rank >> (m - 1)) throw std::out_of_range("square outside layer");
  return DyadicCube(2, m, {static_cast<std::int64_t>(i), static_cast<std::int64_t>(2 * odd_rank + 1), 0});
}

std::vector<DyadicCube> SquareCollection::layer_cubes(int k) const {
  const int m = levels.at(k - 1);
  if (log2_count(k) > 30) throw ResourceError("layer " + std::to_string(k) + " is too large to enumerate");
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << log2_count(k));
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << (m - 1)); ++r)
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << m); ++i) out.push_back(cube(k, i, r));
  return out;
}

SquareCollection build_collection(DyadicEps eps, double cap, bool allow_sampling) {
  if (eps.n0 < 1 || eps.n0 > kMaxN0) throw std::invalid_argument("epsilon must be 1/2, 1/4 or 1/8");
  SquareCollection c;
  c.eps = eps;
  const int layers = 1 << eps.n0;
  for (int k = 1; k <= layers; ++k) c.levels.push_back(2 * k * eps.n0);
  const double count = c.total_count();
  c.enumerable = count <= cap;
  if (!c.enumerable && !allow_sampling) {
    std::ostringstream os;
    os << "collection for epsilon " << eps.str() << " has " << count << " squares, above the cap of " << cap
       << "; use sampling";
    throw ResourceError(os.str());
  }
  return c;
}

double collection_coefficient(const SquareCollection& c, int k, const DyadicCube& q) {
  double s = block_inner_products({q, c.eps}, q, InnerKind::vs_haar10);
  for_each_coarser_partner(c, k, q, [&](const DyadicCube& qp) {
    s += block_inner_products({qp, c.eps}, q, InnerKind::vs_haar10);
  });
  return s;
}

double gram_row(const SquareCollection& c, int k, const DyadicCube& q, Variant v, bool diagonal_only) {
  const BlockSpec self{q, c.eps, v};
  double s = block_inner_products(self, q, InnerKind::vs_block);
  if (diagonal_only) return s;
  for_each_coarser_partner(c, k, q, [&](const DyadicCube& qp) {
    s += 2.0 * block_inner_products({qp, c.eps, v}, q, InnerKind::vs_block);
  });
  return s;
}

namespace {

// Sum over G of x_Q, where x_Q / |Q| is passed in by term(k, Q).
template <class F>
double layered_sum(const SquareCollection& c, SampleMode mode, F&& term) {
  double total = 0.0;
  for (int k = 1; k <= c.layers(); ++k) {
    const int m = c.levels[k - 1];
    const bool exact_layer = mode.exact || std::ldexp(1.0, c.log2_count(k)) <= mode.m;
    if (exact_layer) {
      if (!c.enumerable && mode.exact) throw ResourceError("collection too large for exact evaluation");
      double s = 0.0;
      for (const DyadicCube& q : c.layer_cubes(k)) s += term(k, q) * q.volume();
      total += s;
    } else {
      if (mode.m <= 0) throw std::invalid_argument("sample size must be positive");
      CounterRng rng(mode.seed, static_cast<std::uint64_t>(k));
      double s = 0.0;
      for (int t = 0; t < mode.m; ++t) {
        const std::uint64_t i = rng.next() & low_mask(m);
        const std::uint64_t r = rng.next() & low_mask(m - 1);
        s += term(k, c.cube(k, i, r));
      }
      total += c.layer_measure(k) * s / mode.m;
    }
  }
  return total;
}

}  // namespace

double bessel_lower_bound(const SquareCollection& c, SampleMode mode) {
  return layered_sum(c, mode, [&](int k, const DyadicCube& q) {
    const double cq = collection_coefficient(c, k, q) / q.volume();
    return cq * cq;
  });
}

double gram_norm2(const SquareCollection& c, Variant v, SampleMode mode, bool diagonal_only) {
  return layered_sum(c, mode,
                     [&](int k, const DyadicCube& q) { return gram_row(c, k, q, v, diagonal_only) / q.volume(); });
}

// -------------------------------------------------------------------- dense

namespace {

double collection_value(const SquareCollection& c, Variant v, double x1, double x2) {
  double s = 0.0;
  for (int k = 1; k <= c.layers(); ++k) {
    const int m = c.levels[k - 1];
    const double side = std::ldexp(1.0, m);
    const auto i = static_cast<std::int64_t>(std::floor(x1 * side));
    const auto j = static_cast<std::int64_t>(std::nearbyint(x2 * side));
    if ((j & 1) == 0 || j >= (std::int64_t{1} << m) || i < 0 || i >= (std::int64_t{1} << m)) continue;
    s += BlockSpec{DyadicCube(2, m, {i, j, 0}), c.eps, v}.value(x1, x2);
  }
  return s;
}

}  // namespace

GridFunction dense_collection_field(const SquareCollection& c, int J, Variant v, int quad) {
  return embed([&](std::span<const double> x) { return collection_value(c, v, x[0], x[1]); }, 2, J, quad);
}

double dense_collection_energy(const SquareCollection& c, int J, Variant v) {
  return embed(
             [&](std::span<const double> x) {
               const double f = collection_value(c, v, x[0], x[1]);
               return f * f;
             },
             2, J, 5)
      .mean();
}

// -------------------------------------------------------------- experiments

std::vector<SharpnessRow> sharpness_experiment_pge2(const std::vector<DyadicEps>& eps, double eta, SampleMode mode,
                                                    double cap) {
  std::vector<SharpnessRow> rows;
  for (const DyadicEps& e : eps) {
    const SquareCollection c = build_collection(e, cap, !mode.exact);
    const SampleMode used = c.enumerable ? SampleMode{true, 0, mode.seed} : mode;
    SharpnessRow r;
    r.epsilon = e.str();
    r.eta = eta;
    r.lower_P = std::sqrt(bessel_lower_bound(c, used));
    r.norm_f = std::sqrt(gram_norm2(c, Variant::plain, used));
    r.norm_Rf = e.value() * std::sqrt(gram_norm2(c, Variant::tilde, used));
    r.ratio = r.lower_P / (std::pow(r.norm_f, 0.5 - eta) * std::pow(r.norm_Rf, 0.5 + eta));
    r.mode = used.exact ? "exact" : "sampled";
    r.size = used.exact ? static_cast<long long>(c.total_count()) : used.m;
    r.seed = mode.seed;
    if (!rows.empty()) r.growth = r.ratio / rows.back().ratio;
    rows.push_back(r);
  }
  return rows;
}

std::vector<SharpnessRow> single_block_experiment_ple2(const std::vector<DyadicEps>& eps, double p, double eta,
                                                       int extra_levels) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  const double q = p / (p - 1.0);
  std::vector<SharpnessRow> rows;
  for (const DyadicEps& e : eps) {
    const int J = e.n0 + extra_levels;
    const BlockSpec b = single_block(e);
    const GridFunction g = embed([&](std::span<const double> x) { return b.value(x[0], x[1]); }, 2, J, 5);
    const double scale = std::pow(b.q.volume(), -1.0 / p);
    SharpnessRow r;
    r.epsilon = e.str();
    r.p = p;
    r.eta = eta;
    r.norm_f = lp_norm(g, p) * scale;
    r.norm_Rf = lp_norm(riesz(g, 0), p) * scale;
    r.lower_P = lp_norm(directional_project(g, Direction::unit(2, 0)), p) * scale;
    r.ratio = r.lower_P / (std::pow(r.norm_f, 1.0 / p - eta) * std::pow(r.norm_Rf, 1.0 / q + eta));
    r.mode = "dense";
    r.size = J;
    if (!rows.empty()) r.growth = r.ratio / rows.back().ratio;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hrl
