#include "selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "hrl/dyadic.hpp"
#include "hrl/fourier.hpp"
#include "hrl/haar.hpp"
#include "hrl/multiscale.hpp"
#include "hrl/random.hpp"
#include "hrl/semiconvexity.hpp"
#include "hrl/sharpness.hpp"

namespace hrl::tool {

namespace {

constexpr double kPi = std::numbers::pi;

class Checks {
 public:
  void near(const std::string& name, double measured, double expected, double tol) {
    add(name, measured, expected, tol, CheckKind::near, std::abs(measured - expected) <= tol);
  }
  void at_most(const std::string& name, double measured, double bound) {
    add(name, measured, bound, 0.0, CheckKind::at_most, measured <= bound);
  }
  void at_least(const std::string& name, double measured, double bound) {
    add(name, measured, bound, 0.0, CheckKind::at_least, measured >= bound);
  }
  // 1 if fn throws E, else 0.
  template <class E>
  void throws(const std::string& name, const std::function<void()>& fn) {
    double got = 0.0;
    try {
      fn();
    } catch (const E&) {
      got = 1.0;
    } catch (...) {
    }
    near(name, got, 1.0, 0.0);
  }
  std::vector<CheckRow> rows;

 private:
  void add(const std::string& name, double m, double e, double t, CheckKind k, bool pass) {
    rows.push_back({name, m, e, t, k, pass});
  }
};

double max_abs(const GridFunction& u) {
  double m = 0.0;
  for (double x : u.values()) m = std::max(m, std::abs(x));
  return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

GridFunction constant(int n, int J, double c) {
  GridFunction u(n, J);
  for (double& x : u.values()) x = c;
  return u;
}

void dyadic_checks(Checks& c, int n, int J, std::uint64_t seed) {
  const GridFunction u = random_field(n, J, seed, 1);
  const HaarCoefficients hc = haar_analyze(u);
  c.at_most("haar round trip max error", max_abs(haar_synthesize(hc) - u), 1e-12);
  double energy = hc.mean() * hc.mean();
  for (int j = 0; j < J; ++j)
    for (const Direction& e : Direction::all(n))
      for (double v : hc.band(j, e)) energy += v * v * std::ldexp(1.0, -n * j);
  c.at_most("Parseval relative error", rel(energy, l2_norm(u) * l2_norm(u)), 1e-10);

  const HaarCoefficients hconst = haar_analyze(constant(n, J, 2.5));
  double worst = 0.0;
  for (int j = 0; j < J; ++j)
    for (const Direction& e : Direction::all(n))
      for (double v : hconst.band(j, e)) worst = std::max(worst, std::abs(v));
  c.at_most("constant field has no Haar coefficients", worst, 1e-14);
  c.near("constant field mean", hconst.mean(), 2.5, 1e-14);

  const DyadicCube q(n, std::min(1, J - 1), {});
  const GridFunction h = haar_function(q, Direction::all(n).back(), J);
  c.near("|h_Q|_2^2 equals |Q|", l2_norm(h) * l2_norm(h), q.volume(), 1e-14);

  const Direction e1 = Direction::unit(n, 0);
  const GridFunction pu = directional_project(u, e1);
  c.at_most("directional projection idempotent", max_abs(directional_project(pu, e1) - pu), 1e-12);
  GridFunction sum = constant(n, J, u.mean());
  for (const Direction& e : Direction::all(n)) sum += directional_project(u, e);
  c.at_most("projections plus mean reconstruct u", max_abs(sum - u), 1e-12);

  const int M1 = std::max(0, J - 2), M2 = std::max(0, J - 3);
  c.at_most("conditional expectation tower property",
            max_abs(conditional_expectation(conditional_expectation(u, M1), M2) - conditional_expectation(u, M2)),
            1e-13);
  c.at_most("E_J is the identity", max_abs(conditional_expectation(u, J) - u), 0.0);

  const GridFunction s = square_function(u);
  const double s2 = l2_norm(s) * l2_norm(s);
  const double v2 = std::pow(l2_norm(u - constant(n, J, u.mean())), 2);
  c.at_most("square function L2 identity", rel(s2, v2), 1e-10);
  c.near("BMO norm of a constant", bmo_d_norm(constant(n, J, -3.0)), 3.0, 1e-12);
  c.near("Lp norm of a constant (p = 3)", lp_norm(constant(n, J, -2.0), 3.0), 2.0, 1e-12);
}

void fourier_checks(Checks& c, int n, int J, std::uint64_t seed) {
  const GridFunction u = random_mean_zero_field(n, J, seed, 2);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::pow(l2_norm(riesz(u, i)), 2);
  c.at_most("Riesz energy identity", rel(s, std::pow(l2_norm(u), 2)), 1e-10);

  const GridFunction wave =
      embed([&](std::span<const double> x) { return std::cos(2 * kPi * x[0]); }, n, J, 5);
  const GridFunction wave_sin =
      embed([&](std::span<const double> x) { return std::sin(2 * kPi * x[0]); }, n, J, 5);
  c.at_most("R_1 cos(2 pi x1) = sin(2 pi x1)", max_abs(riesz(wave, 0) - wave_sin), 1e-12);
  c.at_most("d_1 sin(2 pi x1) = 2 pi cos(2 pi x1)", max_abs(derivative(wave_sin, 0) - 2 * kPi * wave), 1e-10);
  c.at_most("antiderivative inverts derivative", max_abs(antiderivative(derivative(wave_sin, 0), 0) - wave_sin),
            1e-12);

  if (J >= 4) {
    const GridFunction w = random_cone_field(n, J, 0, (1 << J) / 4, seed, 3);
    const GridFunction d = riesz_inverse(w, 0, InverseMode::direct);
    c.at_most("inverse Riesz direct vs composite", max_abs(d - riesz_inverse(w, 0, InverseMode::composite)), 1e-8);
    c.at_most("R R^-1 is the identity on cone fields", max_abs(riesz(d, 0) - w), 1e-10);
  }
  c.throws<std::invalid_argument>("inverse Riesz rejects a nonzero mean",
                                  [&] { riesz_inverse(constant(n, J, 1.0), 0); });
  c.near("resolving kernel has zero mass", resolving_kernel(n, J, J - 2).total_mass(), 0.0, 1e-12);
  c.at_most("delta of a constant vanishes", max_abs(delta_conv(constant(n, J, 4.0), J - 2)), 1e-12);
}

LinearFieldOp scaled_identity(int n, int J, double a) {
  FieldMap f = [a](const GridFunction& u) { return a * u; };
  return {"scaled identity", n, J, f, f, {}};
}

void multiscale_checks(Checks& c, int n, int J, std::uint64_t seed) {
  c.near("power iteration: identity", op_norm2_estimate(scaled_identity(n, J, 1.0), 20, seed).value, 1.0, 1e-6);
  c.near("power iteration: 2 identity", op_norm2_estimate(scaled_identity(n, J, 2.0), 20, seed).value, 2.0, 1e-6);
  const Direction e = Direction::unit(n, 0);
  FieldMap proj = [e](const GridFunction& u) { return directional_project(u, e); };
  c.near("power iteration: projection", op_norm2_estimate({"P", n, J, proj, proj, {}}, 30, seed).value, 1.0, 1e-6);

  const LevelRange lv{1, std::max(1, J - 2)};
  c.at_most("T_ell of zero is zero", max_abs(t_ell(GridFunction(n, J), e, 1, lv)), 0.0);
  const GridFunction u = random_field(n, J, seed, 4), v = random_field(n, J, seed, 5);
  const GridFunction tu = t_ell(u, e, 1, lv);
  c.at_most("T_ell lies in the range of P", max_abs(directional_project(tu, e) - tu), 1e-12);
  c.at_most("T_ell adjoint identity", rel(inner(tu, v), inner(u, t_ell_adjoint(v, e, 1, lv))), 1e-10);

  const Direction e10(2, 1);
  const DyadicCube root(2, 0, {});
  const RingCover rc = ring_cover(root, e10, 3, 1.0 / std::sqrt(2.0), 6);
  c.near("ring cover of the unit square, lambda = 3", static_cast<double>(rc.cells.size()), 40.0, 0.0);
  for (int lambda : {3, 4, 5})
    c.at_most("ring measure constant, lambda = " + std::to_string(lambda),
              ring_cover(root, e10, lambda, 1.0 / std::sqrt(2.0), 8).measure_constant, 6.0);
  const RingFamily fam = build_ring_family({root}, e10, 3, 1.0 / std::sqrt(2.0), 5);
  GridFunction expect(2, 5);
  for (const auto& cell : rc.cells) expect += haar_function(cell, e10, 5);
  c.at_most("ring projection of h_Q is g_Q", max_abs(ring_projection(haar_function(root, e10, 5), fam) - expect),
            1e-14);
  c.at_most("ring projection kills orthogonal Haar terms",
            max_abs(ring_projection(haar_function(root, Direction(2, 2), 5), fam)), 0.0);

  RearrangementSpec spec;
  spec.n = 2;
  spec.J = 5;
  spec.lambda = 1;
  spec.wmin = 0;
  spec.wmax = 2;
  c.at_most("rearrangement of a constant vanishes", max_abs(rearrangement_op(constant(2, 5, 1.0), spec)), 1e-13);
  const GridFunction a = random_field(2, 5, seed, 6), b = random_field(2, 5, seed, 7);
  c.at_most("rearrangement adjoint identity",
            rel(inner(rearrangement_op(a, spec), b), inner(a, rearrangement_adjoint(b, spec))), 1e-10);
  RearrangementSpec bad = spec;
  bad.profile = {"ramp", [](double lo, double hi) { return hi - lo; }};
  c.throws<std::invalid_argument>("rearrangement rejects a profile with nonzero mean",
                                  [&] { rearrangement_op(a, bad); });
}

void sharpness_checks(Checks& c) {
  for (int n0 = 1; n0 <= 3; ++n0) {
    const DyadicEps e{n0};
    const DyadicCube q(2, 0, {});
    c.near("<g, h> = 4 eps / pi^2 at eps = " + e.str(), block_inner_products({q, e}, q, InnerKind::vs_haar10),
           4 * e.value() / (kPi * kPi), 1e-12);
  }
  const DyadicEps half{1};
  const DyadicCube q(2, 2, {1, 1, 0});
  c.near("<g, g> = eps |Q| / 2", block_inner_products({q, half}, q, InnerKind::vs_block), q.volume() / 4, 1e-15);
  c.near("vertically adjacent block flips the coefficient",
         block_inner_products({DyadicCube(2, 2, {1, 2, 0}), half}, q, InnerKind::vs_haar10),
         -block_inner_products({q, half}, q, InnerKind::vs_haar10), 1e-15);

  const SquareCollection col = build_collection(half);
  c.near("first layer size at eps = 1/2", static_cast<double>(col.layer_cubes(1).size()), 8.0, 0.0);
  c.near("second layer size at eps = 1/2", static_cast<double>(col.layer_cubes(2).size()), 128.0, 0.0);
  c.near("total measure at eps = 1/2", col.total_measure(), 1.0, 1e-15);

  const int J = 7;
  const GridFunction f = dense_collection_field(col, J);
  const HaarCoefficients hc = haar_analyze(f);
  double worst = 0.0;
  for (int k = 1; k <= col.layers(); ++k)
    for (const DyadicCube& cube : col.layer_cubes(k))
      worst = std::max(worst, std::abs(collection_coefficient(col, k, cube) / cube.volume() -
                                       hc.coefficient(cube, Direction::unit(2, 0))));
  c.at_most("coefficient engine vs dense grid", worst, 1e-6);
  c.at_most("Gram vs dense energy", rel(gram_norm2(col, Variant::plain, {}), dense_collection_energy(col, J)), 1e-6);
  c.at_most("tilde Gram vs dense energy",
            rel(gram_norm2(col, Variant::tilde, {}), dense_collection_energy(col, J, Variant::tilde)), 1e-6);
  c.throws<ResourceError>("cap refusal at eps = 1/4", [] { build_collection(DyadicEps{2}); });
}

void semiconvexity_checks(Checks& c, std::uint64_t seed) {
  const auto reg = integrand_registry(2);
  for (const Integrand& f : reg) c.at_least("separate convexity of " + f.name, separate_convexity_margin(f), -1e-9);
  c.throws<std::invalid_argument>("separate convexity rejects -a^2", [] {
    validate_separately_convex({"neg_sq", 2, [](std::span<const double> x) { return -x[0] * x[0]; }});
  });
  const int J = 5;
  auto along = [&](int axis, std::function<double(double)> g) {
    return embed([=](std::span<const double> x) { return g(x[axis]); }, 2, J, 5);
  };
  c.at_most("A0 vanishes on separated fields",
            a0_max_abs({along(0, [](double t) { return std::sin(2 * kPi * t); }),
                        along(1, [](double t) { return std::cos(4 * kPi * t); })}),
            1e-10);
  const auto a0 = a0_apply({along(1, [](double t) { return std::sin(2 * kPi * t); }), GridFunction(2, J)});
  c.at_most("A0 entry (2,1) of sin(2 pi x2)",
            max_abs(a0[2] - 2 * kPi * along(1, [](double t) { return std::cos(2 * kPi * t); })), 1e-10);
  c.at_most("A0 of a constant", a0_max_abs({constant(2, J, 1.0), constant(2, J, -2.0)}), 1e-12);

  const DyadicCube root(2, 0, {});
  const VectorField hv{haar_function(root, Direction::unit(2, 0), J), haar_function(root, Direction::unit(2, 1), J)};
  c.near("Jensen defect of ab on two unit blocks", jensen_range_check(hv, reg[0], 0), 0.0, 1e-14);
  const Integrand sq{"sq", 2, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; }};
  c.at_least("Jensen defect of a convex quadratic",
             jensen_range_check({random_field(2, J, seed, 8), random_field(2, J, seed, 9)}, sq, 1), -1e-12);
  c.near("residual ratio of separated sines",
         residual_ratio({along(0, [](double t) { return std::sin(2 * kPi * t); }),
                         along(1, [](double t) { return std::sin(2 * kPi * t); })},
                        2.0),
         0.0, 0.0);
  const double rr = residual_ratio({haar_function(root, Direction::unit(2, 1), J), GridFunction(2, J)}, 2.0);
  c.at_least("residual ratio of h^(0,1) is positive", rr, 1e-12);
  c.at_most("residual ratio of h^(0,1) is finite", rr, 1e6);

  const FieldFn one = [](std::span<const double>) { return 1.0; };
  const auto comp = semicontinuity_experiment(reg[0], one, compliant_sequence(2), {2, 4, 8}, 6);
  double w = 0.0;
  for (const auto& r : comp) w = std::max(w, std::abs(r.I_r));
  c.at_most("compliant sequence: |I_r| for ab", w, 1e-10);
  const auto con = semicontinuity_experiment(reg[0], one, contrast_sequence(2), {2}, 6);
  const double z = kPi * 2 / 64.0;
  c.near("contrast sequence: I_r for ab", con[0].I_r, 0.5 * std::pow(std::sin(z) / z, 2), 1e-9);
  double gap = 1e300;
  for (const auto& r : semicontinuity_experiment(sq, one, contrast_sequence(2), {2, 4, 8}, 6))
    gap = std::min(gap, r.I_r - r.I_limit);
  c.at_least("convex integrand: I_r - I_limit", gap, -1e-9);
}

}  // namespace

std::vector<CheckRow> run_selftest(int n, int J, std::uint64_t seed) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("selftest needs n in 1..3");
  if (J < 3 || n * J > 21) throw std::invalid_argument("selftest needs J >= 3 and n*J <= 21");
  Checks c;
  dyadic_checks(c, n, J, seed);
  fourier_checks(c, n, J, seed);
  multiscale_checks(c, n, J, seed);
  sharpness_checks(c);
  semiconvexity_checks(c, seed);
  return c.rows;
}

}  // namespace hrl::tool
