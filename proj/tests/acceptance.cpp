// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hrl/experiments.hpp"
#include "hrl/fourier.hpp"
#include "hrl/haar.hpp"
#include "hrl/multiscale.hpp"
#include "hrl/random.hpp"
#include "hrl/semiconvexity.hpp"
#include "hrl/sharpness.hpp"

using namespace hrl;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass;
  std::string detail;
};

double max_abs(const GridFunction& u) {
  double m = 0.0;
  for (double x : u.values()) m = std::max(m, std::abs(x));
  return m;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1D composite Gauss-Legendre, 5 points per panel.
double gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 5; ++i) s += ws[i] * f(a + (p + 0.5) * h + xs[i] * h / 2) * h / 2;
  return s;
}

Verdict haar_roundtrip() {
  double worst_cell = 0.0, worst_parseval = 0.0;
  for (auto [n, J] : {std::pair{1, 6}, {2, 5}, {3, 4}}) {
    for (int t = 0; t < 100; ++t) {
      const GridFunction u = random_field(n, J, 100 + t, n);
      const HaarCoefficients c = haar_analyze(u);
      worst_cell = std::max(worst_cell, max_abs(haar_synthesize(c) - u));
      double e = c.mean() * c.mean();
      for (int j = 0; j < J; ++j)
        for (const Direction& d : Direction::all(n))
          for (double v : c.band(j, d)) e += v * v * std::ldexp(1.0, -n * j);
      const double u2 = l2_norm(u) * l2_norm(u);
      worst_parseval = std::max(worst_parseval, std::abs(e - u2) / u2);
    }
  }
  return {worst_cell <= 1e-12 && worst_parseval <= 1e-10,
          fmt("max cell error %.2e, max Parseval rel. error %.2e", worst_cell, worst_parseval)};
}

Verdict riesz_identities() {
  const int J = 6;
  double worst_energy = 0.0, worst_inverse = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const GridFunction u = random_mean_zero_field(n, n == 3 ? 4 : J, 7, n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::pow(l2_norm(riesz(u, i)), 2);
    worst_energy = std::max(worst_energy, std::abs(s - std::pow(l2_norm(u), 2)) / std::pow(l2_norm(u), 2));
  }
  for (int t = 0; t < 100; ++t) {
    const GridFunction w = random_cone_field(2, J, t % 2, 12, 500 + t);
    const double d = max_abs(riesz_inverse(w, t % 2, InverseMode::direct) -
                             riesz_inverse(w, t % 2, InverseMode::composite));
    worst_inverse = std::max(worst_inverse, d / std::max(1.0, max_abs(w)));
  }
  return {worst_energy <= 1e-10 && worst_inverse <= 1e-8,
          fmt("energy rel. error %.2e, direct vs composite %.2e", worst_energy, worst_inverse)};
}

Verdict decomposition() {
  const int J = 7;
  const Direction e(2, 1);
  const LevelRange lv{1, 5};
  const GridFunction u = random_haar_field(2, J, 1, 5, 2024);
  const GridFunction target = directional_project(u, e);
  GridFunction sum = t_ell(u, e, 0, lv);
  double prev = l2_norm(target - sum);
  bool monotone = true;
  std::string trail;
  for (int L = 1; L <= 4; ++L) {
    sum += t_ell(u, e, L, lv);
    sum += t_ell(u, e, -L, lv);
    const double r = l2_norm(target - sum);
    monotone = monotone && r <= prev;
    prev = r;
    trail += fmt(" %.4f", r / l2_norm(target));
  }
  const double rel = prev / l2_norm(target);
  return {monotone && rel <= 0.05, "relative residual by L:" + trail + (monotone ? ", monotone" : ", NOT monotone")};
}

Verdict tl_decay_check() {
  TlDecayConfig c;
  c.ells = {-4, -3, -2, -1, 0, 1, 2, 3, 4};
  c.seed = 1;
  const auto rows = tl_decay(c);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.slack);
  std::string m;
  for (const auto& r : rows) m += fmt(" %.3f", r.measured);
  return {worst <= 2.0, "m(-4..4):" + m + fmt(", max slack %.3f (<= 2)", worst)};
}

Verdict ring_and_rearrangement() {
  RingDecayConfig rc;
  rc.lambdas = {3, 4, 5};
  const auto ring = ring_decay(rc);
  RearrangeConfig ac;
  ac.lambdas = {1, 2, 3};
  const auto rea = rearrange_scaling(ac);
  const double r1 = ring[1].measured / ring[0].measured, r2 = ring[2].measured / ring[1].measured;
  const double g1 = rea[1].measured / rea[0].measured, g2 = rea[2].measured / rea[1].measured;
  const double ring_cap = std::pow(2.0, -0.5) * 1.5, rea_cap = 4.0 * 1.5;
  return {r1 <= ring_cap && r2 <= ring_cap && g1 <= rea_cap && g2 <= rea_cap,
          fmt("ring ratios %.3f %.3f (<= %.3f); ", r1, r2, ring_cap) +
              fmt("rearrangement ratios %.3f %.3f (<= 6)", g1, g2)};
}

Verdict interpolation() {
  InterpConfig c;
  const auto rows = interp_ratio_experiment(c);
  bool ok = true;
  std::string d;
  for (const auto& r : rows) {
    if (r.experiment != "interp-ratio:all") continue;
    ok = ok && std::isfinite(r.measured) && std::abs(r.slack - 1.0) <= 0.2;
    d += fmt("p=%.1f sup %.4f -> %.4f; ", r.p, r.bound_model, r.measured);
  }
  return {ok, d + "J 6 -> 7"};
}

Verdict sharpness_ple2() {
  // Normalized coefficient at |Q| = 1: the x1 factor against the Haar function
  // and the x2 factor against the indicator, by quadrature.
  double worst = 0.0;
  for (int n0 = 1; n0 <= 3; ++n0) {
    const double eps = std::ldexp(1.0, -n0);
    const double x1 = gauss([](double x) { return std::sin(2 * kPi * x); }, 0.0, 0.5, 64) -
                      gauss([](double x) { return std::sin(2 * kPi * x); }, 0.5, 1.0, 64);
    const double x2 = gauss([&](double x) { return std::sin(kPi * x / eps); }, 0.0, eps, 64);
    const double closed_form = 4 * eps / (kPi * kPi);
    const DyadicCube q(2, 0, {});
    const double engine = block_inner_products({q, DyadicEps{n0}}, q, InnerKind::vs_haar10);
    worst = std::max({worst, std::abs(x1 * x2 - closed_form), std::abs(engine - closed_form)});
  }
  const auto rows = single_block_experiment_ple2({DyadicEps{1}, DyadicEps{2}, DyadicEps{3}}, 1.5, 0.1);
  const double need = std::pow(2.0, 0.1) * 0.7;
  bool grows = true;
  for (std::size_t i = 1; i < rows.size(); ++i) grows = grows && rows[i].growth >= need;
  return {grows && worst <= 1e-10, fmt("growth %.3f %.3f (>= %.3f), ", rows[1].growth, rows[2].growth, need) +
                                       fmt("|<g,h> - 4eps/pi^2| <= %.1e", worst)};
}

Verdict sharpness_pge2() {
  const SquareCollection c = build_collection(DyadicEps{1});
  const int J = 7;
  const GridFunction f = dense_collection_field(c, J);
  const GridFunction ft = dense_collection_field(c, J, Variant::tilde);
  const double eps = 0.5;
  const double pf = l2_norm(directional_project(f, Direction::unit(2, 0)));
  const double rf = l2_norm(riesz(f, 0));
  const HaarCoefficients hc = haar_analyze(f);
  double engine = 0.0;
  for (int k = 1; k <= c.layers(); ++k)
    for (const auto& q : c.layer_cubes(k))
      engine = std::max(engine, std::abs(collection_coefficient(c, k, q) / q.volume() -
                                         hc.coefficient(q, Direction::unit(2, 0))));
  const double gram = gram_norm2(c, Variant::plain, {});
  engine = std::max(engine, std::abs(gram - dense_collection_energy(c, J)) / gram);
  const auto rows = sharpness_experiment_pge2({DyadicEps{1}, DyadicEps{2}, DyadicEps{3}}, 0.1, {false, 2000, 0});
  const double need = std::pow(2.0, 0.1) * 0.7;
  bool grows = true;
  for (std::size_t i = 1; i < rows.size(); ++i) grows = grows && rows[i].growth >= need;
  const bool ok = pf >= 0.1 * std::sqrt(eps) && rf <= 3 * eps * l2_norm(ft) && engine <= 1e-6 && grows;
  return {ok, fmt("|Pf| %.4f (>= %.4f), |R1 f| %.4f (<= %.4f), ", pf, 0.1 * std::sqrt(eps), rf,
                  3 * eps * l2_norm(ft)) +
                  fmt("engine vs dense %.1e, growth %.3f %.3f", engine, rows[1].growth, rows[2].growth)};
}

Verdict jensen() {
  const auto reg = integrand_registry(2);
  const int J = 4;
  double worst = 1e300;
  for (int t = 0; t < 200; ++t) {
    VectorField v;
    for (int j = 0; j < 2; ++j) v.push_back(random_haar_field(2, J, 0, J - 1, 77 + t, j));
    for (const auto& f : reg)
      for (int M = 0; M <= 3; ++M) worst = std::min(worst, jensen_range_check(v, f, M));
  }
  return {worst >= -1e-9, fmt("min defect %.2e over 200 fields x 4 integrands x M = 0..3", worst)};
}

Verdict semicontinuity() {
  const auto reg = integrand_registry(2);
  const FieldFn one = [](std::span<const double>) { return 1.0; };
  const std::vector<int> rs{1, 2, 4, 8, 16};
  double worst = 1e300;
  for (const auto& f : reg)
    for (const auto& r : semicontinuity_experiment(f, one, compliant_sequence(2), rs, 7))
      worst = std::min(worst, r.I_r - r.I_limit);
  double gap = 1e300;
  for (const auto& r : semicontinuity_experiment(find_integrand(reg, "ab"), one, contrast_sequence(2), rs, 7))
    gap = std::min(gap, r.I_r - r.I_limit);
  return {worst >= -1e-8 && gap >= 0.4,
          fmt("compliant min(I_r - I_lim) %.2e, contrast gap for ab %.4f (>= 0.4)", worst, gap)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Verdict (*run)();
  };
  const Criterion all[] = {
      {1, "Haar round trip and Parseval", 10, haar_roundtrip},
      {2, "Riesz identities", 30, riesz_identities},
      {3, "T_ell decomposition of P", 60, decomposition},
      {4, "T_ell decay at p = 2", 300, tl_decay_check},
      {5, "ring projection and rearrangement scaling", 300, ring_and_rearrangement},
      {6, "interpolatory ratio stability", 300, interpolation},
      {7, "sharpness, p <= 2 single block", 120, sharpness_ple2},
      {8, "sharpness, p >= 2 collection", 600, sharpness_pge2},
      {9, "Jensen on the range of P", 60, jensen},
      {10, "semicontinuity, compliant vs contrast", 60, semicontinuity},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = v.pass && secs < c.budget_s;
    failed += !pass;
    std::printf("[%s] %2d %s: %s (%.2fs, budget %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/10 criteria passed\n", 10 - failed);
  return failed ? 1 : 0;
}
