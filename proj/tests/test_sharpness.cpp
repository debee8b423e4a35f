#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "hrl/fourier.hpp"
#include "hrl/haar.hpp"
#include "hrl/sharpness.hpp"
#include "oracles.hpp"

using namespace hrl;

namespace {

constexpr double kPi = std::numbers::pi;

// Block functions written out directly.
double g_direct(const DyadicCube& q, double eps, bool tilde, double x1, double x2) {
  const double s = q.side();
  const double y = (x1 - q.k[0] * s) / s;
  const double t = (x2 - q.k[1] * s) / (eps * s);
  if (y < 0 || y >= 1 || t < -1 || t > 1) return 0.0;
  if (!tilde) return std::sin(2 * kPi * y) * std::sin(kPi * t);
  return 2 * kPi * std::cos(2 * kPi * y) * (-(1 + std::cos(kPi * t)) / kPi);
}

// Composite 5-point Gauss-Legendre on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) s += ws[i] * f(c + xs[i] * h / 2) * h / 2;
  }
  return s;
}

// <g_{Q'}, h_Q^{(1,0)}> by 2D quadrature over Q (panels aligned with Q's halves).
double haar_inner_direct(const DyadicCube& qp, double eps, const DyadicCube& q) {
  const double s = q.side(), a1 = q.k[0] * s, a2 = q.k[1] * s;
  auto inner_x2 = [&](double x1) {
    const double sign = (x1 < a1 + s / 2) ? 1.0 : -1.0;
    return sign * integrate([&](double x2) { return g_direct(qp, eps, false, x1, x2); }, a2, a2 + s, 256);
  };
  return integrate(inner_x2, a1, a1 + s / 2, 64) + integrate(inner_x2, a1 + s / 2, a1 + s, 64);
}

SquareCollection half() { return build_collection(DyadicEps{1}); }

}  // namespace

TEST_CASE("epsilon parsing") {
  CHECK(DyadicEps::parse("1/8").n0 == 3);
  CHECK(DyadicEps::parse("0.5").n0 == 1);
  CHECK(DyadicEps::parse("1/4").str() == "1/4");
  CHECK_THROWS_AS(DyadicEps::parse("1/3"), std::invalid_argument);
  CHECK_THROWS_AS(DyadicEps::parse("1"), std::invalid_argument);
  CHECK_THROWS_AS(DyadicEps::parse("abc"), std::invalid_argument);
}

TEST_CASE("profile overlaps match quadrature") {
  const Profile ps[] = {Profile::A, Profile::A_tilde, Profile::B, Profile::B_tilde, Profile::haar,
                        Profile::indicator};
  const Atom placements[] = {{Profile::A, 0.25, 0.25}, {Profile::A, 0.3125, 0.0625}, {Profile::A, 0.0, 1.0},
                             {Profile::A, 0.28125, 0.03125}};
  for (Profile p1 : ps) {
    for (Profile p2 : ps) {
      for (const Atom& a0 : placements) {
        for (const Atom& b0 : placements) {
          const Atom a{p1, a0.origin, a0.scale}, b{p2, b0.origin, b0.scale};
          // breakpoints of both profiles lie on multiples of 1/64 here
          double ref = 0.0;
          for (int c = -64; c < 128; ++c) {
            ref += integrate(
                [&](double x) {
                  return profile_value(a.profile, (x - a.origin) / a.scale) *
                         profile_value(b.profile, (x - b.origin) / b.scale);
                },
                c / 64.0, (c + 1) / 64.0, 4);
          }
          CHECK(overlap(a, b) == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("block Haar coefficient and adjacency") {
  for (int n0 = 1; n0 <= 3; ++n0) {
    const DyadicEps e{n0};
    for (const DyadicCube& q : {DyadicCube(2, 0, {0, 0, 0}), DyadicCube(2, 3, {5, 2, 0}), DyadicCube(2, 6, {9, 40, 0})}) {
      const double v = block_inner_products({q, e}, q, InnerKind::vs_haar10);
      CHECK(v == doctest::Approx(4 * e.value() * q.volume() / (kPi * kPi)).epsilon(1e-12));
      CHECK(block_inner_products({q, e}, q, InnerKind::vs_block) ==
            doctest::Approx(e.value() * q.volume() / 2).epsilon(1e-12));
      CHECK(haar_inner_direct(q, e.value(), q) == doctest::Approx(v).epsilon(1e-9));
      if (q.k[1] + 1 < (std::int64_t{1} << q.level)) {
        const DyadicCube above(2, q.level, {q.k[0], q.k[1] + 1, 0});
        CHECK(block_inner_products({above, e}, q, InnerKind::vs_haar10) == doctest::Approx(-v).epsilon(1e-12));
        CHECK(haar_inner_direct(above, e.value(), q) == doctest::Approx(-v).epsilon(1e-9));
      }
    }
  }
  // int A~^2 = 2 pi^2, int B~^2 = 3 / pi^2
  const DyadicEps e{2};
  const DyadicCube q(2, 2, {1, 3, 0});
  CHECK(block_inner_products({q, e, Variant::tilde}, q, InnerKind::vs_block) ==
        doctest::Approx(6 * e.value() * q.volume()).epsilon(1e-12));
}

TEST_CASE("collection sizes and measure") {
  const SquareCollection c = half();
  REQUIRE(c.layers() == 2);
  CHECK(c.layer_cubes(1).size() == 8);
  CHECK(c.layer_cubes(2).size() == 128);
  CHECK(c.total_measure() == doctest::Approx(1.0));
  CHECK(c.total_count() == 136);
  for (const DyadicCube& q : c.layer_cubes(2)) CHECK(q.k[1] % 2 == 1);

  CHECK_THROWS_AS(build_collection(DyadicEps{2}), ResourceError);
  const SquareCollection c4 = build_collection(DyadicEps{2}, 1e6, true);
  CHECK_FALSE(c4.enumerable);
  CHECK(c4.layers() == 4);
  CHECK(c4.total_count() == std::ldexp(1.0, 7) + std::ldexp(1.0, 15) + std::ldexp(1.0, 23) + std::ldexp(1.0, 31));
  CHECK(c4.total_measure() == doctest::Approx(2.0));
  CHECK_THROWS_AS(bessel_lower_bound(c4, SampleMode{}), ResourceError);
}

TEST_CASE("coefficient engine against a dense oracle") {
  const SquareCollection c = half();
  const double eps = 0.5;
  const int J = 7;
  std::vector<DyadicCube> all;
  for (int k = 1; k <= c.layers(); ++k)
    for (const auto& q : c.layer_cubes(k)) all.push_back(q);
  auto f_direct = [&](bool tilde, double x1, double x2) {
    double s = 0.0;
    for (const auto& q : all) s += g_direct(q, eps, tilde, x1, x2);
    return s;
  };
  const GridFunction f = embed([&](std::span<const double> x) { return f_direct(false, x[0], x[1]); }, 2, J, 5);
  CHECK(l2_norm(f - dense_collection_field(c, J)) < 1e-12);

  double bessel = 0.0;
  for (int k = 1; k <= c.layers(); ++k) {
    for (const auto& q : c.layer_cubes(k)) {
      const double dense = oracle::haar_coefficient(f, q, 1U) * q.volume();
      const double engine = collection_coefficient(c, k, q);
      CHECK(engine == doctest::Approx(dense).epsilon(1e-8).scale(1e-8));
      bessel += engine * engine / q.volume();
    }
  }
  CHECK(bessel_lower_bound(c, SampleMode{}) == doctest::Approx(bessel).epsilon(1e-12));

  for (bool tilde : {false, true}) {
    const double energy = embed(
                              [&](std::span<const double> x) {
                                const double v = f_direct(tilde, x[0], x[1]);
                                return v * v;
                              },
                              2, J, 5)
                              .mean();
    const double gram = gram_norm2(c, tilde ? Variant::tilde : Variant::plain, SampleMode{});
    CHECK(gram == doctest::Approx(energy).epsilon(1e-6));
  }

  // Projection lower bound and Riesz upper bound on the dense field.
  const double pf = l2_norm(directional_project(f, Direction::unit(2, 0)));
  CHECK(pf >= 0.1 * std::sqrt(eps));
  CHECK(pf * pf >= bessel * (1 - 1e-9));
  const GridFunction ft = embed([&](std::span<const double> x) { return f_direct(true, x[0], x[1]); }, 2, J, 5);
  CHECK(l2_norm(riesz(f, 0)) <= 3 * eps * l2_norm(ft));
}

TEST_CASE("diagonal truncation and sampling") {
  const SquareCollection c = half();
  const double full = gram_norm2(c, Variant::plain, SampleMode{});
  const double diag = gram_norm2(c, Variant::plain, SampleMode{}, true);
  CHECK(diag == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(full - diag) < 0.5 * diag);

  const SampleMode s{false, 64, 11};
  CHECK(bessel_lower_bound(c, s) == doctest::Approx(bessel_lower_bound(c, SampleMode{})).epsilon(0.2));
  CHECK(gram_norm2(c, Variant::plain, s) == doctest::Approx(full).epsilon(0.2));
  // deterministic under a fixed seed
  CHECK(gram_norm2(c, Variant::tilde, s) == gram_norm2(c, Variant::tilde, s));
}

TEST_CASE("p >= 2 construction scales") {
  const auto rows = sharpness_experiment_pge2({DyadicEps{1}, DyadicEps{2}, DyadicEps{3}}, 0.1, {false, 2000, 7});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mode == "exact");
  CHECK(rows[1].mode == "sampled");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].growth >= std::pow(2.0, 0.1) * 0.7);
  for (const auto& r : rows) {
    const double eps = DyadicEps::parse(r.epsilon).value();
    CHECK(r.lower_P * r.lower_P / eps > 0.02);
    CHECK(r.lower_P * r.lower_P / eps < 0.2);
  }
}

TEST_CASE("single block p < 2") {
  const auto rows = single_block_experiment_ple2({DyadicEps{1}, DyadicEps{2}, DyadicEps{3}}, 1.5, 0.1);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    const double eps = DyadicEps::parse(r.epsilon).value();
    CHECK(r.norm_f <= 2 * std::pow(eps, 1 / 1.5));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].growth >= std::pow(2.0, 0.1) * 0.7);
  CHECK(rows[0].size == 7);
}
