#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrl/dyadic.hpp"
#include "hrl/multiscale.hpp"

namespace hrl {

/// One row of the multiscale results table. For decay experiments slack is
/// measured / bound_model; for stability rows it is measured(J+1) / measured(J).
struct MultiscaleRow {
  std::string experiment;
  int n = 2;
  int J = 0;
  double p = 2.0;
  int ell_or_lambda = 0;
  std::string epsilon_bits;
  int i0 = 0;  // 1-based, 0 when unused
  int trials = 0;
  std::uint64_t seed = 0;
  double measured = 0.0;
  double bound_model = 0.0;
  double slack = 0.0;
};

struct TlDecayConfig {
  int n = 2;
  int J = 7;
  Direction e{2, 1};
  std::vector<int> ells;
  LevelRange levels{1, 5};
  int iters = 60;
  std::uint64_t seed = 0;
  int i0 = -1;  // >= 0: measure T_ell R_{i0}^{-1} instead of T_ell
};

/// Power-iteration norms m(ell). Model: m(0) 2^(-ell/2) for ell >= 1 and
/// m(-1) 2^(-(|ell|-1)/2) for ell <= -2; with i0 set the positive side grows
/// as 2^(+ell/2).
std::vector<MultiscaleRow> tl_decay(const TlDecayConfig& cfg);

struct RingDecayConfig {
  int n = 2;
  int J = 7;
  Direction e{2, 1};
  std::vector<int> lambdas{3, 4, 5};
  double C = 0.7071067811865476;
  int j0 = 0;
  int j1 = 1;
  int iters = 40;
  std::uint64_t seed = 0;
};

/// Model n(lambda_prev) 2^(-(lambda - lambda_prev)/2).
std::vector<MultiscaleRow> ring_decay(const RingDecayConfig& cfg);

struct RearrangeConfig {
  int n = 2;
  int J = 7;
  Direction e{2, 1};
  std::vector<int> lambdas{1, 2, 3};
  int wmin = 0;
  int wmax = 2;
  int iters = 40;
  std::uint64_t seed = 0;
};

/// Model n(lambda_prev) 2^(n (lambda - lambda_prev)).
std::vector<MultiscaleRow> rearrange_scaling(const RearrangeConfig& cfg);

struct InterpConfig {
  int n = 2;
  int J = 6;
  Direction e{2, 1};
  int i0 = 0;
  std::vector<double> ps{2.0, 3.0, 1.5};
  int trials = 20;
  std::uint64_t seed = 0;
};

/// ||P^(e) u||_p / (||u||_p^a ||R_{i0} u||_p^(1-a)), a = 1/2 for p >= 2 and
/// 1/p for p < 2.
double interp_ratio(const GridFunction& u, Direction e, int i0, double p);

/// Test families, each a J-independent function sampled at level J.
std::vector<std::string> interp_family_names(int n);
GridFunction interp_family_member(const std::string& family, int n, int J, Direction e, int i0, int trial,
                                  std::uint64_t seed);
int interp_family_size(const std::string& family, int trials);

/// One row per (p, family) plus an "all" row per p: measured is the sup at
/// J+1, bound_model the sup at J.
std::vector<MultiscaleRow> interp_ratio_experiment(const InterpConfig& cfg);

}  // namespace hrl
