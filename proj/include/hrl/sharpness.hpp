#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrl/dyadic.hpp"

namespace hrl {

/// Exact dyadic epsilon = 2^-n0, parsed from "1/8" style strings.
struct DyadicEps {
  int n0 = 1;
  double value() const;
  std::string str() const;
  static DyadicEps parse(const std::string& s);
};

// 1D profiles: A(y) = sin(2 pi y) on [0,1], B(t) = sin(pi t) on [-1,1],
// A~ = A' on [0,1], B~(t) = -(1 + cos(pi t)) / pi on [-1,1] (B~' = B,
// B~(+-1) = 0), plus the Haar function and indicator of [0,1].
enum class Profile { A, A_tilde, B, B_tilde, haar, indicator };

double profile_value(Profile p, double y);

/// Profile p placed at origin o with scale s: x -> p((x - o) / s).
struct Atom {
  Profile profile;
  double origin;
  double scale;
};

/// int atom1(x) atom2(x) dx in closed form (piecewise trigonometric).
double overlap(const Atom& a, const Atom& b);

enum class Variant { plain, tilde };

/// g_Q(x) = A((x1 - l_I)/|I|) B((x2 - l_J)/(eps |J|)) for Q = I x J; the tilde
/// variant uses A~, B~ so that R_1 g_Q = eps R_2 g~_Q.
struct BlockSpec {
  DyadicCube q;
  DyadicEps eps;
  Variant variant = Variant::plain;

  Atom x1() const;
  Atom x2() const;
  double value(double x1, double x2) const;
};

enum class InnerKind { vs_haar10, vs_block };

/// <g_{Q'}, h_Q^{(1,0)}> or <g_{Q'}, g_Q> (g_Q with the same eps and variant).
double block_inner_products(const BlockSpec& qprime, const DyadicCube& q, InnerKind kind);

/// Layers G_k, k = 1..2^n0: I at level 2 k n0, J at the same level with odd
/// index (0-based). Counts are kept as powers of two.
struct SquareCollection {
  DyadicEps eps;
  std::vector<int> levels;  // level of layer k at position k-1
  bool enumerable = false;

  int layers() const { return static_cast<int>(levels.size()); }
  // log2 |G_k| = 2 m_k - 1.
  int log2_count(int k) const { return 2 * levels[k - 1] - 1; }
  double total_count() const;
  // Sum of |Q| over one layer and over all of G.
  double layer_measure(int k) const;
  double total_measure() const;

  DyadicCube cube(int k, std::uint64_t i, std::uint64_t odd_rank) const;
  std::vector<DyadicCube> layer_cubes(int k) const;
};

/// Rejects with ResourceError when the square count exceeds cap unless
/// sampling is allowed.
SquareCollection build_collection(DyadicEps eps, double cap = 1e6, bool allow_sampling = false);

struct SampleMode {
  bool exact = true;
  int m = 0;
  std::uint64_t seed = 0;
};

/// <f_eps, h_Q^{(1,0)}> for Q in layer k: diagonal plus the coarser-layer
/// partners.
double collection_coefficient(const SquareCollection& c, int k, const DyadicCube& q);
/// <g_Q, g_Q> + 2 sum over coarser partners Q' of <g_Q, g_Q'>.
double gram_row(const SquareCollection& c, int k, const DyadicCube& q, Variant v, bool diagonal_only = false);

double bessel_lower_bound(const SquareCollection& c, SampleMode mode);
double gram_norm2(const SquareCollection& c, Variant v, SampleMode mode, bool diagonal_only = false);

/// Dense cell averages of f_eps (or f~_eps) on the level-J grid.
GridFunction dense_collection_field(const SquareCollection& c, int J, Variant v = Variant::plain, int quad = 5);
/// int f_eps^2 by per-cell Gauss quadrature of the square.
double dense_collection_energy(const SquareCollection& c, int J, Variant v = Variant::plain);

struct SharpnessRow {
  std::string epsilon;
  double p = 2.0;
  double eta = 0.0;
  double norm_f = 0.0;
  double norm_Rf = 0.0;
  double lower_P = 0.0;
  double ratio = 0.0;
  std::string mode;
  long long size = 0;  // dense J or sample size
  std::uint64_t seed = 0;
  double growth = 0.0;  // ratio / previous row's ratio (0 on the first row)
};

/// p = 2 runs: L = sqrt(Bessel), N = sqrt(Gram), R = eps sqrt(tilde Gram);
/// ratio = L / (N^(1/2-eta) R^(1/2+eta)).
std::vector<SharpnessRow> sharpness_experiment_pge2(const std::vector<DyadicEps>& eps, double eta, SampleMode mode,
                                                    double cap = 1e6);

/// Single block on Q = [0,1/2) x [1/2,1), dense grid J = n0 + 6, norms
/// rescaled by |Q|^(-1/p); ratio = ||Pg|| / (||g||^(1/p-eta) ||R_1 g||^(1/q+eta)).
std::vector<SharpnessRow> single_block_experiment_ple2(const std::vector<DyadicEps>& eps, double p, double eta,
                                                       int extra_levels = 6);

BlockSpec single_block(DyadicEps eps, Variant v = Variant::plain);

}  // namespace hrl
