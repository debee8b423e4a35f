#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hrl/dyadic.hpp"

namespace hrl {

using VectorField = std::vector<GridFunction>;

void require_vector_field(const VectorField& v);

struct Integrand {
  std::string name;
  int n = 2;
  std::function<double(std::span<const double>)> f;
  double growth_p = 2.0;
  double growth_C = 1.0;
};

/// ab, |a|+|b|, a^2+b^2+ab, max(a,0)max(b,0); for n = 3 the mixed terms run
/// over all pairs.
std::vector<Integrand> integrand_registry(int n);
const Integrand& find_integrand(const std::vector<Integrand>& reg, const std::string& name);

/// Most negative 1D second difference over the lattice [-3,3]^n, step 0.1.
double separate_convexity_margin(const Integrand& f);
/// Throws std::invalid_argument if the margin is below -1e-9.
void validate_separately_convex(const Integrand& f);

/// n x n field, entry (i,j) at position i*n + j, equal to d_i v_j off the
/// diagonal and 0 on it.
std::vector<GridFunction> a0_apply(const VectorField& v);
double a0_max_abs(const VectorField& v);

/// Pointwise L^p norm of |v| (Euclidean in the components).
double vector_lp_norm(const VectorField& v, double p);

/// |Q|^-1 int_Q f(a + c h multi-block) - f(a) for the cube Q with h_Q^(e_i)
/// in component i.
double jensen_base_defect(const Integrand& f, std::span<const double> a, std::span<const double> c);

/// min over level-M cells of E_M(f(P v)) - f(E_M(P v)).
double jensen_range_check(const VectorField& v, const Integrand& f, int M);

/// ||v - P v||_p / (||v||_p^(1/2) (sum_i sum_{j != i} ||R_i v_j||_p)^(1/2)), 0/0 -> 0.
double residual_ratio(const VectorField& v, double p);

struct SequenceSpec {
  std::string name;
  std::function<VectorField(int r, int J)> generate;
};

/// v_r = (sin 2 pi r x_1, .., sin 2 pi r x_n): each component a function of
/// its own variable.
SequenceSpec compliant_sequence(int n);
/// v_r = (sin 2 pi r x_1, .., sin 2 pi r x_1).
SequenceSpec contrast_sequence(int n);

struct SemicontinuityRow {
  std::string experiment;
  std::string f_name;
  int r = 0;
  double I_r = 0.0;
  double I_limit = 0.0;
  bool compliant = false;
};

/// I_r = sum over cells of f(v_r) phi 2^-nJ; I_limit = int f(v) phi with v the
/// level-M cell means of the last v_r. Requires 1 <= r <= 2^(J-3).
std::vector<SemicontinuityRow> semicontinuity_experiment(const Integrand& f, const FieldFn& phi,
                                                        const SequenceSpec& seq, const std::vector<int>& rs, int J,
                                                        int M = 0);

}  // namespace hrl
