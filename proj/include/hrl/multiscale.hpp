#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hrl/dyadic.hpp"
#include "hrl/haar.hpp"

namespace hrl {

using FieldMap = std::function<GridFunction(const GridFunction&)>;

/// Linear map on GridFunctions of shape (n, J) together with its adjoint.
/// If restrict is set, the operator acts on its range only (restrict must be
/// an orthogonal projection).
struct LinearFieldOp {
  std::string name;
  int n = 2;
  int J = 0;
  FieldMap apply;
  FieldMap adjoint;
  FieldMap restrict;
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  double last_change = 0.0;
};

/// Power iteration on A*A. The Rayleigh values ||A x_k|| / ||x_k|| are
/// nondecreasing; converged is false if the last relative change exceeds tol.
NormEstimate op_norm2_estimate(const LinearFieldOp& op, int iters, std::uint64_t seed, double tol = 1e-4);

// Relative linearity defect of op on a random pair.
double linearity_defect(const LinearFieldOp& op, std::uint64_t seed);

// ------------------------------------------------------------------ T_ell

struct LevelRange {
  int jmin = 1;
  int jmax = 1;
};

// Throws listing every (j, ell) pair whose scale j + ell is not resolvable.
void check_t_ell_range(int J, int ell, LevelRange levels);

/// T_ell(u) = -sum_j Pi_j (Delta_{j+ell} u), Pi_j keeping the level-j,
/// direction-e Haar coefficients.
GridFunction t_ell(const GridFunction& u, Direction e, int ell, LevelRange levels);
GridFunction t_ell_adjoint(const GridFunction& u, Direction e, int ell, LevelRange levels);
LinearFieldOp t_ell_op(int n, int J, Direction e, int ell, LevelRange levels);

/// T_ell composed with the inverse of R_{i0}, acting on fields with no
/// spectral mass on k_{i0} in {0, N/2}.
LinearFieldOp t_ell_riesz_inverse_op(int n, int J, Direction e, int i0, int ell, LevelRange levels);

// Projection onto fields with no spectral mass on k_{i0} in {0, N/2}.
GridFunction riesz_admissible_part(const GridFunction& u, int i0);

using FieldFamily = std::function<GridFunction(int trial)>;

/// max over trials of ||T_ell w||_p / ||R_{i0} w||_p.
double t_ell_riesz_ratio(Direction e, int i0, int ell, double p, LevelRange levels, const FieldFamily& family,
                         int trials);

// ------------------------------------------------------------- ring covers

struct RingCover {
  DyadicCube q;
  std::vector<DyadicCube> cells;
  bool degenerate = false;
  // Measure of the cover divided by 2^-lambda |Q|.
  double measure_constant = 0.0;
};

/// Level-(j+lambda) cells at distance < C 2^-lambda diam(Q) from the
/// discontinuity set of h_Q^(e) on the torus. Requires j + lambda <= J - 1.
RingCover ring_cover(const DyadicCube& q, Direction e, int lambda, double C, int J);

struct RingFamily {
  Direction e;
  int lambda;
  double C;
  int J;
  std::vector<RingCover> covers;
};

/// Builds covers and validates disjointness and the nesting conditions.
/// Throws naming the offending pair (Q, Q').
RingFamily build_ring_family(const std::vector<DyadicCube>& cubes, Direction e, int lambda, double C, int J);

/// Sparse nested family: at level j in [j0, j1], cubes whose coordinates are
/// multiples of 2^(j - j0 + 1).
std::vector<DyadicCube> default_sparse_family(int n, int j0, int j1);

GridFunction ring_projection(const GridFunction& u, const RingFamily& family);
GridFunction ring_projection_adjoint(const GridFunction& v, const RingFamily& family);
LinearFieldOp ring_projection_op(const RingFamily& family);

// ---------------------------------------------------------- rearrangement

/// Separable zero-mean profile on [0, 1]: integral(a, b) = int_a^b phi.
struct RearrangementProfile {
  std::string name;
  std::function<double(double, double)> integral;
};

RearrangementProfile sine_profile();

struct RearrangementSpec {
  int n = 2;
  int J = 0;
  Direction e{2, 1};
  int lambda = 0;
  // Levels of the predecessors W = tau(Q); Q runs over levels + lambda.
  int wmin = 0;
  int wmax = 0;
  RearrangementProfile profile = sine_profile();
};

/// S(u) = sum_Q <u, phi_{tau(Q)}^{(k)}> h_Q^(e) / |Q| with phi anchored at Q's
/// corner and of side side(tau(Q)).
GridFunction rearrangement_op(const GridFunction& u, const RearrangementSpec& spec);
GridFunction rearrangement_adjoint(const GridFunction& v, const RearrangementSpec& spec);
LinearFieldOp rearrangement_linear_op(const RearrangementSpec& spec);

}  // namespace hrl
