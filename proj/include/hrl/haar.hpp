#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hrl/dyadic.hpp"

namespace hrl {

/// Normalized Haar coefficients c_Q^(e) = <u, h_Q^(e)> / |Q| for every cube
/// of level 0 .. J-1 and every direction, plus the global mean. A unit Haar
/// block has coefficient 1.
class HaarCoefficients {
 public:
  HaarCoefficients(int n, int J);

  int dim() const { return n_; }
  int level() const { return J_; }

  double mean() const { return mean_; }
  void set_mean(double m) { mean_ = m; }

  // Coefficients of all level-j cubes for one direction, indexed by cube index.
  std::span<double> band(int j, Direction e);
  std::span<const double> band(int j, Direction e) const;

  double coefficient(const DyadicCube& q, Direction e) const;
  void set_coefficient(const DyadicCube& q, Direction e, double value);

  // Rows "level,k1..kn,eps_bits,value" for every nonzero coefficient, plus a
  // "mean" row. Zero coefficients are skipped unless include_zero is set.
  void write_csv(std::ostream& os, bool include_zero = false) const;

 private:
  std::size_t band_offset(int j, Direction e) const;

  int n_;
  int J_;
  double mean_ = 0.0;
  std::vector<std::vector<double>> levels_;
};

HaarCoefficients haar_analyze(const GridFunction& u);
GridFunction haar_synthesize(const HaarCoefficients& c);

// Haar function h_Q^(e) sampled on the level-J grid (exact when level(Q) < J).
GridFunction haar_function(const DyadicCube& q, Direction e, int J);

/// Orthogonal projection onto span{h_Q^(e)}, optionally restricted to cube
/// levels [jmin, jmax].
GridFunction directional_project(const GridFunction& u, Direction e);
GridFunction directional_project(const GridFunction& u, Direction e, int jmin, int jmax);

/// Component j of the result is P^(e_j)(v_j).
std::vector<GridFunction> vector_project(std::span<const GridFunction> v);

GridFunction conditional_expectation(const GridFunction& u, int M);

GridFunction square_function(const GridFunction& u);

/// sqrt(mean^2 + max_Q |Q|^-1 sum_{W in Q} <u,h_W>^2 / |W|).
double bmo_d_norm(const GridFunction& u);

}  // namespace hrl
