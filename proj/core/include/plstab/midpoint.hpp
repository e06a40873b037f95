#pragma once

#include <optional>
#include <vector>

#include "plstab/density.hpp"

namespace plstab {

// Upper boundary of the hypograph {(x, y) : y <= ln h(x)} as a vertex chain,
// with the tails as unbounded terminal edges.
struct HypographPolygon {
  std::vector<HullPoint> vertices;
  std::optional<double> left_tail_slope;
  std::optional<double> right_tail_slope;

  LogConcaveFunction to_function() const;
};

HypographPolygon hypograph(const PiecewiseLogLinear& h);

// sup over the hypograph of u1 x + u2 y for u2 > 0; +inf when a tail escapes
// in that direction.
double support_function(const HypographPolygon& c, double u1, double u2);

struct PLTriple {
  LogConcaveFunction m;
  LogConcaveDensity f;
  LogConcaveDensity g;
  double alpha = 0.5;
};

// sup { f(r)^alpha g(s)^(1-alpha) : t = alpha r + (1-alpha) s }, computed as
// the Minkowski sum alpha C_f + (1-alpha) C_g of the hypograph chains.
LogConcaveFunction sup_convolution(const PiecewiseLogLinear& f, const PiecewiseLogLinear& g,
                                   double alpha = 0.5);

// m >= sup_convolution(f, g, alpha) everywhere: checked at the vertices of
// the sum and on the tail slopes.
bool dominates_midpoint(const PiecewiseLogLinear& m, const PiecewiseLogLinear& f,
                        const PiecewiseLogLinear& g, double alpha = 0.5);

// mass(m) / (mass(f)^alpha mass(g)^beta) - 1, clamped to 0 on [-1e-12, 0).
// Throws DominationViolated.
double pl_epsilon(const PLTriple& t);

// h(R(x)) = sqrt(f(x) g(T(x))) with R(x) = (x + T(x)) / 2, sampled at a
// mass spacing of at most 1e-3 and interpolated log-linearly. h need not be
// log-concave, so the result is only a PiecewiseLogLinear.
PiecewiseLogLinear midpoint_density(const LogConcaveDensity& f, const LogConcaveDensity& g);

}  // namespace plstab
