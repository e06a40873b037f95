#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "plstab/density.hpp"

namespace plstab {

inline constexpr double kDefaultTol = 1e-10;

// A cell of the monotone coupling. On cumulative masses (p_lo, p_hi) the
// source lies in a single piece of f and the image in a single piece of g,
// so both densities are exp-linear there and T is smooth.
struct CouplingCell {
  double p_lo;
  double p_hi;
  double x_lo;
  double x_hi;
  double y_lo;
  double y_hi;
  std::size_t f_piece;
  std::size_t g_piece;
};

// Monotone map T with int_{-inf}^x f = int_{-inf}^{T(x)} g, its inverse S and
// derivative T' = f / g(T). Lower tails are matched through cdf and upper
// tails through sf, so T stays accurate far into either tail.
class TransportMap {
 public:
  TransportMap(LogConcaveDensity source, LogConcaveDensity target);

  const LogConcaveDensity& source() const noexcept { return f_; }
  const LogConcaveDensity& target() const noexcept { return g_; }

  double map(double x) const noexcept;
  double inverse(double y) const noexcept;
  // Right-hand value at the measure-zero set where f or g jumps.
  double derivative(double x) const noexcept;

  std::span<const CouplingCell> cells() const noexcept { return cells_; }

 private:
  LogConcaveDensity f_;
  LogConcaveDensity g_;
  std::vector<CouplingCell> cells_;
};

TransportMap transport_map(const LogConcaveDensity& f, const LogConcaveDensity& g);

struct CouplingIntegral {
  double value = 0.0;
  double error = 0.0;  // quadrature estimate plus certified tail remainder
};

// int f(x) (T(x) - x)^2 dx over [x_from, x_to]. Cells whose image is an
// unbounded tail of g are integrated in the target variable, where the
// integrand g(y) (y - S(y))^2 stays bounded; doubly unbounded tail cells are
// summed in closed form because T is affine there.
CouplingIntegral integrate_cost(const TransportMap& map, double x_from, double x_to, double tol);

// int f(x) D(T'(x)) dx with D = deficit_integrand(., 1/2).
CouplingIntegral integrate_deficit(const TransportMap& map, double tol);

// Throw ToleranceNotReached when the error budget is exceeded.
double quadratic_cost(const LogConcaveDensity& f, const LogConcaveDensity& g,
                      double tol = kDefaultTol);
double pl_deficit_integral(const LogConcaveDensity& f, const LogConcaveDensity& g,
                           double tol = kDefaultTol);

// (alpha + beta t) / t^beta - 1 with beta = 1 - alpha; for alpha = 1/2 this is
// (1 - sqrt t)^2 / (2 sqrt t). Nonnegative, zero only at t = 1.
double deficit_integrand(double tprime, double alpha = 0.5);

// int_{Q_f(delta)}^{Q_f(1-delta)} f (T' - 1)^2 dx. Diverges as delta -> 0 when
// T' blows up at a jump of f facing a tail of g.
double derivative_energy(const TransportMap& map, double delta, double tol = 1e-9);

struct DivergenceProbe {
  std::vector<double> deltas;
  std::vector<double> estimates;
  bool divergent = false;
};

// Three successive halvings of delta, each growing the estimate by more than
// 1.5x, flag divergence.
DivergenceProbe probe_derivative_energy(const TransportMap& map, double delta0 = 1e-3,
                                        int refinements = 3);

struct Alignment {
  double a;
  double b;
  double residual;  // int |f(t) - a m(t + b)| dt
};

// Grid search around a0 = mass(f)/mass(m), b0 = mean(m) - mean(f), then
// coordinate-wise golden-section refinement. Returns a local optimum.
Alignment align(const PiecewiseLogLinear& f, const LogConcaveFunction& m);

// int |f(t) - a m(t + b)| dt, exact.
double alignment_residual(const PiecewiseLogLinear& f, const LogConcaveFunction& m, double a,
                          double b);

}  // namespace plstab
