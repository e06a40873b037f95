#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Closed-form building blocks for integrals of exp-linear functions.
namespace plstab::numerics {

inline constexpr double kSmallSlope = 1e-8;

// (e^u - 1) / u with the u -> 0 limit.
double expm1_ratio(double u) noexcept;

// ln(1 + v) / v with the v -> 0 limit; v > -1.
double log1p_ratio(double v) noexcept;

// Integral of e^{l(x)} over [u, v] where l is affine with value lu at u and
// slope s. The endpoint with the larger exponent is factored out so the result
// never overflows before it has to.
double exp_linear_integral(double lu, double s, double width) noexcept;

// J_k(lambda, L) = int_0^L t^k e^{-lambda t} dt for lambda >= 0, L in (0, inf].
// Returns J_0 .. J_kmax.
std::vector<double> decaying_moments(double lambda, double length, std::size_t kmax);

// Coefficients of q(t) = p(c + sign * t) given p in the monomial basis.
std::vector<double> taylor_shift(std::span<const double> p, double c, double sign);

// Horner evaluation.
double poly_eval(std::span<const double> p, double x) noexcept;
std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b);
std::vector<double> poly_derivative(std::span<const double> p);

}  // namespace plstab::numerics
