#pragma once

#include <span>
#include <string>
#include <vector>

#include "plstab/density.hpp"
#include "plstab/midpoint.hpp"
#include "plstab/transport.hpp"

namespace plstab {

inline constexpr double kMarginTol = 1e-9;

struct InequalityMargin {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool pass = true;
};

// Fills margin and pass from lhs <= rhs.
InequalityMargin make_margin(std::string label, double lhs, double rhs);

// min(cdf(x), sf(x))
double tail_mass(const LogConcaveDensity& d, double x);

// Median-height estimates at each sample point: the mean bound, the local
// two-sided exponential bounds, the global height bound, tail mass and tail
// moment bounds, and their tail-mass-based refinements. Checks whose window or
// tail condition fails at a point are skipped.
std::vector<InequalityMargin> check_hw(const LogConcaveDensity& d, std::span<const double> xs);

// Either a polynomial (monomial coefficients, degree <= 4) or a continuous
// piecewise linear function, constant outside its knots.
class TestFunction {
 public:
  static TestFunction polynomial(std::vector<double> coeffs);
  static TestFunction piecewise_linear(std::vector<double> xs, std::vector<double> ys);

  bool is_polynomial() const noexcept { return xs_.empty(); }
  double operator()(double x) const;

  std::size_t degree() const noexcept;

  // Polynomial pieces covering the whole line.
  struct Segment {
    double lo;
    double hi;
    std::vector<double> poly;
  };
  std::vector<Segment> segments() const;

 private:
  std::vector<double> coeffs_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

// margin = h(w)^{-2} int h R'^2 - Var_h(R). Throws NonintegrableTestFunction.
InequalityMargin bobkov_gap(const LogConcaveDensity& h, const TestFunction& r);

enum class LocalizedBranch { OneSidedTail, BothTails };

struct LocalizedCostReport {
  LocalizedBranch branch;
  double z;
  double nu;
  double delta;
  double localized_cost;
  double scale;
  double ratio;
};

// Cost of the coupling near z against nu^3 / f(z)^2 (times
// min(|ln g(z)/f(z)|, 3)^4 when both tails of g at z hold at least nu/2).
// Throws DegenerateAtZ, HypothesisNotMet.
LocalizedCostReport localized_cost(const LogConcaveDensity& f, const LogConcaveDensity& g,
                                   double z, double tol = 1e-13);

// Both densities are recentered to zero mean; lhs is the quadratic cost and
// rhs = 2^20 f(w_f)^{-2} eps (ln eps)^2 with eps the deficit integral.
// Throws EpsilonOutOfRange for eps >= 1/48.
InequalityMargin transdist_check(const LogConcaveDensity& f, const LogConcaveDensity& g,
                                 double tol = kDefaultTol);

inline constexpr double kDefaultL1Constant = 64.0;

struct L1BoundReport {
  InequalityMargin margin;  // lhs = l1, rhs = constant * shape
  double eps_cost = 0.0;    // quadratic_cost * f(w_f)^2
  double shape = 0.0;       // eps^{1/3} |ln eps|^{2/3}
  double ratio = 0.0;       // l1 / shape
  double constant = kDefaultL1Constant;
  bool exact_match = false;  // zero cost: f and g coincide
};

L1BoundReport l1_bound_check(const LogConcaveDensity& f, const LogConcaveDensity& g,
                             double constant = kDefaultL1Constant, double tol = kDefaultTol);

inline constexpr double kDefaultCertifyConstant = 10.0;

struct StabilityCertificate {
  std::string kind;  // "exact" or "bound"
  double epsilon = 0.0;
  Alignment alignment_f{1.0, 0.0, 0.0};  // int |f(t) - a m(t + b)|
  Alignment alignment_g{1.0, 0.0, 0.0};  // int |g(t) - m(t - b) / a|
  double bound_shape = 0.0;               // eps^{1/3} |ln eps|^{4/3}
  double ratio_f = 0.0;                   // residual_f / (shape a mass(m))
  double ratio_g = 0.0;                   // residual_g / (shape mass(m) / a)
  double constant_used = kDefaultCertifyConstant;
  bool pass = true;
};

// Throws DominationViolated, ZeroMass.
StabilityCertificate certify(const PLTriple& t, double constant = kDefaultCertifyConstant);

}  // namespace plstab
