#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "plstab/piecewise.hpp"

namespace plstab {

// Piecewise log-linear function with concave logarithm.
class LogConcaveFunction : public PiecewiseLogLinear {
 public:
  LogConcaveFunction(std::vector<double> knots, std::vector<double> logvals,
                     std::optional<double> left_tail_slope = std::nullopt,
                     std::optional<double> right_tail_slope = std::nullopt);
  explicit LogConcaveFunction(PiecewiseLogLinear shape);

  // Chord slopes followed by the tails, in decreasing order.
  std::vector<double> chord_slopes() const;
};

inline constexpr double kNormalizationTol = 1e-9;

// A LogConcaveFunction with unit mass.
class LogConcaveDensity : public LogConcaveFunction {
 public:
  // Throws NotNormalized when |mass - 1| > 1e-9.
  explicit LogConcaveDensity(LogConcaveFunction fn);

  // Shifts the logvals by -ln(mass).
  static LogConcaveDensity normalize(const LogConcaveFunction& fn);

  double pdf(double x) const noexcept { return value(x); }
  double cdf(double x) const noexcept { return lower_mass(x); }
  double sf(double x) const noexcept { return upper_mass(x); }
  double quantile(double p) const;
  // x with sf(x) = q; accurate for small q.
  double quantile_upper(double q) const;
};

// Validated construction. With normalize = false the input must already have
// unit mass within 1e-9.
LogConcaveFunction build_function(std::vector<double> knots, std::vector<double> logvals,
                                  std::optional<double> left_tail_slope = std::nullopt,
                                  std::optional<double> right_tail_slope = std::nullopt);
LogConcaveDensity build_density(std::vector<double> knots, std::vector<double> logvals,
                                std::optional<double> left_tail_slope,
                                std::optional<double> right_tail_slope, bool normalize);

struct DensityStats {
  double mean;
  double median;
  double median_height;
  double total_mass;
  double second_moment;
};

DensityStats stats(const LogConcaveDensity& d);

// Density of s X + t for X ~ d.
LogConcaveDensity affine_image(const LogConcaveDensity& d, double scale, double shift);

// int |h1 - h2|, exact: ln h1 - ln h2 is affine on every cell of the merged
// knot partition, so each cell has at most one sign change.
double l1_distance(const PiecewiseLogLinear& h1, const PiecewiseLogLinear& h2);

struct HullPoint {
  double x;
  double log_value;
};

// Upper concave envelope of the points in the (x, ln h) plane, continued by
// the given tails.
LogConcaveFunction log_concave_hull(std::span<const HullPoint> points,
                                    std::optional<double> left_tail_slope = std::nullopt,
                                    std::optional<double> right_tail_slope = std::nullopt);

// Deterministic test instance with n_pieces interior pieces. Knots come from
// positive gaps, chord slopes are drawn and sorted strictly decreasing, and each
// tail is present with probability 1/2.
LogConcaveDensity random_density(std::uint64_t seed, int n_pieces);

// Uniform [0,1) stream: mt19937_64 with a fixed 53-bit mapping, so draws do
// not depend on the standard library's distribution implementation.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool coin() { return uniform() < 0.5; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace plstab
