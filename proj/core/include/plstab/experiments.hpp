#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plstab/midpoint.hpp"
#include "plstab/stability.hpp"
#include "plstab/transport.hpp"

namespace plstab {

enum class ExampleKind { Exa2, Exa3 };

ExampleKind parse_example_kind(std::string_view name);
std::string_view to_string(ExampleKind kind);

LogConcaveDensity laplace_density();
LogConcaveDensity uniform_density(double lo, double hi);

// exa2: m = (1+eps) f, g the density of f contracted by 1/(1+eps); f is an
// even base density (Laplace by default).
// exa3: f uniform on [-1/2, 1/2], g flat on |x| <= 1/2 - eps with tails of
// slope -+1/eps, and m their midpoint sup-convolution (mass 1 + eps).
// Throws EpsOutOfRange unless eps in (0, 1/2), BaseNotEven.
PLTriple make_example(ExampleKind kind, double eps,
                      const std::optional<LogConcaveDensity>& base = std::nullopt);

struct SweepRow {
  double eps;
  double pl_epsilon;
  double deficit_integral;
  double quadratic_cost;
  double l1;
  double bound_ratio;  // l1 / (eps_c^{1/3} |ln eps_c|^{2/3}), eps_c = cost f(w_f)^2
};

inline constexpr const char* kSweepHeader =
    "eps,pl_epsilon,deficit_integral,quadratic_cost,l1,bound_ratio";

struct ExponentFit {
  std::string column;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of ln y against ln x. Needs >= 2 points with positive values.
ExponentFit fit_exponent(std::string column, const std::vector<double>& x,
                         const std::vector<double>& y);

struct SweepResult {
  ExampleKind kind;
  std::vector<SweepRow> rows;
  std::vector<ExponentFit> fits;
  // Growth test on int f (T' - 1)^2 over shrinking central ranges, per row.
  std::vector<DivergenceProbe> divergence;
};

// Grid needs at least 3 distinct values in (0, 1/2).
SweepResult sweep(ExampleKind kind, const std::vector<double>& eps_grid, double tol = kDefaultTol,
                  const std::optional<LogConcaveDensity>& base = std::nullopt);

std::string sweep_csv(const SweepResult& r);

struct SuiteReport {
  std::string name;
  int trials = 0;
  int checks = 0;
  int failures = 0;
  double worst_margin = kInf;
  std::string worst_label;
  int worst_trial = -1;

  bool passed() const noexcept { return failures == 0; }
};

// prop21 | prop22 | cor23 | bobkov | pl | hull | transport | transdist.
// Deterministic in seed. Throws UnknownSuite.
SuiteReport run_suite(std::string_view name, int trials, std::uint64_t seed);

const std::vector<std::string>& suite_names();

// Zero-mean pairs (f, g) with g a small sup-convolution perturbation of f,
// kept only when the deficit integral lies in (0, 1/48).
struct DensityPair {
  LogConcaveDensity f;
  LogConcaveDensity g;
};
std::vector<DensityPair> transdist_pairs(int count, std::uint64_t seed);

}  // namespace plstab
