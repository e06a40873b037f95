#include "plstab/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plstab/error.hpp"
#include "plstab/numerics.hpp"

namespace plstab {

namespace {

constexpr double kConcavityTol = 1e-9;

bool slopes_decrease(double before, double after) {
  const double scale = std::max({1.0, std::abs(before), std::abs(after)});
  return after <= before + kConcavityTol * scale;
}

void check_concave(const PiecewiseLogLinear& h) {
  const auto pieces = h.pieces();
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    if (!slopes_decrease(pieces[k - 1].slope, pieces[k].slope))
      throw Error(ErrorKind::ConcavityViolated,
                  "slope " + std::to_string(pieces[k].slope) + " after " +
                      std::to_string(pieces[k - 1].slope) + " at x = " +
                      std::to_string(pieces[k].lo));
  }
}

double piece_integral(const Piece& p, double u, double v) {
  if (!(v > u)) return 0.0;
  if (u == -kInf) return std::exp(p.log_at(v)) / p.slope;
  if (v == kInf) return std::exp(p.log_at(u)) / -p.slope;
  return numerics::exp_linear_integral(p.log_at(u), p.slope, v - u);
}

}  // namespace

LogConcaveFunction::LogConcaveFunction(std::vector<double> knots, std::vector<double> logvals,
                                       std::optional<double> left_tail_slope,
                                       std::optional<double> right_tail_slope)
    : PiecewiseLogLinear(std::move(knots), std::move(logvals), left_tail_slope, right_tail_slope) {
  check_concave(*this);
}

LogConcaveFunction::LogConcaveFunction(PiecewiseLogLinear shape)
    : PiecewiseLogLinear(std::move(shape)) {
  check_concave(*this);
}

std::vector<double> LogConcaveFunction::chord_slopes() const {
  std::vector<double> out;
  for (const auto& p : pieces()) out.push_back(p.slope);
  return out;
}

LogConcaveDensity::LogConcaveDensity(LogConcaveFunction fn) : LogConcaveFunction(std::move(fn)) {
  if (std::abs(mass() - 1.0) > kNormalizationTol)
    throw Error(ErrorKind::NotNormalized, "mass " + std::to_string(mass()));
}

LogConcaveDensity LogConcaveDensity::normalize(const LogConcaveFunction& fn) {
  return LogConcaveDensity(LogConcaveFunction(fn.scaled(-std::log(fn.mass()))));
}

double LogConcaveDensity::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorKind::QuantileOutOfRange, "p = " + std::to_string(p));
  return p <= 0.5 ? lower_inverse(p) : upper_inverse(1.0 - p);
}

double LogConcaveDensity::quantile_upper(double q) const {
  if (!(q > 0.0 && q < 1.0))
    throw Error(ErrorKind::QuantileOutOfRange, "q = " + std::to_string(q));
  return q <= 0.5 ? upper_inverse(q) : lower_inverse(1.0 - q);
}

LogConcaveFunction build_function(std::vector<double> knots, std::vector<double> logvals,
                                  std::optional<double> left_tail_slope,
                                  std::optional<double> right_tail_slope) {
  return LogConcaveFunction(std::move(knots), std::move(logvals), left_tail_slope,
                            right_tail_slope);
}

LogConcaveDensity build_density(std::vector<double> knots, std::vector<double> logvals,
                                std::optional<double> left_tail_slope,
                                std::optional<double> right_tail_slope, bool normalize) {
  LogConcaveFunction fn(std::move(knots), std::move(logvals), left_tail_slope, right_tail_slope);
  if (normalize) return LogConcaveDensity::normalize(fn);
  return LogConcaveDensity(std::move(fn));
}

DensityStats stats(const LogConcaveDensity& d) {
  const double first[] = {0.0, 1.0};
  const double second[] = {0.0, 0.0, 1.0};
  const double median = d.quantile(0.5);
  return DensityStats{
      .mean = d.integrate_poly(first),
      .median = median,
      .median_height = d.pdf(median),
      .total_mass = d.mass(),
      .second_moment = d.integrate_poly(second),
  };
}

LogConcaveDensity affine_image(const LogConcaveDensity& d, double scale, double shift) {
  if (!(scale > 0.0)) throw Error(ErrorKind::NonpositiveScale, "scale = " + std::to_string(scale));
  return LogConcaveDensity(
      LogConcaveFunction(d.composed_affine(scale, shift).scaled(-std::log(scale))));
}

double l1_distance(const PiecewiseLogLinear& h1, const PiecewiseLogLinear& h2) {
  std::vector<double> cuts;
  cuts.push_back(-kInf);
  cuts.insert(cuts.end(), h1.knots().begin(), h1.knots().end());
  cuts.insert(cuts.end(), h2.knots().begin(), h2.knots().end());
  cuts.push_back(kInf);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double u = cuts[c];
    const double v = cuts[c + 1];
    const double probe = (u == -kInf) ? v - 1.0 : (v == kInf) ? u + 1.0 : 0.5 * (u + v);
    const auto k1 = h1.piece_index(probe);
    const auto k2 = h2.piece_index(probe);
    if (!k1 && !k2) continue;
    if (!k1 || !k2) {
      const Piece& p = k1 ? h1.pieces()[*k1] : h2.pieces()[*k2];
      total += piece_integral(p, u, v);
      continue;
    }
    const Piece& p1 = h1.pieces()[*k1];
    const Piece& p2 = h2.pieces()[*k2];
    // ln h1 - ln h2 = a + b x on the cell
    const double b = p1.slope - p2.slope;
    const double a = (p1.anchor_log - p1.slope * p1.anchor) - (p2.anchor_log - p2.slope * p2.anchor);
    std::vector<double> bounds{u};
    if (b != 0.0) {
      const double root = -a / b;
      if (root > u && root < v) bounds.push_back(root);
    }
    bounds.push_back(v);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s)
      total += std::abs(piece_integral(p1, bounds[s], bounds[s + 1]) -
                        piece_integral(p2, bounds[s], bounds[s + 1]));
  }
  return total;
}

LogConcaveFunction log_concave_hull(std::span<const HullPoint> points,
                                    std::optional<double> left_tail_slope,
                                    std::optional<double> right_tail_slope) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "hull of no points");
  std::vector<HullPoint> sorted(points.begin(), points.end());
  for (const auto& p : sorted)
    if (!std::isfinite(p.x) || !std::isfinite(p.log_value))
      throw Error(ErrorKind::NonfiniteValue, "hull point");
  std::sort(sorted.begin(), sorted.end(), [](const HullPoint& a, const HullPoint& b) {
    return a.x < b.x || (a.x == b.x && a.log_value > b.log_value);
  });
  std::vector<HullPoint> chain;
  for (const auto& p : sorted) {
    if (!chain.empty() && chain.back().x == p.x) continue;
    while (chain.size() >= 2) {
      const auto& a = chain[chain.size() - 2];
      const auto& b = chain.back();
      const double cross =
          (b.x - a.x) * (p.log_value - a.log_value) - (b.log_value - a.log_value) * (p.x - a.x);
      if (cross < 0.0) break;
      chain.pop_back();
    }
    chain.push_back(p);
  }
  auto chord = [&](std::size_t i) {
    return (chain[i + 1].log_value - chain[i].log_value) / (chain[i + 1].x - chain[i].x);
  };
  if (left_tail_slope)
    while (chain.size() >= 2 && chord(0) > *left_tail_slope) chain.erase(chain.begin());
  if (right_tail_slope)
    while (chain.size() >= 2 && chord(chain.size() - 2) < *right_tail_slope) chain.pop_back();

  std::vector<double> xs;
  std::vector<double> ls;
  for (const auto& p : chain) {
    xs.push_back(p.x);
    ls.push_back(p.log_value);
  }
  return LogConcaveFunction(std::move(xs), std::move(ls), left_tail_slope, right_tail_slope);
}

SeededStream::SeededStream(std::uint64_t seed) : engine_(seed) {}

double SeededStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

LogConcaveDensity random_density(std::uint64_t seed, int n_pieces) {
  if (n_pieces < 1) throw Error(ErrorKind::InvalidArgument, "n_pieces must be >= 1");
  SeededStream rng(seed);
  const auto n = static_cast<std::size_t>(n_pieces);
  std::vector<double> knots(n + 1);
  knots[0] = rng.uniform(-3.0, -0.5);
  for (std::size_t i = 1; i <= n; ++i) knots[i] = knots[i - 1] + rng.uniform(0.2, 1.5);

  std::vector<double> slopes(n);
  for (double& s : slopes) s = rng.uniform(-3.0, 3.0);
  std::sort(slopes.begin(), slopes.end(), std::greater<>());
  for (std::size_t i = 1; i < n; ++i)
    if (slopes[i] >= slopes[i - 1] - 1e-6) slopes[i] = slopes[i - 1] - 1e-6;

  std::vector<double> logvals(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    logvals[i + 1] = logvals[i] + slopes[i] * (knots[i + 1] - knots[i]);

  std::optional<double> left;
  std::optional<double> right;
  if (rng.coin()) left = std::max(slopes.front(), 0.0) + rng.uniform(0.3, 2.5);
  if (rng.coin()) right = std::min(slopes.back(), 0.0) - rng.uniform(0.3, 2.5);
  return build_density(std::move(knots), std::move(logvals), left, right, true);
}

}  // namespace plstab
