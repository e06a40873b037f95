#include "plstab/midpoint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plstab/error.hpp"
#include "plstab/transport.hpp"

namespace plstab {

namespace {

constexpr double kLogTol = 1e-12;

double edge_slope(const std::vector<HullPoint>& v, std::size_t i) {
  return (v[i + 1].log_value - v[i].log_value) / (v[i + 1].x - v[i].x);
}

// Index range [first, last] of vertices that survive when edges steeper than
// the binding tails are absorbed.
std::pair<std::size_t, std::size_t> active_range(const std::vector<HullPoint>& v,
                                                 std::optional<double> left,
                                                 std::optional<double> right) {
  std::size_t first = 0;
  std::size_t last = v.size() - 1;
  if (left)
    while (first < last && edge_slope(v, first) > *left) ++first;
  if (right)
    while (last > first && edge_slope(v, last - 1) < *right) --last;
  return {first, last};
}

std::optional<double> combine(std::optional<double> a, std::optional<double> b, bool left) {
  if (!a) return b;
  if (!b) return a;
  return left ? std::min(*a, *b) : std::max(*a, *b);
}

}  // namespace

LogConcaveFunction HypographPolygon::to_function() const {
  std::vector<double> xs;
  std::vector<double> ls;
  for (const auto& p : vertices) {
    xs.push_back(p.x);
    ls.push_back(p.log_value);
  }
  return LogConcaveFunction(std::move(xs), std::move(ls), left_tail_slope, right_tail_slope);
}

HypographPolygon hypograph(const PiecewiseLogLinear& h) {
  HypographPolygon c;
  for (std::size_t i = 0; i < h.knots().size(); ++i)
    c.vertices.push_back({h.knots()[i], h.logvals()[i]});
  c.left_tail_slope = h.left_tail_slope();
  c.right_tail_slope = h.right_tail_slope();
  return c;
}

double support_function(const HypographPolygon& c, double u1, double u2) {
  if (!(u2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "support direction needs u2 > 0");
  // Along a left tail x -> -inf the objective changes at rate -(u1 + u2 s).
  if (c.left_tail_slope && u1 + u2 * *c.left_tail_slope < 0.0) return kInf;
  if (c.right_tail_slope && u1 + u2 * *c.right_tail_slope > 0.0) return kInf;
  double best = -kInf;
  for (const auto& p : c.vertices) best = std::max(best, u1 * p.x + u2 * p.log_value);
  return best;
}

LogConcaveFunction sup_convolution(const PiecewiseLogLinear& f, const PiecewiseLogLinear& g,
                                   double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  const double beta = 1.0 - alpha;
  const auto cf = hypograph(f);
  const auto cg = hypograph(g);
  const auto left = combine(cf.left_tail_slope, cg.left_tail_slope, true);
  const auto right = combine(cf.right_tail_slope, cg.right_tail_slope, false);
  const auto [i0, i1] = active_range(cf.vertices, left, right);
  const auto [j0, j1] = active_range(cg.vertices, left, right);

  auto vertex = [&](std::size_t i, std::size_t j) {
    return HullPoint{alpha * cf.vertices[i].x + beta * cg.vertices[j].x,
                     alpha * cf.vertices[i].log_value + beta * cg.vertices[j].log_value};
  };
  std::vector<HullPoint> chain{vertex(i0, j0)};
  std::size_t i = i0;
  std::size_t j = j0;
  while (i < i1 || j < j1) {
    if (j == j1) {
      ++i;
    } else if (i == i1) {
      ++j;
    } else {
      const double sf = edge_slope(cf.vertices, i);
      const double sg = edge_slope(cg.vertices, j);
      if (sf > sg) {
        ++i;
      } else if (sg > sf) {
        ++j;
      } else {
        ++i;
        ++j;
      }
    }
    const HullPoint p = vertex(i, j);
    const double scale = std::max(1.0, std::abs(p.x));
    if (p.x - chain.back().x <= 1e-15 * scale) {
      chain.back().log_value = std::max(chain.back().log_value, p.log_value);
      continue;
    }
    chain.push_back(p);
  }
  HypographPolygon out{std::move(chain), left, right};
  return out.to_function();
}

bool dominates_midpoint(const PiecewiseLogLinear& m, const PiecewiseLogLinear& f,
                        const PiecewiseLogLinear& g, double alpha) {
  const auto s = sup_convolution(f, g, alpha);
  if (s.left_tail_slope()) {
    if (!m.left_tail_slope() || *m.left_tail_slope() > *s.left_tail_slope() + kLogTol)
      return false;
  }
  if (s.right_tail_slope()) {
    if (!m.right_tail_slope() || *m.right_tail_slope() < *s.right_tail_slope() - kLogTol)
      return false;
  }
  for (std::size_t k = 0; k < s.knots().size(); ++k) {
    double x = s.knots()[k];
    // a vertex that lands a rounding error outside m's support still counts
    const double slack = 1e-12 * std::max(1.0, std::abs(x));
    if (x < m.support_lo() && x >= m.support_lo() - slack) x = m.support_lo();
    if (x > m.support_hi() && x <= m.support_hi() + slack) x = m.support_hi();
    if (m.log_value(x) < s.logvals()[k] - kLogTol) return false;
  }
  return true;
}

double pl_epsilon(const PLTriple& t) {
  if (!dominates_midpoint(t.m, t.f, t.g, t.alpha))
    throw Error(ErrorKind::DominationViolated, "m does not dominate the sup-convolution");
  const double beta = 1.0 - t.alpha;
  const double eps =
      std::exp(std::log(t.m.mass()) - t.alpha * std::log(t.f.mass()) - beta * std::log(t.g.mass())) -
      1.0;
  if (eps < 0.0 && eps >= -1e-12) return 0.0;
  return eps;
}

namespace {

struct MidPoint {
  double r;
  double log_h;
};

constexpr double kMassSpacing = 1e-3;

}  // namespace

PiecewiseLogLinear midpoint_density(const LogConcaveDensity& f, const LogConcaveDensity& g) {
  const TransportMap map(f, g);
  std::vector<MidPoint> pts;
  auto add = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    const double lh = 0.5 * (f.log_value(x) + g.log_value(y));
    if (!std::isfinite(lh)) return;
    pts.push_back({0.5 * (x + y), lh});
  };
  // Mass level p from below (or from above when from_above), matched exactly.
  auto add_level = [&](double p, bool from_above) {
    if (from_above)
      add(f.upper_inverse(p), g.upper_inverse(p));
    else
      add(f.lower_inverse(p), g.lower_inverse(p));
  };

  for (const auto& c : map.cells()) {
    add(c.x_lo, c.y_lo);
    add(c.x_hi, c.y_hi);
    const double width = c.p_hi - c.p_lo;
    const int n = static_cast<int>(std::ceil(width / kMassSpacing));
    for (int k = 1; k < n; ++k) {
      const double p = c.p_lo + width * k / n;
      if (p <= 0.5)
        add_level(p, false);
      else
        add_level(1.0 - p, true);
    }
  }
  const bool left_open = std::isinf(f.support_lo()) || std::isinf(g.support_lo());
  const bool right_open = std::isinf(f.support_hi()) || std::isinf(g.support_hi());
  for (double q = 1e-4; q >= 1e-14; q *= 1e-2) {
    if (left_open) add_level(q, false);
    if (right_open) add_level(q, true);
  }

  std::sort(pts.begin(), pts.end(), [](const MidPoint& a, const MidPoint& b) { return a.r < b.r; });
  std::vector<double> rs;
  std::vector<double> ls;
  for (const auto& p : pts) {
    if (!rs.empty() && p.r - rs.back() <= 1e-14 * std::max(1.0, std::abs(p.r))) {
      ls.back() = std::max(ls.back(), p.log_h);
      continue;
    }
    rs.push_back(p.r);
    ls.push_back(p.log_h);
  }
  if (rs.size() < 2) throw Error(ErrorKind::ZeroMass, "midpoint density has no extent");

  auto secant = [&](std::size_t i) { return (ls[i + 1] - ls[i]) / (rs[i + 1] - rs[i]); };
  std::optional<double> left;
  std::optional<double> right;
  if (left_open) {
    if (f.left_tail_slope() && g.left_tail_slope()) {
      const double a = *f.left_tail_slope();
      const double b = *g.left_tail_slope();
      left = 2.0 * a * b / (a + b);
    } else {
      left = std::max(secant(0), 1e-3);
    }
  }
  if (right_open) {
    if (f.right_tail_slope() && g.right_tail_slope()) {
      const double a = *f.right_tail_slope();
      const double b = *g.right_tail_slope();
      right = 2.0 * a * b / (a + b);
    } else {
      right = std::min(secant(rs.size() - 2), -1e-3);
    }
  }
  return PiecewiseLogLinear(std::move(rs), std::move(ls), left, right);
}

}  // namespace plstab
