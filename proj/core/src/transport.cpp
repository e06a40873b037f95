#include "plstab/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "plstab/error.hpp"
#include "plstab/quadrature.hpp"

namespace plstab {

namespace {

struct Level {
  double x;
  double y;
};

bool close(double a, double b) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(a));
}

double probe_point(double lo, double hi) {
  if (lo == -kInf) return hi - 1.0;
  if (hi == kInf) return lo + 1.0;
  return 0.5 * (lo + hi);
}

// sqrt(w) (sqrt(q) - sqrt(w))^2 / (2 sqrt(q)) = w D(w / q)
double weighted_deficit(double log_w, double log_q) {
  const double sw = std::exp(0.5 * log_w);
  const double sq = std::exp(0.5 * log_q);
  const double diff = sq - sw;
  return sw * diff * diff / (2.0 * sq);
}

enum class Quantity { Cost, Deficit };

// Integration in one coordinate: the weight density lives on that coordinate
// and the partner is reached through the coupling (T or S).
struct Role {
  const Piece* weight;
  const Piece* partner;
  const PiecewiseLogLinear* partner_fn;
  std::function<double(double)> to_partner;
};

double integrand(Quantity q, const Role& role, double u) {
  const double lw = role.weight->log_at(u);
  const double v = role.to_partner(u);
  if (q == Quantity::Cost) {
    const double d = v - u;
    return std::exp(lw) * d * d;
  }
  return weighted_deficit(lw, role.partner->log_at(v));
}

struct Accumulator {
  double value = 0.0;
  double error = 0.0;
  bool failed = false;

  void add_quadrature(const QuadratureResult& r) {
    value += r.value;
    error += r.error;
    failed = failed || !r.converged;
  }
};

// Weight has an unbounded exponential tail beyond `anchor` on `side` (+1
// right, -1 left); the partner stays in a bounded piece ending at `partner_end`.
void integrate_truncated_tail(Quantity q, const Role& role, double anchor, int side,
                              double partner_end, double tol, Accumulator& acc) {
  const Piece& wp = *role.weight;
  const double lambda = std::abs(wp.slope);
  const double la = wp.log_at(anchor);
  const double tail_mass = std::exp(la) / lambda;

  double nu = std::min(1e-12, 0.5 * tail_mass);
  double cut = anchor;
  double estimate = 0.0;
  double err = kInf;
  for (; nu > 1e-290; nu *= 1e-4) {
    const double dist = (la - std::log(nu * lambda)) / lambda;
    cut = anchor + side * dist;
    const double lc = wp.log_at(cut);
    const double vc = role.to_partner(cut);
    const double v_lo = side > 0 ? vc : partner_end;
    const double v_hi = side > 0 ? partner_end : vc;
    if (q == Quantity::Cost) {
      const double a_part = 2.0 * std::exp(lc) / (lambda * lambda * lambda);
      const std::array<double, 3> poly{cut * cut, -2.0 * cut, 1.0};
      const double b_part = std::max(0.0, role.partner_fn->integrate_poly(poly, v_lo, v_hi));
      estimate = a_part + b_part;
      err = 2.0 * std::sqrt(a_part * b_part);
    } else {
      const double lq1 = role.partner->log_at(v_lo);
      const double lq2 = role.partner->log_at(v_hi);
      const double qmax = std::exp(std::max(lq1, lq2));
      const double qmin = std::exp(std::min(lq1, lq2));
      const double bound = std::sqrt(qmax) * std::exp(0.5 * lc) / lambda +
                           std::exp(1.5 * lc) / (3.0 * lambda * std::sqrt(qmin));
      estimate = 0.5 * bound;
      err = 0.5 * bound;
    }
    if (err <= 0.5 * tol) break;
  }
  if (err > 0.5 * tol) acc.failed = true;
  acc.value += estimate;
  acc.error += err;

  const double lo = side > 0 ? anchor : cut;
  const double hi = side > 0 ? cut : anchor;
  acc.add_quadrature(
      adaptive_simpson([&](double u) { return integrand(q, role, u); }, lo, hi, 0.5 * tol));
}

// Both sides are exponential tails, so T is affine: T(x) = T(a) + r (x - a).
void integrate_affine_tail(Quantity q, const Piece& fp, const Piece& gp, double anchor,
                           double image, int side, Accumulator& acc) {
  const double lambda = std::abs(fp.slope);
  const double r = fp.slope / gp.slope;
  const double la = fp.log_at(anchor);
  if (q == Quantity::Deficit) {
    acc.value += deficit_integrand(r, 0.5) * std::exp(la) / lambda;
    return;
  }
  const double c0 = image - anchor;
  const double c1 = r - 1.0;
  const double j0 = 1.0 / lambda;
  const double j1 = j0 / lambda;
  const double j2 = 2.0 * j1 / lambda;
  acc.value += std::exp(la) * (c0 * c0 * j0 + 2.0 * side * c0 * c1 * j1 + c1 * c1 * j2);
}

CouplingIntegral integrate_quantity(const TransportMap& map, Quantity q, double x_from,
                                    double x_to, double tol) {
  const auto& f = map.source();
  const auto& g = map.target();
  const auto cells = map.cells();
  std::size_t active = 0;
  for (const auto& c : cells)
    if (std::min(c.x_hi, x_to) > std::max(c.x_lo, x_from)) ++active;
  const double cell_tol = tol / static_cast<double>(std::max<std::size_t>(active, 1));

  auto forward = [&map](double x) { return map.map(x); };
  auto backward = [&map](double y) { return map.inverse(y); };

  Accumulator acc;
  for (const auto& c : cells) {
    const double a = std::max(c.x_lo, x_from);
    const double b = std::min(c.x_hi, x_to);
    if (!(b > a)) continue;
    const double ya = (a == c.x_lo) ? c.y_lo : map.map(a);
    const double yb = (b == c.x_hi) ? c.y_hi : map.map(b);
    const Piece& fp = f.pieces()[c.f_piece];
    const Piece& gp = g.pieces()[c.g_piece];
    const bool x_unbounded = std::isinf(a) || std::isinf(b);
    const bool y_unbounded = std::isinf(ya) || std::isinf(yb);

    if (!x_unbounded && !y_unbounded) {
      const Role role{&fp, &gp, &g, forward};
      acc.add_quadrature(adaptive_simpson([&](double u) { return integrand(q, role, u); }, a, b,
                                          cell_tol));
    } else if (x_unbounded && y_unbounded) {
      if (b == kInf)
        integrate_affine_tail(q, fp, gp, a, ya, +1, acc);
      else
        integrate_affine_tail(q, fp, gp, b, yb, -1, acc);
    } else if (x_unbounded) {
      const Role role{&fp, &gp, &g, forward};
      if (b == kInf)
        integrate_truncated_tail(q, role, a, +1, yb, cell_tol, acc);
      else
        integrate_truncated_tail(q, role, b, -1, ya, cell_tol, acc);
    } else {
      // g's tail faces a bounded piece of f: change variables to y = T(x).
      const Role role{&gp, &fp, &f, backward};
      if (yb == kInf)
        integrate_truncated_tail(q, role, ya, +1, b, cell_tol, acc);
      else
        integrate_truncated_tail(q, role, yb, -1, a, cell_tol, acc);
    }
  }
  if (acc.failed || acc.error > tol)
    throw Error(ErrorKind::ToleranceNotReached,
                "error estimate " + std::to_string(acc.error) + " exceeds " + std::to_string(tol));
  return {acc.value, acc.error};
}

}  // namespace

TransportMap::TransportMap(LogConcaveDensity source, LogConcaveDensity target)
    : f_(std::move(source)), g_(std::move(target)) {
  std::vector<Level> levels;
  levels.push_back({f_.support_lo(), g_.support_lo()});
  levels.push_back({f_.support_hi(), g_.support_hi()});
  for (double x : f_.knots()) levels.push_back({x, map(x)});
  for (double y : g_.knots()) levels.push_back({inverse(y), y});
  std::sort(levels.begin(), levels.end(), [](const Level& l, const Level& r) {
    return l.x < r.x || (l.x == r.x && l.y < r.y);
  });

  std::vector<Level> merged;
  for (const auto& l : levels) {
    if (!merged.empty() && (close(merged.back().x, l.x) || close(merged.back().y, l.y))) {
      // keep the exact coordinate: knots come with one exact side
      auto& m = merged.back();
      if (std::isinf(l.x)) m.x = l.x;
      if (std::isinf(l.y)) m.y = l.y;
      if (std::binary_search(f_.knots().begin(), f_.knots().end(), l.x)) m.x = l.x;
      if (std::binary_search(g_.knots().begin(), g_.knots().end(), l.y)) m.y = l.y;
      continue;
    }
    merged.push_back(l);
  }

  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const Level& lo = merged[i];
    const Level& hi = merged[i + 1];
    if (!(hi.x > lo.x) || !(hi.y > lo.y)) continue;
    const auto fk = f_.piece_index(probe_point(lo.x, hi.x));
    const auto gk = g_.piece_index(probe_point(lo.y, hi.y));
    if (!fk || !gk) continue;
    cells_.push_back({f_.cdf(lo.x), f_.cdf(hi.x), lo.x, hi.x, lo.y, hi.y, *fk, *gk});
  }
}

double TransportMap::map(double x) const noexcept {
  if (x <= f_.support_lo()) return g_.support_lo();
  if (x >= f_.support_hi()) return g_.support_hi();
  const double p = f_.cdf(x);
  if (p <= 0.5) return g_.lower_inverse(p);
  return g_.upper_inverse(f_.sf(x));
}

double TransportMap::inverse(double y) const noexcept {
  if (y <= g_.support_lo()) return f_.support_lo();
  if (y >= g_.support_hi()) return f_.support_hi();
  const double p = g_.cdf(y);
  if (p <= 0.5) return f_.lower_inverse(p);
  return f_.upper_inverse(g_.sf(y));
}

double TransportMap::derivative(double x) const noexcept {
  return std::exp(f_.log_value_right(x) - g_.log_value_right(map(x)));
}

TransportMap transport_map(const LogConcaveDensity& f, const LogConcaveDensity& g) {
  return TransportMap(f, g);
}

CouplingIntegral integrate_cost(const TransportMap& map, double x_from, double x_to, double tol) {
  return integrate_quantity(map, Quantity::Cost, x_from, x_to, tol);
}

CouplingIntegral integrate_deficit(const TransportMap& map, double tol) {
  return integrate_quantity(map, Quantity::Deficit, -kInf, kInf, tol);
}

double quadratic_cost(const LogConcaveDensity& f, const LogConcaveDensity& g, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  return integrate_cost(TransportMap(f, g), -kInf, kInf, tol).value;
}

double pl_deficit_integral(const LogConcaveDensity& f, const LogConcaveDensity& g, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  return std::max(0.0, integrate_deficit(TransportMap(f, g), tol).value);
}

double deficit_integrand(double tprime, double alpha) {
  if (!(tprime > 0.0))
    throw Error(ErrorKind::NonpositiveDerivative, "T' = " + std::to_string(tprime));
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  if (alpha == 0.5) {
    const double s = std::sqrt(tprime);
    return (1.0 - s) * (1.0 - s) / (2.0 * s);
  }
  const double beta = 1.0 - alpha;
  const double u = std::log(tprime);
  if (std::abs(u) < 0.1) {
    // alpha e^{-beta u} + beta e^{alpha u} - 1, first-order terms cancel
    double sum = 0.0;
    double upow = u;
    double fact = 1.0;
    double apow = 1.0;
    double bpow = 1.0;
    for (int k = 2; k <= 16; ++k) {
      upow *= u;
      fact *= k;
      apow *= alpha;
      bpow *= -beta;
      sum += (apow - bpow) * upow / fact;
    }
    return alpha * beta * sum;
  }
  return alpha * std::exp(-beta * u) + beta * std::exp(alpha * u) - 1.0;
}

double derivative_energy(const TransportMap& map, double delta, double tol) {
  const auto& f = map.source();
  const auto& g = map.target();
  const double x_from = f.lower_inverse(delta);
  const double x_to = f.upper_inverse(delta);
  double total = 0.0;
  for (const auto& c : map.cells()) {
    const double a = std::max(c.x_lo, x_from);
    const double b = std::min(c.x_hi, x_to);
    if (!(b > a)) continue;
    const Piece& fp = f.pieces()[c.f_piece];
    const Piece& gp = g.pieces()[c.g_piece];
    auto energy = [&](double x) {
      const double lf = fp.log_at(x);
      const double d = std::exp(lf - gp.log_at(map.map(x))) - 1.0;
      return std::exp(lf) * d * d;
    };
    const auto r = adaptive_simpson(energy, a, b, tol);
    if (!r.converged) throw Error(ErrorKind::ToleranceNotReached, "derivative energy");
    total += r.value;
  }
  return total;
}

DivergenceProbe probe_derivative_energy(const TransportMap& map, double delta0, int refinements) {
  DivergenceProbe out;
  double delta = delta0;
  for (int k = 0; k <= refinements; ++k, delta *= 0.5) {
    out.deltas.push_back(delta);
    out.estimates.push_back(derivative_energy(map, delta));
  }
  out.divergent = refinements > 0;
  for (std::size_t k = 1; k < out.estimates.size(); ++k)
    if (!(out.estimates[k] > 1.5 * out.estimates[k - 1])) out.divergent = false;
  return out;
}

double alignment_residual(const PiecewiseLogLinear& f, const LogConcaveFunction& m, double a,
                          double b) {
  return l1_distance(f, m.composed_affine(1.0, -b).scaled(std::log(a)));
}

namespace {

// Minimizes phi on [lo, hi]; returns the best point seen (never worse than x0).
std::pair<double, double> golden_section(const std::function<double(double)>& phi, double lo,
                                         double hi, double x0, double f0) {
  constexpr double kInvPhi = 0.6180339887498949;
  double best_x = x0;
  double best_f = f0;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = phi(c);
  double fd = phi(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-6 * std::max(1.0, std::abs(lo) + std::abs(hi));
       ++it) {
    if (fc < best_f) best_f = fc, best_x = c;
    if (fd < best_f) best_f = fd, best_x = d;
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = phi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = phi(d);
    }
  }
  if (fc < best_f) best_f = fc, best_x = c;
  if (fd < best_f) best_f = fd, best_x = d;
  return {best_x, best_f};
}

}  // namespace

Alignment align(const PiecewiseLogLinear& f, const LogConcaveFunction& m) {
  if (!(m.mass() > 0.0) || !(f.mass() > 0.0)) throw Error(ErrorKind::ZeroMass, "align");
  const auto mn = LogConcaveDensity::normalize(m);
  const double first[] = {0.0, 1.0};
  const double mean_m = mn.integrate_poly(first);
  const double mean_f = f.integrate_poly(first) / f.mass();
  const double centered[] = {mean_m * mean_m, -2.0 * mean_m, 1.0};
  const double sd_m = std::sqrt(std::max(mn.integrate_poly(centered), 1e-300));

  const double a0 = f.mass() / m.mass();
  const double b0 = mean_m - mean_f;
  auto residual = [&](double log_a, double b) {
    return alignment_residual(f, m, std::exp(log_a), b);
  };

  double best_la = std::log(a0);
  double best_b = b0;
  double best = residual(best_la, best_b);
  auto consider = [&](double la, double b) {
    const double r = residual(la, b);
    if (r < best) best = r, best_la = la, best_b = b;
  };
  consider(0.0, 0.0);
  const double a_step = std::log(4.0) / 4.0;
  const double b_step = 0.5 * sd_m;
  for (int i = -4; i <= 4; ++i)
    for (int j = -8; j <= 8; ++j) consider(std::log(a0) + i * a_step, b0 + j * b_step);

  for (int round = 0; round < 40; ++round) {
    const double prev_la = best_la;
    const double prev_b = best_b;
    const double prev = best;
    auto [la, fa] = golden_section([&](double x) { return residual(x, best_b); },
                                   best_la - a_step, best_la + a_step, best_la, best);
    best_la = la;
    best = fa;
    auto [bb, fb] = golden_section([&](double x) { return residual(best_la, x); },
                                   best_b - b_step, best_b + b_step, best_b, best);
    best_b = bb;
    best = fb;
    const bool still = std::abs(best_la - prev_la) <= 1e-6 * std::max(1.0, std::abs(prev_la)) &&
                       std::abs(best_b - prev_b) <= 1e-6 * std::max(1.0, std::abs(prev_b));
    if (still || best >= prev) break;
  }
  return {std::exp(best_la), best_b, best};
}

}  // namespace plstab
