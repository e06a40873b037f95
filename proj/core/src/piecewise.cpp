#include "plstab/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plstab/error.hpp"
#include "plstab/numerics.hpp"

namespace plstab {

namespace {

double piece_mass(const Piece& p) {
  if (p.lo == -kInf) return std::exp(p.anchor_log) / p.slope;
  if (p.hi == kInf) return std::exp(p.anchor_log) / -p.slope;
  return numerics::exp_linear_integral(p.anchor_log, p.slope, p.hi - p.lo);
}

// int_u^v of the piece, lo <= u <= v <= hi.
double partial_mass(const Piece& p, double u, double v) {
  if (!(v > u)) return 0.0;
  if (u == -kInf) return std::exp(p.log_at(v)) / p.slope;
  if (v == kInf) return std::exp(p.log_at(u)) / -p.slope;
  return numerics::exp_linear_integral(p.log_at(u), p.slope, v - u);
}

}  // namespace

PiecewiseLogLinear::PiecewiseLogLinear(std::vector<double> knots, std::vector<double> logvals,
                                       std::optional<double> left_tail_slope,
                                       std::optional<double> right_tail_slope)
    : knots_(std::move(knots)),
      logvals_(std::move(logvals)),
      left_tail_(left_tail_slope),
      right_tail_(right_tail_slope) {
  if (knots_.empty() || logvals_.empty()) throw Error(ErrorKind::EmptyInput, "no knots");
  if (knots_.size() != logvals_.size())
    throw Error(ErrorKind::LengthMismatch, std::to_string(knots_.size()) + " knots vs " +
                                               std::to_string(logvals_.size()) + " logvals");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !std::isfinite(logvals_[i]))
      throw Error(ErrorKind::NonfiniteValue, "knot " + std::to_string(i));
    if (i > 0 && !(knots_[i] > knots_[i - 1]))
      throw Error(ErrorKind::UnsortedKnots, "knot " + std::to_string(i) + " not above its predecessor");
  }
  if (left_tail_) {
    if (!std::isfinite(*left_tail_)) throw Error(ErrorKind::NonfiniteValue, "left tail slope");
    if (!(*left_tail_ > 0.0)) throw Error(ErrorKind::InfiniteMass, "left tail slope must be positive");
  }
  if (right_tail_) {
    if (!std::isfinite(*right_tail_)) throw Error(ErrorKind::NonfiniteValue, "right tail slope");
    if (!(*right_tail_ < 0.0))
      throw Error(ErrorKind::InfiniteMass, "right tail slope must be negative");
  }
  if (knots_.size() == 1 && !left_tail_ && !right_tail_)
    throw Error(ErrorKind::ZeroMass, "a single knot needs a tail");

  const std::size_t n = knots_.size();
  if (left_tail_)
    pieces_.push_back({-kInf, knots_[0], knots_[0], logvals_[0], *left_tail_, 0.0});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slope = (logvals_[i + 1] - logvals_[i]) / (knots_[i + 1] - knots_[i]);
    pieces_.push_back({knots_[i], knots_[i + 1], knots_[i], logvals_[i], slope, 0.0});
  }
  if (right_tail_)
    pieces_.push_back({knots_[n - 1], kInf, knots_[n - 1], logvals_[n - 1], *right_tail_, 0.0});

  for (auto& p : pieces_) p.mass = piece_mass(p);
  cum_lower_.assign(pieces_.size(), 0.0);
  cum_upper_.assign(pieces_.size(), 0.0);
  for (std::size_t k = 1; k < pieces_.size(); ++k)
    cum_lower_[k] = cum_lower_[k - 1] + pieces_[k - 1].mass;
  for (std::size_t k = pieces_.size() - 1; k-- > 0;)
    cum_upper_[k] = cum_upper_[k + 1] + pieces_[k + 1].mass;
  total_mass_ = cum_lower_.back() + pieces_.back().mass;
  if (!std::isfinite(total_mass_)) throw Error(ErrorKind::InfiniteMass, "mass overflows");
  if (!(total_mass_ > 0.0)) throw Error(ErrorKind::ZeroMass, "mass underflows to zero");
}

std::optional<std::size_t> PiecewiseLogLinear::piece_index(double x) const noexcept {
  const std::size_t offset = left_tail_ ? 1 : 0;
  if (x < knots_.front()) {
    if (left_tail_) return 0;
    return std::nullopt;
  }
  if (x >= knots_.back()) {
    if (right_tail_) return pieces_.size() - 1;
    if (x == knots_.back() && knots_.size() > 1) return offset + knots_.size() - 2;
    return std::nullopt;
  }
  if (std::isnan(x)) return std::nullopt;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  return offset + static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double PiecewiseLogLinear::log_value(double x) const noexcept {
  const auto k = piece_index(x);
  if (!k) return -kInf;
  return pieces_[*k].log_at(x);
}

double PiecewiseLogLinear::value(double x) const noexcept { return std::exp(log_value(x)); }

double PiecewiseLogLinear::log_value_right(double x) const noexcept {
  if (!right_tail_ && x >= knots_.back()) return -kInf;
  return log_value(x);
}

double PiecewiseLogLinear::value_right(double x) const noexcept {
  return std::exp(log_value_right(x));
}

double PiecewiseLogLinear::lower_mass(double x) const noexcept {
  if (x <= support_lo()) return 0.0;
  if (x >= support_hi()) return total_mass_;
  const auto k = piece_index(x);
  if (!k) return 0.0;
  const Piece& p = pieces_[*k];
  return cum_lower_[*k] + partial_mass(p, p.lo, x);
}

double PiecewiseLogLinear::upper_mass(double x) const noexcept {
  if (x >= support_hi()) return 0.0;
  if (x <= support_lo()) return total_mass_;
  const auto k = piece_index(x);
  if (!k) return 0.0;
  const Piece& p = pieces_[*k];
  return cum_upper_[*k] + partial_mass(p, x, p.hi);
}

double PiecewiseLogLinear::lower_inverse(double m) const noexcept {
  if (m <= 0.0) return support_lo();
  if (m >= total_mass_) return support_hi();
  auto it = std::upper_bound(cum_lower_.begin(), cum_lower_.end(), m);
  const std::size_t k = static_cast<std::size_t>(it - cum_lower_.begin()) - 1;
  const Piece& p = pieces_[k];
  const double r = std::min(m - cum_lower_[k], p.mass);
  if (p.lo == -kInf) return p.anchor + (std::log(r * p.slope) - p.anchor_log) / p.slope;
  const double l0 = p.log_at(p.lo);
  const double scaled = std::exp(std::log(r) - l0);
  const double t = scaled * numerics::log1p_ratio(p.slope * scaled);
  return std::clamp(p.lo + t, p.lo, p.hi);
}

double PiecewiseLogLinear::upper_inverse(double m) const noexcept {
  if (m <= 0.0) return support_hi();
  if (m >= total_mass_) return support_lo();
  // cum_upper_ is nonincreasing; find the last k with cum_upper_[k] <= m.
  auto it = std::upper_bound(cum_upper_.rbegin(), cum_upper_.rend(), m);
  const std::size_t k = cum_upper_.size() - static_cast<std::size_t>(it - cum_upper_.rbegin());
  const Piece& p = pieces_[k];
  const double r = std::min(m - cum_upper_[k], p.mass);
  if (p.hi == kInf) return p.anchor + (std::log(-r * p.slope) - p.anchor_log) / p.slope;
  const double l1 = p.log_at(p.hi);
  const double scaled = std::exp(std::log(r) - l1);
  const double t = scaled * numerics::log1p_ratio(-p.slope * scaled);
  return std::clamp(p.hi - t, p.lo, p.hi);
}

double PiecewiseLogLinear::integrate_poly(std::span<const double> poly, double lo, double hi) const {
  if (poly.empty() || !(hi > lo)) return 0.0;
  const std::size_t degree = poly.size() - 1;
  double total = 0.0;
  for (const Piece& p : pieces_) {
    const double u = std::max(lo, p.lo);
    const double v = std::min(hi, p.hi);
    if (!(v > u)) continue;
    // Expand around the end with the larger exponent so the weight decays.
    const bool from_left = (u != -kInf) && (v == kInf || p.slope <= 0.0);
    const double origin = from_left ? u : v;
    const double sign = from_left ? 1.0 : -1.0;
    const double lambda = std::abs(p.slope);
    const double length = (u == -kInf || v == kInf) ? kInf : v - u;
    const auto q = numerics::taylor_shift(poly, origin, sign);
    const auto moments = numerics::decaying_moments(lambda, length, degree);
    double acc = 0.0;
    for (std::size_t k = 0; k <= degree; ++k) acc += q[k] * moments[k];
    total += std::exp(p.log_at(origin)) * acc;
  }
  return total;
}

PiecewiseLogLinear PiecewiseLogLinear::scaled(double log_factor) const {
  std::vector<double> lv(logvals_);
  for (double& l : lv) l += log_factor;
  return PiecewiseLogLinear(knots_, std::move(lv), left_tail_, right_tail_);
}

PiecewiseLogLinear PiecewiseLogLinear::composed_affine(double scale, double shift) const {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::NonpositiveScale, "scale must be positive and finite");
  std::vector<double> kn(knots_);
  for (double& x : kn) x = scale * x + shift;
  auto lt = left_tail_;
  auto rt = right_tail_;
  if (lt) *lt /= scale;
  if (rt) *rt /= scale;
  return PiecewiseLogLinear(std::move(kn), logvals_, lt, rt);
}

PiecewiseLogLinear PiecewiseLogLinear::tilted(double rate) const {
  std::vector<double> lv(logvals_);
  for (std::size_t i = 0; i < lv.size(); ++i) lv[i] += rate * knots_[i];
  auto lt = left_tail_;
  auto rt = right_tail_;
  if (lt) *lt += rate;
  if (rt) *rt += rate;
  return PiecewiseLogLinear(knots_, std::move(lv), lt, rt);
}

}  // namespace plstab
