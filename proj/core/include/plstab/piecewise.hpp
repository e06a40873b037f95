#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace plstab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One exp-linear piece: ln h(x) = anchor_log + slope * (x - anchor) on [lo, hi].
// Tails have one infinite end; the anchor is always the finite end.
struct Piece {
  double lo;
  double hi;
  double anchor;
  double anchor_log;
  double slope;
  double mass;

  double log_at(double x) const noexcept { return anchor_log + slope * (x - anchor); }
  bool is_tail() const noexcept { return lo == -kInf || hi == kInf; }
};

// A positive function with finite mass whose logarithm is piecewise affine
// between knots x_0 < ... < x_n, optionally continued by exponential tails.
// Outside [x_0, x_n] the function is zero on every side without a tail.
// This type does not require concavity; LogConcaveFunction adds that.
class PiecewiseLogLinear {
 public:
  PiecewiseLogLinear(std::vector<double> knots, std::vector<double> logvals,
                     std::optional<double> left_tail_slope = std::nullopt,
                     std::optional<double> right_tail_slope = std::nullopt);

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> logvals() const noexcept { return logvals_; }
  std::optional<double> left_tail_slope() const noexcept { return left_tail_; }
  std::optional<double> right_tail_slope() const noexcept { return right_tail_; }
  std::span<const Piece> pieces() const noexcept { return pieces_; }

  double support_lo() const noexcept { return left_tail_ ? -kInf : knots_.front(); }
  double support_hi() const noexcept { return right_tail_ ? kInf : knots_.back(); }

  // ln h(x); -inf outside the closed support.
  double log_value(double x) const noexcept;
  double value(double x) const noexcept;
  // Right-hand limit; differs from value() only at a right support endpoint.
  double log_value_right(double x) const noexcept;
  double value_right(double x) const noexcept;

  double mass() const noexcept { return total_mass_; }
  // int_{-inf}^x h and int_x^{inf} h, each summed from its own side.
  double lower_mass(double x) const noexcept;
  double upper_mass(double x) const noexcept;
  // Inverses of lower_mass / upper_mass for a mass level in [0, mass()].
  double lower_inverse(double m) const noexcept;
  double upper_inverse(double m) const noexcept;

  // int_lo^hi p(x) h(x) dx for p in the monomial basis, exact per piece.
  double integrate_poly(std::span<const double> p, double lo = -kInf, double hi = kInf) const;

  // Index of the piece containing x (a knot belongs to the piece on its
  // right, except the last knot of a bounded support). Empty outside.
  std::optional<std::size_t> piece_index(double x) const noexcept;

  PiecewiseLogLinear scaled(double log_factor) const;
  // x -> h((x - shift) / scale); no Jacobian factor.
  PiecewiseLogLinear composed_affine(double scale, double shift) const;
  // h(x) e^{rate x}
  PiecewiseLogLinear tilted(double rate) const;

  friend bool operator==(const PiecewiseLogLinear& a, const PiecewiseLogLinear& b) {
    return a.knots_ == b.knots_ && a.logvals_ == b.logvals_ && a.left_tail_ == b.left_tail_ &&
           a.right_tail_ == b.right_tail_;
  }

 private:
  std::vector<double> knots_;
  std::vector<double> logvals_;
  std::optional<double> left_tail_;
  std::optional<double> right_tail_;
  std::vector<Piece> pieces_;
  std::vector<double> cum_lower_;
  std::vector<double> cum_upper_;
  double total_mass_ = 0.0;
};

}  // namespace plstab
