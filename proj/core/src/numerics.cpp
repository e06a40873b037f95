#include "plstab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plstab/error.hpp"

namespace plstab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::UnsortedKnots: return "UnsortedKnots";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonfiniteValue: return "NonfiniteValue";
    case ErrorKind::ConcavityViolated: return "ConcavityViolated";
    case ErrorKind::InfiniteMass: return "InfiniteMass";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::QuantileOutOfRange: return "QuantileOutOfRange";
    case ErrorKind::NonpositiveScale: return "NonpositiveScale";
    case ErrorKind::NonpositiveDerivative: return "NonpositiveDerivative";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::DominationViolated: return "DominationViolated";
    case ErrorKind::DegenerateAtZ: return "DegenerateAtZ";
    case ErrorKind::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorKind::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorKind::NonintegrableTestFunction: return "NonintegrableTestFunction";
    case ErrorKind::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorKind::BaseNotEven: return "BaseNotEven";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace numerics {

double expm1_ratio(double u) noexcept {
  if (std::abs(u) < kSmallSlope) return 1.0 + u * (0.5 + u / 6.0);
  return std::expm1(u) / u;
}

double log1p_ratio(double v) noexcept {
  if (std::abs(v) < kSmallSlope) return 1.0 - v * (0.5 - v / 3.0);
  return std::log1p(v) / v;
}

double exp_linear_integral(double lu, double s, double width) noexcept {
  if (width == 0.0) return 0.0;
  if (std::isinf(width)) return std::exp(lu) / std::abs(s);
  const double lv = lu + s * width;
  return std::exp(std::max(lu, lv)) * width * expm1_ratio(-std::abs(s) * width);
}

std::vector<double> decaying_moments(double lambda, double length, std::size_t kmax) {
  std::vector<double> out(kmax + 1, 0.0);
  if (std::isinf(length)) {
    double fact = 1.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      out[k] = fact / std::pow(lambda, static_cast<double>(k + 1));
    }
    return out;
  }
  if (length <= 0.0) return out;
  if (lambda == 0.0) {
    for (std::size_t k = 0; k <= kmax; ++k)
      out[k] = std::pow(length, static_cast<double>(k + 1)) / static_cast<double>(k + 1);
    return out;
  }
  const double u = lambda * length;
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double a = static_cast<double>(k + 1);
    if (u < a + 1.0) {
      // lower incomplete gamma series, positive terms only
      double term = 1.0 / a;
      double sum = term;
      for (int n = 1; n < 500; ++n) {
        term *= u / (a + n);
        sum += term;
        if (term < 1e-18 * sum) break;
      }
      out[k] = std::pow(length, a) * std::exp(-u) * sum;
    } else {
      double term = 1.0;
      double partial = 1.0;
      for (std::size_t j = 1; j <= k; ++j) {
        term *= u / static_cast<double>(j);
        partial += term;
      }
      double fact = 1.0;
      for (std::size_t j = 2; j <= k; ++j) fact *= static_cast<double>(j);
      out[k] = fact / std::pow(lambda, a) * (1.0 - std::exp(-u) * partial);
    }
  }
  return out;
}

std::vector<double> taylor_shift(std::span<const double> p, double c, double sign) {
  const std::size_t n = p.size();
  std::vector<double> q(n, 0.0);
  // binomial expansion of (c + sign t)^i
  std::vector<double> row(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    // row[j] = C(i, j) c^{i-j} sign^j
    for (std::size_t j = i; j > 0; --j) row[j] = row[j] * c + row[j - 1] * sign;
    row[0] = (i == 0) ? 1.0 : row[0] * c;
    for (std::size_t j = 0; j <= i; ++j) q[j] += p[i] * row[j];
  }
  return q;
}

double poly_eval(std::span<const double> p, double x) noexcept {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> poly_derivative(std::span<const double> p) {
  if (p.size() <= 1) return {0.0};
  std::vector<double> out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = static_cast<double>(i) * p[i];
  return out;
}

}  // namespace numerics
}  // namespace plstab
