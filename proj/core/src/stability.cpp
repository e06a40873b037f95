#include "plstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plstab/error.hpp"
#include "plstab/numerics.hpp"

namespace plstab {

namespace {

// int_lo^hi |t - c| h(t) dt and int_lo^hi (t - c)^2 h(t) dt
double abs_first_moment(const PiecewiseLogLinear& h, double c, double lo, double hi) {
  const double up[] = {-c, 1.0};
  const double down[] = {c, -1.0};
  if (c <= lo) return h.integrate_poly(up, lo, hi);
  if (c >= hi) return h.integrate_poly(down, lo, hi);
  return h.integrate_poly(down, lo, c) + h.integrate_poly(up, c, hi);
}

double second_moment(const PiecewiseLogLinear& h, double c, double lo, double hi) {
  const double sq[] = {c * c, -2.0 * c, 1.0};
  return h.integrate_poly(sq, lo, hi);
}

}  // namespace

InequalityMargin make_margin(std::string label, double lhs, double rhs) {
  const double margin = rhs - lhs;
  return {std::move(label), lhs, rhs, margin, margin >= -kMarginTol};
}

double tail_mass(const LogConcaveDensity& d, double x) {
  return std::clamp(std::min(d.cdf(x), d.sf(x)), 0.0, 0.5);
}

std::vector<InequalityMargin> check_hw(const LogConcaveDensity& d, std::span<const double> xs) {
  const auto st = stats(d);
  const double w = st.median;
  const double hw = st.median_height;
  const double mu = st.mean;
  std::vector<InequalityMargin> out;
  out.push_back(make_margin("median_mean_gap", hw * std::abs(w - mu), 0.5 * (1.0 - std::numbers::ln2)));

  for (const double x : xs) {
    const double hx = d.pdf(x);
    const double dist = std::abs(x - w);
    out.push_back(make_margin("height_bound", hx, 2.0 * hw));

    if (dist <= std::numbers::ln2 / (2.0 * hw)) {
      out.push_back(make_margin("median_window_lower", hw * std::exp(-2.0 * hw * dist), hx));
      out.push_back(make_margin("median_window_upper", hx, hw * std::exp(2.0 * hw * dist)));
    }

    // Everything below is stated for x right of the median and mirrored.
    const bool right = x >= w;
    const double nu = right ? d.sf(x) : d.cdf(x);
    const double lo = right ? x : -kInf;
    const double hi = right ? kInf : x;
    out.push_back(make_margin("tail_mass", nu, hx / (2.0 * hw)));

    if (nu > 0.0) {
      const double l2n = std::log(2.0 * nu);
      out.push_back(make_margin("tail_first_moment", abs_first_moment(d, w, lo, hi),
                                nu / (2.0 * hw) * (1.0 - l2n)));
      out.push_back(make_margin("tail_second_moment", second_moment(d, w, lo, hi),
                                nu / (4.0 * hw * hw) * (l2n * l2n - 2.0 * l2n + 2.0)));
    }

    if (nu > 0.0 && nu <= 0.5 && hx > 0.0) {
      const double window = nu * std::numbers::ln2 / hx;
      for (const double frac : {0.25, 0.5, 0.75, 1.0}) {
        for (const double side : {-1.0, 1.0}) {
          const double t = x + side * frac * window;
          const double ht = d.pdf(t);
          const double gap = hx * std::abs(t - x) / nu;
          out.push_back(make_margin("tail_window_lower", hx * std::exp(-gap), ht));
          out.push_back(make_margin("tail_window_upper", ht, hx * std::exp(gap)));
        }
      }
    }

    if (nu > 0.0 && nu < 1.0 / 6.0) {
      const double ln_nu = std::log(nu);
      out.push_back(make_margin("tail_abs_first_moment", abs_first_moment(d, mu, lo, hi),
                                nu / hw * std::abs(ln_nu)));
      out.push_back(make_margin("tail_abs_second_moment", second_moment(d, mu, lo, hi),
                                5.0 * nu / (4.0 * hw * hw) * ln_nu * ln_nu));
    }
  }
  return out;
}

TestFunction TestFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw Error(ErrorKind::EmptyInput, "polynomial without coefficients");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw Error(ErrorKind::NonfiniteValue, "polynomial coefficient");
  TestFunction r;
  r.coeffs_ = std::move(coeffs);
  return r;
}

TestFunction TestFunction::piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "piecewise linear without knots");
  if (xs.size() != ys.size()) throw Error(ErrorKind::LengthMismatch, "piecewise linear knots");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw Error(ErrorKind::NonfiniteValue, "piecewise linear knot");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw Error(ErrorKind::UnsortedKnots, "piecewise linear");
  }
  TestFunction r;
  r.xs_ = std::move(xs);
  r.ys_ = std::move(ys);
  return r;
}

std::size_t TestFunction::degree() const noexcept {
  return is_polynomial() ? coeffs_.size() - 1 : 1;
}

double TestFunction::operator()(double x) const {
  if (is_polynomial()) return numerics::poly_eval(coeffs_, x);
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return ys_[i] + t * (ys_[i + 1] - ys_[i]);
}

std::vector<TestFunction::Segment> TestFunction::segments() const {
  if (is_polynomial()) return {{-kInf, kInf, coeffs_}};
  std::vector<Segment> out;
  out.push_back({-kInf, xs_.front(), {ys_.front()}});
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
    const double slope = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
    out.push_back({xs_[i], xs_[i + 1], {ys_[i] - slope * xs_[i], slope}});
  }
  out.push_back({xs_.back(), kInf, {ys_.back()}});
  return out;
}

InequalityMargin bobkov_gap(const LogConcaveDensity& h, const TestFunction& r) {
  if (r.degree() > 4)
    throw Error(ErrorKind::NonintegrableTestFunction, "polynomial degree above 4");
  const auto segs = r.segments();
  double mean = 0.0;
  for (const auto& s : segs) mean += h.integrate_poly(s.poly, s.lo, s.hi);
  double var = 0.0;
  double grad = 0.0;
  for (const auto& s : segs) {
    auto centered = s.poly;
    centered[0] -= mean;
    var += h.integrate_poly(numerics::poly_mul(centered, centered), s.lo, s.hi);
    const auto d = numerics::poly_derivative(s.poly);
    if (!d.empty()) grad += h.integrate_poly(numerics::poly_mul(d, d), s.lo, s.hi);
  }
  const double hw = h.pdf(h.quantile(0.5));
  return make_margin("poincare_variance", var, grad / (hw * hw));
}

LocalizedCostReport localized_cost(const LogConcaveDensity& f, const LogConcaveDensity& g,
                                   double z, double tol) {
  const double nu = std::min(f.cdf(z), f.sf(z));
  const double fz = f.pdf(z);
  if (!(nu > 0.0) || !(fz > 0.0))
    throw Error(ErrorKind::HypothesisNotMet, "z must be interior to the support of f");

  LocalizedCostReport rep{};
  rep.z = z;
  rep.nu = nu;
  const double base = nu * nu * nu / (fz * fz);
  if (g.cdf(z) <= 0.5 * nu || g.sf(z) <= 0.5 * nu) {
    rep.branch = LocalizedBranch::OneSidedTail;
    rep.delta = nu / fz;
    rep.scale = base;
  } else {
    const double gz = g.pdf(z);
    if (gz == fz) throw Error(ErrorKind::DegenerateAtZ, "g(z) = f(z)");
    const double k = std::min(std::abs(std::log(gz / fz)), 3.0);
    rep.branch = LocalizedBranch::BothTails;
    rep.delta = nu * std::numbers::ln2 / (3.0 * fz) * k;
    rep.scale = base * k * k * k * k;
  }
  const TransportMap map(f, g);
  rep.localized_cost = integrate_cost(map, z - rep.delta, z + rep.delta, tol).value;
  rep.ratio = rep.localized_cost / rep.scale;
  return rep;
}

InequalityMargin transdist_check(const LogConcaveDensity& f, const LogConcaveDensity& g,
                                 double tol) {
  const auto fc = affine_image(f, 1.0, -stats(f).mean);
  const auto gc = affine_image(g, 1.0, -stats(g).mean);
  const double eps = pl_deficit_integral(fc, gc, tol);
  const double cost = quadratic_cost(fc, gc, tol);
  if (eps <= 1e-15) return make_margin("transport_cost_vs_deficit", cost, 0.0);
  if (eps >= 1.0 / 48.0)
    throw Error(ErrorKind::EpsilonOutOfRange, "deficit integral " + std::to_string(eps) +
                                                  " is not below 1/48");
  const double hw = fc.pdf(fc.quantile(0.5));
  const double ln_eps = std::log(eps);
  return make_margin("transport_cost_vs_deficit", cost,
                     std::ldexp(1.0, 20) / (hw * hw) * eps * ln_eps * ln_eps);
}

L1BoundReport l1_bound_check(const LogConcaveDensity& f, const LogConcaveDensity& g,
                             double constant, double tol) {
  L1BoundReport rep;
  rep.constant = constant;
  const double l1 = l1_distance(f, g);
  const double cost = quadratic_cost(f, g, tol);
  if (cost <= 1e-20 || l1 == 0.0) {
    rep.exact_match = true;
    rep.margin = make_margin("l1_vs_cost", l1, 0.0);
    return rep;
  }
  const double hw = f.pdf(f.quantile(0.5));
  rep.eps_cost = cost * hw * hw;
  rep.shape = std::cbrt(rep.eps_cost) * std::pow(std::abs(std::log(rep.eps_cost)), 2.0 / 3.0);
  rep.ratio = l1 / rep.shape;
  rep.margin = make_margin("l1_vs_cost", l1, constant * rep.shape);
  return rep;
}

StabilityCertificate certify(const PLTriple& t, double constant) {
  StabilityCertificate cert;
  cert.constant_used = constant;
  cert.epsilon = pl_epsilon(t);
  if (!(t.m.mass() > 0.0)) throw Error(ErrorKind::ZeroMass, "m has no mass");

  cert.alignment_f = align(t.f, t.m);
  const auto ag = align(t.g, t.m);
  // |g(t) - a_g m(t + b_g)| is the second residual with a = 1/a_g, b = -b_g
  cert.alignment_g = {1.0 / ag.a, -ag.b, ag.residual};

  if (cert.epsilon <= 0.0) {
    cert.kind = "exact";
    cert.pass = cert.alignment_f.residual <= 1e-9 && cert.alignment_g.residual <= 1e-9;
    return cert;
  }
  cert.kind = "bound";
  const double mass_m = t.m.mass();
  cert.bound_shape =
      std::cbrt(cert.epsilon) * std::pow(std::abs(std::log(cert.epsilon)), 4.0 / 3.0);
  cert.ratio_f = cert.alignment_f.residual / (cert.bound_shape * cert.alignment_f.a * mass_m);
  cert.ratio_g = cert.alignment_g.residual / (cert.bound_shape * mass_m / cert.alignment_g.a);
  cert.pass = cert.ratio_f <= constant && cert.ratio_g <= constant;
  return cert;
}

}  // namespace plstab
