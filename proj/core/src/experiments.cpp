#include "plstab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "plstab/error.hpp"

namespace plstab {

ExampleKind parse_example_kind(std::string_view name) {
  if (name == "exa2") return ExampleKind::Exa2;
  if (name == "exa3") return ExampleKind::Exa3;
  throw Error(ErrorKind::InvalidArgument, "unknown example '" + std::string(name) + "'");
}

std::string_view to_string(ExampleKind kind) {
  return kind == ExampleKind::Exa2 ? "exa2" : "exa3";
}

LogConcaveDensity laplace_density() {
  return build_density({0.0}, {-std::log(2.0)}, 1.0, -1.0, false);
}

LogConcaveDensity uniform_density(double lo, double hi) {
  const double level = 0.0 - std::log(hi - lo);
  return build_density({lo, hi}, {level, level}, std::nullopt, std::nullopt, false);
}

PLTriple make_example(ExampleKind kind, double eps, const std::optional<LogConcaveDensity>& base) {
  if (!(eps > 0.0 && eps < 0.5))
    throw Error(ErrorKind::EpsOutOfRange, "eps must lie in (0, 1/2)");
  if (kind == ExampleKind::Exa2) {
    LogConcaveDensity f = base ? *base : laplace_density();
    const auto st = stats(f);
    if (std::abs(st.mean) > 1e-9 || std::abs(st.median) > 1e-9)
      throw Error(ErrorKind::BaseNotEven, "base density must be centered at 0");
    auto g = affine_image(f, 1.0 / (1.0 + eps), 0.0);
    LogConcaveFunction m(f.scaled(std::log1p(eps)));
    return {std::move(m), std::move(f), std::move(g), 0.5};
  }
  auto f = uniform_density(-0.5, 0.5);
  const double edge = 0.5 - eps;
  auto g = build_density({-edge, edge}, {0.0, 0.0}, 1.0 / eps, -1.0 / eps, false);
  auto m = sup_convolution(f, g, 0.5);
  return {std::move(m), std::move(f), std::move(g), 0.5};
}

ExponentFit fit_exponent(std::string column, const std::vector<double>& x,
                         const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) throw Error(ErrorKind::InvalidArgument, "fit needs two positive points");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "fit needs distinct x values");
  ExponentFit fit;
  fit.column = std::move(column);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = syy - fit.slope * sxy;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

SweepResult sweep(ExampleKind kind, const std::vector<double>& eps_grid, double tol,
                  const std::optional<LogConcaveDensity>& base) {
  std::vector<double> distinct(eps_grid);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw Error(ErrorKind::InvalidArgument, "sweep needs 3 distinct eps");

  SweepResult out{kind, {}, {}, {}};
  for (const double eps : eps_grid) {
    const auto t = make_example(kind, eps, base);
    SweepRow row{};
    row.eps = eps;
    row.pl_epsilon = pl_epsilon(t);
    row.deficit_integral = pl_deficit_integral(t.f, t.g, tol);
    row.quadratic_cost = quadratic_cost(t.f, t.g, tol);
    row.l1 = l1_distance(t.f, t.g);
    row.bound_ratio = l1_bound_check(t.f, t.g, kDefaultL1Constant, tol).ratio;
    out.rows.push_back(row);
    out.divergence.push_back(probe_derivative_energy(TransportMap(t.f, t.g)));
  }

  std::vector<double> xs;
  for (const auto& r : out.rows) xs.push_back(r.eps);
  const std::pair<const char*, double SweepRow::*> columns[] = {
      {"pl_epsilon", &SweepRow::pl_epsilon},
      {"deficit_integral", &SweepRow::deficit_integral},
      {"quadratic_cost", &SweepRow::quadratic_cost},
      {"l1", &SweepRow::l1},
      {"bound_ratio", &SweepRow::bound_ratio},
  };
  for (const auto& [name, member] : columns) {
    std::vector<double> ys;
    for (const auto& r : out.rows) ys.push_back(r.*member);
    if (std::count_if(ys.begin(), ys.end(), [](double v) { return v > 0.0; }) >= 2)
      out.fits.push_back(fit_exponent(name, xs, ys));
  }
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = kSweepHeader;
  out += '\n';
  char buf[512];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.eps,
                  row.pl_epsilon, row.deficit_integral, row.quadratic_cost, row.l1,
                  row.bound_ratio);
    out += buf;
  }
  return out;
}

namespace {

// Sample points: fixed quantile levels plus uniform draws inside the body.
std::vector<double> sample_points(const LogConcaveDensity& d, SeededStream& rng) {
  std::vector<double> xs;
  for (const double p : {0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999})
    xs.push_back(d.quantile(p));
  for (int k = 0; k < 5; ++k) xs.push_back(d.quantile(rng.uniform(0.002, 0.998)));
  return xs;
}

int draw_pieces(SeededStream& rng) { return 1 + static_cast<int>(rng.uniform() * 6.0); }

std::uint64_t draw_seed(SeededStream& rng) {
  return static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);
}

class SuiteRun {
 public:
  SuiteRun(std::string_view name, int trials) {
    report_.name = std::string(name);
    report_.trials = trials;
  }

  void record(const InequalityMargin& m, int trial) {
    ++report_.checks;
    if (!m.pass) ++report_.failures;
    if (m.margin < report_.worst_margin) {
      report_.worst_margin = m.margin;
      report_.worst_label = m.label;
      report_.worst_trial = trial;
    }
  }

  // err <= allowed, both nonnegative
  void record_error(const std::string& label, double err, double allowed, int trial) {
    record(make_margin(label, err, allowed), trial);
  }

  SuiteReport finish() { return report_; }

 private:
  SuiteReport report_;
};

bool keep_label(const std::string& label, bool tail_items) {
  const bool window = label.rfind("tail_window", 0) == 0 || label.rfind("tail_abs", 0) == 0;
  return window == tail_items;
}

void suite_prop21(SuiteRun& run, SeededStream& rng, int trial) {
  const auto g = random_density(draw_seed(rng), draw_pieces(rng));
  const double cap = g.right_tail_slope() ? 0.5 * std::abs(*g.right_tail_slope()) : 1.5;
  const double lambda = rng.uniform(0.05, 0.95) * cap;
  const auto f = LogConcaveDensity::normalize(LogConcaveFunction(g.tilted(lambda)));
  // increasing odd test function c1 t + c3 t^3
  const double theta[] = {0.0, rng.uniform(0.1, 2.0), 0.0, rng.uniform(0.0, 0.5)};
  run.record(make_margin("moment_comparison", g.integrate_poly(theta), f.integrate_poly(theta)),
             trial);
}

void suite_hw(SuiteRun& run, SeededStream& rng, int trial, bool tail_items) {
  const auto d = random_density(draw_seed(rng), draw_pieces(rng));
  const auto xs = sample_points(d, rng);
  for (const auto& m : check_hw(d, xs))
    if (keep_label(m.label, tail_items)) run.record(m, trial);
}

void suite_bobkov(SuiteRun& run, SeededStream& rng, int trial) {
  const auto h = random_density(draw_seed(rng), draw_pieces(rng));
  std::vector<double> quad{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
  run.record(bobkov_gap(h, TestFunction::polynomial(quad)), trial);
  std::vector<double> quartic;
  for (int k = 0; k < 5; ++k) quartic.push_back(rng.uniform(-1, 1));
  run.record(bobkov_gap(h, TestFunction::polynomial(quartic)), trial);
  std::vector<double> xs;
  std::vector<double> ys;
  double x = h.quantile(0.05);
  for (int k = 0; k < 4; ++k) {
    xs.push_back(x);
    ys.push_back(rng.uniform(-2, 2));
    x += rng.uniform(0.1, 1.0);
  }
  run.record(bobkov_gap(h, TestFunction::piecewise_linear(xs, ys)), trial);
}

void suite_pl(SuiteRun& run, SeededStream& rng, int trial) {
  const auto f = random_density(draw_seed(rng), draw_pieces(rng));
  const auto g = random_density(draw_seed(rng), draw_pieces(rng));
  static constexpr double kAlphas[] = {0.2, 0.5, 0.8};
  const double alpha = kAlphas[trial % 3];
  const auto m = sup_convolution(f, g, alpha);
  const PLTriple t{m, f, g, alpha};
  const double eps = pl_epsilon(t);
  run.record(make_margin("pl_epsilon_nonnegative", -eps, 1e-12), trial);
  if (alpha == 0.5) {
    const double deficit = pl_deficit_integral(f, g, 1e-10);
    run.record(make_margin("deficit_below_epsilon", deficit, eps + 1e-10), trial);
    const auto h = midpoint_density(f, g);
    run.record(make_margin("midpoint_mass", 1.0 - 1e-6, h.mass()), trial);
  }
  const auto shrunk = LogConcaveFunction(m.scaled(-1e-6));
  run.record(make_margin("minimality", dominates_midpoint(shrunk, f, g, alpha) ? 1.0 : 0.0, 0.0),
             trial);
}

void suite_hull(SuiteRun& run, SeededStream& rng, int trial) {
  const auto d = random_density(draw_seed(rng), draw_pieces(rng));
  std::vector<HullPoint> pts;
  for (std::size_t i = 0; i < d.knots().size(); ++i) pts.push_back({d.knots()[i], d.logvals()[i]});
  const double lo = d.knots().front();
  const double hi = d.knots().back();
  for (int k = 0; k < 20; ++k) {
    const double x = rng.uniform(lo, hi);
    pts.push_back({x, d.log_value(x) - rng.uniform(0.0, 2.0)});
  }
  const auto hull = log_concave_hull(pts, d.left_tail_slope(), d.right_tail_slope());
  for (const auto& p : pts)
    run.record(make_margin("hull_dominates", p.log_value, hull.log_value(p.x) + 1e-12), trial);

  std::vector<HullPoint> own;
  for (std::size_t i = 0; i < hull.knots().size(); ++i)
    own.push_back({hull.knots()[i], hull.logvals()[i]});
  const auto again = log_concave_hull(own, hull.left_tail_slope(), hull.right_tail_slope());
  run.record(make_margin("hull_idempotent", again == hull ? 0.0 : 1.0, 0.0), trial);

  const auto poly = hypograph(hull);
  for (int k = 0; k < 8; ++k) {
    const double angle = rng.uniform(0.05, 3.09);
    const double u1 = std::cos(angle);
    const double u2 = std::sin(angle);
    const double h_hull = support_function(poly, u1, u2);
    if (std::isinf(h_hull)) continue;
    double h_pts = -kInf;
    for (const auto& p : pts) h_pts = std::max(h_pts, u1 * p.x + u2 * p.log_value);
    run.record_error("support_function", std::abs(h_hull - h_pts),
                     1e-12 * std::max(1.0, std::abs(h_pts)), trial);
  }
}

void suite_transport(SuiteRun& run, SeededStream& rng, int trial) {
  const auto f = random_density(draw_seed(rng), draw_pieces(rng));
  const auto g = random_density(draw_seed(rng), draw_pieces(rng));
  const TransportMap map(f, g);
  double prev_x = -kInf;
  double prev_t = -kInf;
  std::vector<double> xs;
  for (int k = 1; k < 40; ++k) xs.push_back(f.quantile(k / 40.0));
  for (int k = 0; k < 10; ++k) xs.push_back(f.quantile(rng.uniform(1e-4, 1.0 - 1e-4)));
  std::sort(xs.begin(), xs.end());
  for (const double x : xs) {
    const double t = map.map(x);
    const double push = std::abs(f.cdf(x) - g.cdf(t));
    run.record_error("pushforward", push, 1e-9, trial);
    if (x > prev_x) run.record(make_margin("monotone", prev_t, t), trial);
    prev_x = x;
    prev_t = t;
    const double fx = f.pdf(x);
    const double rel = std::abs(fx - g.value_right(t) * map.derivative(x)) / fx;
    run.record_error("density_identity", rel, 1e-7, trial);
    run.record_error("inverse", std::abs(map.inverse(t) - x), 1e-8 * std::max(1.0, std::abs(x)),
                     trial);
  }
}

void suite_transdist(SuiteRun& run, SeededStream& rng, int trial) {
  const auto pairs = transdist_pairs(1, draw_seed(rng));
  for (const auto& p : pairs) run.record(transdist_check(p.f, p.g), trial);
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prop21", "prop22", "cor23",     "bobkov",
                                              "pl",     "hull",   "transport", "transdist"};
  return names;
}

SuiteReport run_suite(std::string_view name, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
  std::function<void(SuiteRun&, SeededStream&, int)> body;
  if (name == "prop21") body = suite_prop21;
  else if (name == "prop22") body = [](SuiteRun& r, SeededStream& s, int t) { suite_hw(r, s, t, false); };
  else if (name == "cor23") body = [](SuiteRun& r, SeededStream& s, int t) { suite_hw(r, s, t, true); };
  else if (name == "bobkov") body = suite_bobkov;
  else if (name == "pl") body = suite_pl;
  else if (name == "hull") body = suite_hull;
  else if (name == "transport") body = suite_transport;
  else if (name == "transdist") body = suite_transdist;
  else throw Error(ErrorKind::UnknownSuite, "unknown suite '" + std::string(name) + "'");

  SuiteRun run(name, trials);
  SeededStream rng(seed);
  for (int trial = 0; trial < trials; ++trial) body(run, rng, trial);
  return run.finish();
}

std::vector<DensityPair> transdist_pairs(int count, std::uint64_t seed) {
  SeededStream rng(seed);
  std::vector<DensityPair> out;
  for (int attempt = 0; attempt < 50 * count && static_cast<int>(out.size()) < count; ++attempt) {
    const auto f = random_density(draw_seed(rng), draw_pieces(rng));
    const auto r = random_density(draw_seed(rng), draw_pieces(rng));
    const double delta = rng.uniform(0.02, 0.3);
    const auto g = LogConcaveDensity::normalize(sup_convolution(f, r, 1.0 - delta));
    auto fc = affine_image(f, 1.0, -stats(f).mean);
    auto gc = affine_image(g, 1.0, -stats(g).mean);
    const double eps = pl_deficit_integral(fc, gc);
    if (eps > 0.0 && eps < 1.0 / 48.0) out.push_back({std::move(fc), std::move(gc)});
  }
  return out;
}

}  // namespace plstab
