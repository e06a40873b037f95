#include "plstab/quadrature.hpp"

#include <algorithm>

namespace plstab {

namespace {

struct Interval {
  double a, b;
  double fa, fm, fb;
  double whole;
  double tol;
  int depth;
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, std::size_t max_evals, int min_depth) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  out.evaluations = 3;

  std::vector<Interval> stack;
  stack.push_back({a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 0});
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (iv.a + iv.b);
    const double lm = 0.5 * (iv.a + mid);
    const double rm = 0.5 * (mid + iv.b);
    const double flm = f(lm);
    const double frm = f(rm);
    out.evaluations += 2;
    const double left = (mid - iv.a) / 6.0 * (iv.fa + 4.0 * flm + iv.fm);
    const double right = (iv.b - mid) / 6.0 * (iv.fm + 4.0 * frm + iv.fb);
    const double refined = left + right;
    const double delta = refined - iv.whole;
    const bool tiny = (iv.b - iv.a) <= 1e-13 * std::max(1.0, std::abs(iv.a));
    if ((iv.depth >= min_depth && std::abs(delta) <= 15.0 * iv.tol) || tiny) {
      out.value += refined + delta / 15.0;
      out.error += std::abs(delta) / 15.0;
      continue;
    }
    if (out.evaluations >= max_evals) {
      out.converged = false;
      out.value += refined + delta / 15.0;
      out.error += std::abs(delta) / 15.0;
      continue;
    }
    // right half pushed first so the left half is processed first
    stack.push_back({mid, iv.b, iv.fm, frm, iv.fb, right, 0.5 * iv.tol, iv.depth + 1});
    stack.push_back({iv.a, mid, iv.fa, flm, iv.fm, left, 0.5 * iv.tol, iv.depth + 1});
  }
  return out;
}

}  // namespace plstab
