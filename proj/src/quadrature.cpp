#include "tsgb/quadrature.hpp"

#include <cmath>

#include "tsgb/errors.hpp"

namespace tsgb {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double s2 = left + right;
  double err = s2 - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * std::max(tol, tol * std::abs(s2)))
    return s2 + err / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo,
                        double hi, double tol, int max_depth) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (lo > hi) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  double flo = f(lo), fhi = f(hi);
  double m = 0.5 * (lo + hi), fm = f(m);
  double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
  return sign * simpson_rec(f, lo, flo, hi, fhi, m, fm, whole, tol, max_depth);
}

MonotoneTransform::MonotoneTransform(std::function<double(double)> integrand,
                                     double x0, InvertSettings settings)
    : f_(std::move(integrand)), x0_(x0), set_(settings) {
  if (!(x0 > 0))
    fail(Errc::NonpositiveInput, "transform base point must be positive");
}

double MonotoneTransform::seg_up(int k) const {
  while (static_cast<int>(up_.size()) < k) {
    int j = static_cast<int>(up_.size()) + 1;
    double a = x0_ * std::ldexp(1.0, j - 1);
    double b = x0_ * std::ldexp(1.0, j);
    up_.push_back(adaptive_simpson(f_, a, b, set_.quad_tol, set_.quad_max_depth));
  }
  return up_[static_cast<std::size_t>(k) - 1];
}

double MonotoneTransform::seg_down(int k) const {
  while (static_cast<int>(down_.size()) < k) {
    int j = static_cast<int>(down_.size()) + 1;
    double a = x0_ * std::ldexp(1.0, -j);
    double b = x0_ * std::ldexp(1.0, -(j - 1));
    down_.push_back(
        adaptive_simpson(f_, a, b, set_.quad_tol, set_.quad_max_depth));
  }
  return down_[static_cast<std::size_t>(k) - 1];
}

double MonotoneTransform::value(double x) const {
  if (!(x > 0))
    fail(Errc::NonpositiveInput,
         "transform evaluated at nonpositive x = " + format_double(x));
  if (x == x0_) return 0.0;
  if (x > x0_) {
    // Whole dyadic octaves above x0, then a partial piece.
    int k = 0;
    double anchor = x0_;
    double acc = 0.0;
    while (anchor * 2.0 <= x) {
      ++k;
      acc += seg_up(k);
      anchor = x0_ * std::ldexp(1.0, k);
    }
    return acc + adaptive_simpson(f_, anchor, x, set_.quad_tol,
                                  set_.quad_max_depth);
  }
  int k = 0;
  double anchor = x0_;
  double acc = 0.0;
  while (anchor * 0.5 >= x) {
    ++k;
    acc -= seg_down(k);
    anchor = x0_ * std::ldexp(1.0, -k);
  }
  return acc - adaptive_simpson(f_, x, anchor, set_.quad_tol,
                                set_.quad_max_depth);
}

MonotoneTransform::Inverse MonotoneTransform::try_inverse(double y) const {
  double lo, hi, vlo, vhi;
  if (y >= 0) {
    lo = x0_;
    vlo = 0.0;
    hi = x0_;
    vhi = 0.0;
    int flat = 0;
    int iter = 0;
    while (vhi < y) {
      if (++iter > set_.max_doublings)
        fail(Errc::Overflow,
             "inversion target " + format_double(y) +
                 " not bracketed after " + std::to_string(set_.max_doublings) +
                 " doublings");
      lo = hi;
      vlo = vhi;
      hi *= 2.0;
      vhi = value(hi);
      double growth = vhi - vlo;
      flat = growth < set_.plateau_eps ? flat + 1 : 0;
      if (flat >= set_.plateau_window && vhi < y) return {false, hi};
    }
  } else {
    hi = x0_;
    vhi = 0.0;
    lo = x0_;
    vlo = 0.0;
    int flat = 0;
    int iter = 0;
    while (vlo > y) {
      if (++iter > set_.max_doublings || lo < 1e-300) return {false, lo};
      hi = lo;
      vhi = vlo;
      lo *= 0.5;
      vlo = value(lo);
      double drop = vhi - vlo;
      flat = drop < set_.plateau_eps ? flat + 1 : 0;
      if (flat >= set_.plateau_window && vlo > y) return {false, lo};
    }
  }
  // vlo <= y <= vhi; bisect to relative width in x.
  for (int i = 0; i < set_.invert_max_iter && hi - lo > set_.invert_rel * hi;
       ++i) {
    double mid = 0.5 * (lo + hi);
    if (value(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return {true, 0.5 * (lo + hi)};
}

double MonotoneTransform::inverse(double y) const {
  Inverse r = try_inverse(y);
  if (!r.ok)
    fail(Errc::DomainExceeded,
         "inverse target " + format_double(y) +
             " lies beyond the transform's range");
  return r.x;
}

}  // namespace tsgb
