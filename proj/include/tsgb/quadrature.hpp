#pragma once

#include <functional>
#include <vector>

#include "tsgb/util.hpp"

namespace tsgb {

// Adaptive composite Simpson with interval bisection. Tolerance is applied
// as max(tol, tol·|estimate|); the classic (S2-S1)/15 correction is added.
double adaptive_simpson(const std::function<double(double)>& f, double lo,
                        double hi, double tol = tol::quad,
                        int max_depth = tol::quad_max_depth);

struct InvertSettings {
  double quad_tol = tol::quad;
  int quad_max_depth = tol::quad_max_depth;
  double invert_rel = tol::invert_rel;
  int invert_max_iter = tol::invert_max_iter;
  int plateau_window = tol::plateau_window;
  double plateau_eps = tol::plateau_eps;
  int max_doublings = 300;
};

// A strictly increasing transform V(x) = integral of a positive integrand
// from x0 to x, with numeric inversion and range-supremum detection.
//
// V is evaluated over a fixed dyadic segmentation anchored at x0 (segment
// integrals are cached), so V(x) is a pure function of x — independent of
// the order of previous calls. This matters: two engines computing the same
// transform must see identical values.
//
// Not thread-safe (lazy segment cache); use one instance per computation.
class MonotoneTransform {
 public:
  MonotoneTransform(std::function<double(double)> integrand, double x0,
                    InvertSettings settings = {});

  double base() const { return x0_; }

  // V(x); x must be positive.
  double value(double x) const;

  struct Inverse {
    bool ok = false;    // false: y is beyond the detected range supremum
    double x = 0;
  };

  // Bracket by doubling/halving from x0, then bisect. ok=false realizes the
  // "argument outside Dom(V^-1)" side condition.
  Inverse try_inverse(double y) const;

  // As try_inverse but throws DomainExceeded instead of returning ok=false.
  double inverse(double y) const;

 private:
  double seg_up(int k) const;    // integral over [x0·2^(k-1), x0·2^k]
  double seg_down(int k) const;  // integral over [x0/2^k, x0/2^(k-1)]

  std::function<double(double)> f_;
  double x0_;
  InvertSettings set_;
  mutable std::vector<double> up_, down_;  // cached segment integrals
};

}  // namespace tsgb
