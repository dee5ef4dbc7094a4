// Closed-form reference engines for the two lattice specializations. Every
// delta integral collapses to a plain sum with the literal step in front and
// the growth factor to an explicit product, so these loops never touch the
// graininess machinery; they share only the scalar maps, kernel samples and
// the monotone transform with the generic engine. Used as oracles.

#include <cmath>
#include <limits>
#include <vector>

#include "tsgb/bounds.hpp"
#include "tsgb/errors.hpp"
#include "tsgb/util.hpp"

namespace tsgb {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

BoundReport lattice_engine(const ProblemInstance& inst, double step) {
  const ScalePtr& scale = inst.scale();
  const std::size_t n = scale->size();
  const bool sep = form_is_separable(inst.form());
  const bool sform = form_is_class_s(inst.form());
  const std::vector<double>& f = inst.f_fn().values();
  const std::vector<double>& a = inst.a_fn().values();

  // Growth factor. Plain forms: the nested product-sum display,
  //   p_i = 1 + step * sum_{j<i} f_j * prod_{m=j+1}^{i-1} (1 + step f_m).
  // Class-S forms: q_i from the g-transform of the plain f sum.
  std::vector<double> growth(n, kNan);
  std::vector<char> growth_ok(n, 1);
  bool needed_ok = true;
  std::size_t first_bad = 0;
  if (!sform) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        double prod = 1.0;
        for (std::size_t m = j + 1; m < i; ++m) prod *= 1.0 + step * f[m];
        acc += f[j] * prod;
      }
      growth[i] = 1.0 + step * acc;
      if (!std::isfinite(growth[i]))
        fail(Errc::Overflow,
             "growth factor overflows at t=" + format_double(scale->at(i)));
    }
  } else {
    MonotoneTransform G = make_g_transform(inst.g(), inst.delta0());
    const double g1 = G.value(1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double fsum = 0.0;
      for (std::size_t j = 0; j < i; ++j) fsum += f[j];
      MonotoneTransform::Inverse inv = G.try_inverse(g1 + step * fsum);
      growth_ok[i] = inv.ok ? 1 : 0;
      if (inv.ok) {
        growth[i] = inv.x;
      } else if (needed_ok && i + 2 < n) {
        needed_ok = false;
        first_bad = i;
      }
    }
  }

  std::vector<double> lead(n), ow(n);
  for (std::size_t i = 0; i < n; ++i) {
    lead[i] = sform ? std::max(a[i], 1.0) : a[i];
    ow[i] = sep ? f[i] * inst.h_fn().values()[i] : f[i];
  }

  BoundReport rep;
  rep.form = inst.form();
  rep.growth = growth;
  if (!needed_ok) {
    rep.constant = kNan;
    rep.psi_of_constant = kNan;
    rep.any_out_of_domain = true;
    rep.first_out_t = scale->at(first_bad);
    rep.points.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      rep.points[i] =
          BoundPoint{scale->at(i), kNan, false, false, growth_ok[i] != 0};
    return rep;
  }

  // Constant: step * sum_{j=0}^{n-3} weight_j Phi(growth_j lead_j), with the
  // weight either b_j or the kernel evaluated one step below the maximum.
  double zc = 0.0;
  for (std::size_t j = 0; j + 2 < n; ++j) {
    const double weight =
        sep ? inst.b_fn().values()[j] : inst.kernel().k(n - 2, j);
    zc += weight * inst.Phi()(growth[j] * lead[j]);
  }
  zc *= step;
  if (!std::isfinite(zc)) fail(Errc::Overflow, "bound constant overflows");
  if (zc <= 0.0)
    fail(Errc::NonpositiveZeta,
         "bound constant is not positive: " + format_double(zc));

  MonotoneTransform trans = make_psi(inst.Phi(), inst.W(), inst.x0());
  const double psi_zc = trans.value(zc);

  // Middle sums and their inversions for every s that feeds a bound value.
  std::vector<char> inv_ok(n, 1);
  std::vector<double> winv(n, kNan);
  for (std::size_t s = 0; s + 1 < n; ++s) {
    double mid = 0.0;
    for (std::size_t tau = 0; tau < s; ++tau) {
      double fw = 0.0;
      for (std::size_t j = 0; j < tau; ++j) fw += ow[j];
      const double weight =
          sep ? inst.b_fn().values()[tau] : inst.kernel().k(s, tau);
      mid += weight * inst.Phi()(growth[tau]) * inst.Phi()(step * fw);
    }
    mid *= step;
    if (!std::isfinite(mid)) fail(Errc::Overflow, "middle sum overflows");
    MonotoneTransform::Inverse inv = trans.try_inverse(psi_zc + mid);
    inv_ok[s] = inv.ok ? 1 : 0;
    if (inv.ok) winv[s] = inst.W()(inv.x);
  }

  rep.constant = zc;
  rep.psi_of_constant = psi_zc;
  rep.points.resize(n);
  double outer = 0.0;
  bool prefix_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    BoundPoint& pt = rep.points[i];
    pt.t = scale->at(i);
    pt.g_ok = growth_ok[i] != 0;
    pt.rho_ok = inv_ok[i == 0 ? 0 : i - 1] != 0;
    pt.in_domain = prefix_ok && pt.g_ok;
    if (pt.in_domain) {
      pt.bound = growth[i] * lead[i] + growth[i] * step * outer;
      if (!std::isfinite(pt.bound))
        fail(Errc::Overflow, "bound overflows at t=" + format_double(pt.t));
    } else {
      pt.bound = kNan;
      if (!rep.any_out_of_domain) {
        rep.any_out_of_domain = true;
        rep.first_out_t = pt.t;
      }
    }
    if (i + 1 < n) {
      if (inv_ok[i])
        outer += ow[i] * winv[i];
      else
        prefix_ok = false;
    }
  }
  return rep;
}

}  // namespace

BoundReport bound_integer_oracle(const ProblemInstance& inst) {
  if (inst.scale()->kind() != ScaleKind::Integer)
    fail(Errc::WrongScaleKind,
         "integer oracle needs an integer scale, got " +
             std::string(scale_kind_name(inst.scale()->kind())));
  return lattice_engine(inst, 1.0);
}

BoundReport bound_hgrid_oracle(const ProblemInstance& inst) {
  if (inst.scale()->kind() != ScaleKind::Hgrid)
    fail(Errc::WrongScaleKind,
         "hgrid oracle needs an hgrid scale, got " +
             std::string(scale_kind_name(inst.scale()->kind())));
  return lattice_engine(inst, inst.scale()->spec().h);
}

}  // namespace tsgb
