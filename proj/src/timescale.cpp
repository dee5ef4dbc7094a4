#include "tsgb/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "tsgb/errors.hpp"
#include "tsgb/kern.hpp"
#include "tsgb/util.hpp"

namespace tsgb {

const char* scale_kind_name(ScaleKind k) {
  switch (k) {
    case ScaleKind::Uniform: return "uniform";
    case ScaleKind::Integer: return "integer";
    case ScaleKind::Hgrid: return "hgrid";
    case ScaleKind::Qgeometric: return "qgeometric";
    case ScaleKind::Explicit: return "explicit";
    case ScaleKind::Hybrid: return "hybrid";
  }
  return "?";
}

ScaleSpec ScaleSpec::uniform(double a, double b, int n) {
  ScaleSpec s;
  s.kind = ScaleKind::Uniform;
  s.a = a;
  s.b = b;
  s.n = n;
  return s;
}

ScaleSpec ScaleSpec::integer(double a, double b) {
  ScaleSpec s;
  s.kind = ScaleKind::Integer;
  s.a = a;
  s.b = b;
  return s;
}

ScaleSpec ScaleSpec::hgrid(double a, double b, double h) {
  ScaleSpec s;
  s.kind = ScaleKind::Hgrid;
  s.a = a;
  s.b = b;
  s.h = h;
  return s;
}

ScaleSpec ScaleSpec::qgeometric(double q, double a, int count) {
  ScaleSpec s;
  s.kind = ScaleKind::Qgeometric;
  s.q = q;
  s.a = a;
  s.count = count;
  return s;
}

ScaleSpec ScaleSpec::explicit_points(std::vector<double> pts) {
  ScaleSpec s;
  s.kind = ScaleKind::Explicit;
  s.points = std::move(pts);
  return s;
}

ScaleSpec ScaleSpec::hybrid(std::vector<HybridSegment> segs) {
  ScaleSpec s;
  s.kind = ScaleKind::Hybrid;
  s.segments = std::move(segs);
  return s;
}

std::string ScaleSpec::describe() const {
  switch (kind) {
    case ScaleKind::Uniform:
      return "uniform(" + format_double(a) + "," + format_double(b) + "," +
             std::to_string(n) + ")";
    case ScaleKind::Integer:
      return "integer(" + format_double(a) + "," + format_double(b) + ")";
    case ScaleKind::Hgrid:
      return "hgrid(" + format_double(a) + "," + format_double(b) + "," +
             format_double(h) + ")";
    case ScaleKind::Qgeometric:
      return "qgeometric(" + format_double(q) + "," + format_double(a) + "," +
             std::to_string(count) + ")";
    case ScaleKind::Explicit:
      return "explicit(" + std::to_string(points.size()) + ")";
    case ScaleKind::Hybrid:
      return "hybrid(" + std::to_string(segments.size()) + ")";
  }
  return "?";
}

namespace {

std::vector<double> generate_points(const ScaleSpec& spec) {
  std::vector<double> pts;
  switch (spec.kind) {
    case ScaleKind::Uniform: {
      if (!(spec.b > spec.a) || spec.n < 1)
        fail(Errc::BadSpec, "uniform scale needs b > a and n >= 1");
      pts.reserve(static_cast<std::size_t>(spec.n) + 1);
      for (int i = 0; i <= spec.n; ++i)
        pts.push_back(spec.a + (spec.b - spec.a) * i / spec.n);
      pts.back() = spec.b;
      break;
    }
    case ScaleKind::Integer: {
      double lo = std::round(spec.a), hi = std::round(spec.b);
      if (std::abs(lo - spec.a) > 1e-9 || std::abs(hi - spec.b) > 1e-9)
        fail(Errc::BadSpec, "integer scale endpoints must be integers");
      if (!(hi > lo)) fail(Errc::BadSpec, "integer scale needs b > a");
      for (double v = lo; v <= hi + 0.5; v += 1.0) pts.push_back(v);
      break;
    }
    case ScaleKind::Hgrid: {
      if (!(spec.h > 0)) fail(Errc::BadSpec, "hgrid step must be positive");
      if (!(spec.b > spec.a)) fail(Errc::BadSpec, "hgrid needs b > a");
      double steps = (spec.b - spec.a) / spec.h;
      double m = std::round(steps);
      if (std::abs(steps - m) > 1e-9 * std::max(1.0, std::abs(steps)))
        fail(Errc::BadSpec, "hgrid span is not a whole number of steps");
      auto nsteps = static_cast<long>(m);
      for (long i = 0; i <= nsteps; ++i) pts.push_back(spec.a + spec.h * i);
      pts.back() = spec.b;
      break;
    }
    case ScaleKind::Qgeometric: {
      if (!(spec.q > 1)) fail(Errc::BadSpec, "qgeometric ratio must exceed 1");
      if (!(spec.a > 0)) fail(Errc::BadSpec, "qgeometric base must be positive");
      if (spec.count < 3)
        fail(Errc::BadSpec, "qgeometric needs at least 3 points");
      double v = spec.a;
      for (int i = 0; i < spec.count; ++i) {
        pts.push_back(v);
        v *= spec.q;
      }
      break;
    }
    case ScaleKind::Explicit:
      pts = spec.points;
      break;
    case ScaleKind::Hybrid: {
      if (spec.segments.empty())
        fail(Errc::BadSpec, "hybrid scale needs at least one segment");
      for (const auto& seg : spec.segments) {
        if (seg.dense) {
          if (!(seg.b > seg.a) || seg.n < 1)
            fail(Errc::BadSpec, "hybrid dense segment needs b > a and n >= 1");
          for (int i = 0; i <= seg.n; ++i)
            pts.push_back(seg.a + (seg.b - seg.a) * i / seg.n);
        } else {
          pts.insert(pts.end(), seg.points.begin(), seg.points.end());
        }
      }
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      break;
    }
  }
  return pts;
}

}  // namespace

TimeScale::TimeScale(ScaleSpec spec, std::vector<double> pts)
    : spec_(std::move(spec)), pts_(std::move(pts)) {
  mu_.resize(pts_.size());
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
    mu_[i] = pts_[i + 1] - pts_[i];
  mu_.back() = 0.0;
}

ScalePtr TimeScale::build(const ScaleSpec& spec) {
  std::vector<double> pts = generate_points(spec);
  if (pts.size() < 3)
    fail(Errc::EmptyScale, "a scale needs at least 3 points, got " +
                               std::to_string(pts.size()));
  for (double v : pts)
    if (!std::isfinite(v)) fail(Errc::NonFinite, "scale point is not finite");
  double span = pts.back() - pts.front();
  if (!(span > 0)) fail(Errc::NonMonotone, "scale points are not increasing");
  double dup_tol = tol::dup_points * span;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] - pts[i] > dup_tol))
      fail(Errc::NonMonotone,
           "scale points not strictly increasing near index " +
               std::to_string(i) + " (t = " + format_double(pts[i]) + ")");
  }
  return ScalePtr(new TimeScale(spec, std::move(pts)));
}

std::size_t TimeScale::index_of(double t) const {
  auto it = std::lower_bound(pts_.begin(), pts_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - pts_.begin());
  // Candidate nearest indices: i and i-1.
  std::size_t best = i < pts_.size() ? i : pts_.size() - 1;
  if (i > 0 && (i == pts_.size() ||
                std::abs(pts_[i - 1] - t) < std::abs(pts_[i] - t)))
    best = i - 1;
  if (std::abs(pts_[best] - t) > tol::point_snap * span())
    fail(Errc::PointNotInScale,
         "t = " + format_double(t) + " is not a scale point");
  return best;
}

GridFunction::GridFunction(ScalePtr scale, std::vector<double> values)
    : scale_(std::move(scale)), vals_(std::move(values)) {
  if (!scale_) fail(Errc::BadSpec, "grid function needs a scale");
  if (vals_.size() != scale_->size())
    fail(Errc::BadSpec, "grid function length " + std::to_string(vals_.size()) +
                            " does not match scale size " +
                            std::to_string(scale_->size()));
  for (double v : vals_)
    if (!std::isfinite(v))
      fail(Errc::NonFinite, "grid function value is not finite");
}

GridFunction GridFunction::constant(ScalePtr scale, double c) {
  std::vector<double> v(scale->size(), c);
  return GridFunction(std::move(scale), std::move(v));
}

double delta_integral_idx(const GridFunction& gf, std::size_t from,
                          std::size_t to) {
  if (from > to) fail(Errc::ReversedRange, "integral range is reversed");
  const auto& mu = gf.scale()->mu_all();
  return kern::dot(mu.data() + from, gf.values().data() + from, to - from);
}

double delta_integral(const GridFunction& gf, double from, double to) {
  const auto& ts = *gf.scale();
  return delta_integral_idx(gf, ts.index_of(from), ts.index_of(to));
}

double delta_derivative_idx(const GridFunction& gf, std::size_t i) {
  const auto& ts = *gf.scale();
  if (i + 1 >= ts.size())
    fail(Errc::NotInKappa, "delta derivative undefined at the maximum point");
  return (gf[i + 1] - gf[i]) / ts.mu_at(i);
}

double delta_derivative(const GridFunction& gf, double t) {
  return delta_derivative_idx(gf, gf.scale()->index_of(t));
}

double ts_exponential_idx(const GridFunction& f, std::size_t it,
                          std::size_t is) {
  const auto& ts = *f.scale();
  if (is > it) return 1.0 / ts_exponential_idx(f, is, it);
  double prod = 1.0;
  for (std::size_t j = is; j < it; ++j) {
    double factor = 1.0 + ts.mu_at(j) * f[j];
    if (factor == 0.0)
      fail(Errc::NotRegressive, "1 + mu·f vanishes at t = " +
                                    format_double(ts.at(j)));
    prod *= factor;
  }
  return prod;
}

double ts_exponential(const GridFunction& f, double t, double s) {
  const auto& ts = *f.scale();
  return ts_exponential_idx(f, ts.index_of(t), ts.index_of(s));
}

ScalePtr refine(const ScaleSpec& spec, int factor) {
  if (factor < 1) fail(Errc::BadSpec, "refinement factor must be >= 1");
  switch (spec.kind) {
    case ScaleKind::Uniform: {
      ScaleSpec r = spec;
      r.n = spec.n * factor;
      return TimeScale::build(r);
    }
    case ScaleKind::Hybrid: {
      ScaleSpec r = spec;
      for (auto& seg : r.segments)
        if (seg.dense) seg.n *= factor;
      return TimeScale::build(r);
    }
    default:
      fail(Errc::NotRefinable,
           std::string(scale_kind_name(spec.kind)) +
               " scales model their point set exactly and cannot be refined");
  }
}

}  // namespace tsgb
