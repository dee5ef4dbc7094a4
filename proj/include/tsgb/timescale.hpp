#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace tsgb {

// How a scale was generated. Closed-form reference engines only accept the
// exact kinds they model; refinement only applies to dense kinds.
enum class ScaleKind { Uniform, Integer, Hgrid, Qgeometric, Explicit, Hybrid };

const char* scale_kind_name(ScaleKind k);

// One segment of a hybrid scale: either a densely sampled interval or a set
// of isolated points.
struct HybridSegment {
  bool dense = false;
  double a = 0, b = 0;  // dense only
  int n = 0;            // dense only: subinterval count
  std::vector<double> points;  // isolated only
};

// Declarative description of a scale; the only constructor input. Kept next
// to the built scale so refinement can re-generate.
struct ScaleSpec {
  ScaleKind kind = ScaleKind::Explicit;
  double a = 0, b = 0;  // uniform/integer/hgrid endpoints
  int n = 0;            // uniform: subinterval count (points = n+1)
  double h = 0;         // hgrid step
  double q = 0;         // qgeometric ratio (> 1)
  int count = 0;        // qgeometric point count
  std::vector<double> points;           // explicit
  std::vector<HybridSegment> segments;  // hybrid

  static ScaleSpec uniform(double a, double b, int n);
  static ScaleSpec integer(double a, double b);
  static ScaleSpec hgrid(double a, double b, double h);
  static ScaleSpec qgeometric(double q, double a, int count);
  static ScaleSpec explicit_points(std::vector<double> pts);
  static ScaleSpec hybrid(std::vector<HybridSegment> segs);

  // Compact descriptor, e.g. "integer(0,12)" — used in sweep summaries.
  std::string describe() const;
};

// A finite strictly increasing point set with the jump operators of the
// delta calculus. Immutable after construction.
class TimeScale {
 public:
  static std::shared_ptr<const TimeScale> build(const ScaleSpec& spec);

  const std::vector<double>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  double min() const { return pts_.front(); }
  double max() const { return pts_.back(); }
  double span() const { return pts_.back() - pts_.front(); }
  ScaleKind kind() const { return spec_.kind; }
  const ScaleSpec& spec() const { return spec_; }

  double at(std::size_t i) const { return pts_[i]; }

  // Nearest-point lookup: snaps within 1e-9·span, errors beyond that.
  std::size_t index_of(double t) const;

  // Jump operators by index. sigma(last) = last, rho(first) = first.
  std::size_t sigma_index(std::size_t i) const {
    return i + 1 < pts_.size() ? i + 1 : i;
  }
  std::size_t rho_index(std::size_t i) const { return i > 0 ? i - 1 : 0; }
  double sigma(double t) const { return pts_[sigma_index(index_of(t))]; }
  double rho(double t) const { return pts_[rho_index(index_of(t))]; }
  double mu(double t) const { return mu_at(index_of(t)); }
  double mu_at(std::size_t i) const {
    return i + 1 < pts_.size() ? pts_[i + 1] - pts_[i] : 0.0;
  }
  const std::vector<double>& mu_all() const { return mu_; }

 private:
  TimeScale(ScaleSpec spec, std::vector<double> pts);
  ScaleSpec spec_;
  std::vector<double> pts_;
  std::vector<double> mu_;  // mu_[i] = pts_[i+1]-pts_[i], last entry 0
};

using ScalePtr = std::shared_ptr<const TimeScale>;

// Values sampled at every point of a scale.
class GridFunction {
 public:
  GridFunction(ScalePtr scale, std::vector<double> values);
  static GridFunction constant(ScalePtr scale, double c);

  const ScalePtr& scale() const { return scale_; }
  const std::vector<double>& values() const { return vals_; }
  double operator[](std::size_t i) const { return vals_[i]; }
  double at_point(double t) const { return vals_[scale_->index_of(t)]; }
  std::size_t size() const { return vals_.size(); }

 private:
  ScalePtr scale_;
  std::vector<double> vals_;
};

// Exact Cauchy delta integral over [from, to): the sum of mu·f over the
// half-open index range.
double delta_integral(const GridFunction& gf, double from, double to);
double delta_integral_idx(const GridFunction& gf, std::size_t from,
                          std::size_t to);

// (f(sigma(t)) - f(t)) / mu(t); only defined off the maximum point.
double delta_derivative(const GridFunction& gf, double t);
double delta_derivative_idx(const GridFunction& gf, std::size_t i);

// Product-formula exponential: e_f(t,s) = prod over [s,t) of (1 + mu·f),
// extended by reciprocal for s > t. Errors if a factor vanishes.
double ts_exponential(const GridFunction& f, double t, double s);
double ts_exponential_idx(const GridFunction& f, std::size_t it,
                          std::size_t is);

// Rebuild with each dense segment subdivided `factor` times. Only uniform
// and hybrid specs are refinable.
ScalePtr refine(const ScaleSpec& spec, int factor);

}  // namespace tsgb
