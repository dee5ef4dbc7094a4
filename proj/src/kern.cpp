#include "tsgb/kern.hpp"

#include "tsgb/errors.hpp"

namespace tsgb::kern {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double dot3_scalar(const double* a, const double* b, const double* c,
                   std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i] * c[i];
  return acc;
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

}  // namespace detail

namespace {

struct Impl {
  double (*dot)(const double*, const double*, std::size_t);
  double (*dot3)(const double*, const double*, const double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  const char* name;
};

constexpr Impl kScalar{detail::dot_scalar, detail::dot3_scalar,
                       detail::mul_scalar, detail::sum_scalar, "scalar"};

#ifdef TSGB_HAVE_AVX2_TU
constexpr Impl kAvx2{detail::dot_avx2, detail::dot3_avx2, detail::mul_avx2,
                     detail::sum_avx2, "avx2"};

bool host_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const Impl* pick_default() {
#ifdef TSGB_HAVE_AVX2_TU
  if (host_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const Impl* g_impl = pick_default();

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return g_impl->dot(a, b, n);
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  return g_impl->dot3(a, b, c, n);
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  g_impl->mul(a, b, out, n);
}

double sum(const double* a, std::size_t n) { return g_impl->sum(a, n); }

const char* active() { return g_impl->name; }

bool available_avx2() {
#ifdef TSGB_HAVE_AVX2_TU
  return host_has_avx2();
#else
  return false;
#endif
}

void force(const std::string& name) {
  if (name == "scalar") {
    g_impl = &kScalar;
    return;
  }
  if (name == "avx2") {
#ifdef TSGB_HAVE_AVX2_TU
    if (host_has_avx2()) {
      g_impl = &kAvx2;
      return;
    }
#endif
    fail(Errc::BadSpec, "avx2 kernels unavailable on this host");
  }
  if (name == "auto") {
    g_impl = pick_default();
    return;
  }
  fail(Errc::BadSpec, "unknown kernel implementation '" + name + "'");
}

}  // namespace tsgb::kern
