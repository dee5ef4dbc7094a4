#pragma once

#include <cstddef>
#include <string>

// Low-level contraction kernels used by the integrators. Each primitive has a
// scalar reference implementation and, where the build and host support it, an
// AVX2 variant. The active implementation is chosen once at startup and can be
// forced (e.g. for equivalence tests) via kern::force.
namespace tsgb::kern {

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i a[i] * b[i] * c[i]
double dot3(const double* a, const double* b, const double* c, std::size_t n);

// out[i] = a[i] * b[i]
void mul(const double* a, const double* b, double* out, std::size_t n);

// sum_i a[i]
double sum(const double* a, std::size_t n);

// Name of the implementation currently in use: "scalar" or "avx2".
const char* active();

// True if the avx2 path was compiled in and the host supports it.
bool available_avx2();

// Force a specific implementation ("scalar" or "avx2"); throws on a name that
// is unknown or unavailable on this host. Intended for tests and the CLI's
// --kernels flag.
void force(const std::string& name);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double dot3_scalar(const double* a, const double* b, const double* c,
                   std::size_t n);
void mul_scalar(const double* a, const double* b, double* out, std::size_t n);
double sum_scalar(const double* a, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
#define TSGB_HAVE_AVX2_TU 1
double dot_avx2(const double* a, const double* b, std::size_t n);
double dot3_avx2(const double* a, const double* b, const double* c,
                 std::size_t n);
void mul_avx2(const double* a, const double* b, double* out, std::size_t n);
double sum_avx2(const double* a, std::size_t n);
#endif
}  // namespace detail

}  // namespace tsgb::kern
