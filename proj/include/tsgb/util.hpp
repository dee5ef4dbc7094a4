#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace tsgb {

// Central numeric tolerances. Values are part of the engine's contract and
// referenced from tests; change with care.
namespace tol {
inline constexpr double quad = 1e-12;          // adaptive Simpson, abs+rel
inline constexpr int quad_max_depth = 60;
inline constexpr double invert_rel = 1e-13;    // bisection width, relative in x
inline constexpr int invert_max_iter = 200;
inline constexpr int plateau_window = 8;       // consecutive flat doublings
inline constexpr double plateau_eps = 1e-13;   // growth per doubling
inline constexpr double cert = 1e-9;           // property-check comparisons
inline constexpr double point_snap = 1e-9;     // point lookup, relative to span
inline constexpr double dup_points = 1e-12;    // duplicate detection, rel span
inline constexpr double overflow_u = 1e100;    // equality-synthesis cutoff
inline constexpr double overflow_ivp = 1e150;  // IVP trajectory cutoff
}  // namespace tol

// Deterministic PRNG. mt19937_64 output mapping to doubles is done by hand so
// that streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [lo, hi).
  double real(double lo, double hi) {
    double u = static_cast<double>(bits() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // Uniform integer in [lo, hi] inclusive.
  int integer(int lo, int hi) {
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(bits() % span);
  }

  // Derive an independent child seed; used so instance k of a sweep does not
  // depend on how many draws earlier instances consumed.
  std::uint64_t child_seed() { return bits() ^ 0x9e3779b97f4a7c15ull; }

 private:
  std::mt19937_64 eng_;
};

// Shortest round-trip decimal form (std::to_chars); the one true way numbers
// enter CSV output and generated expression strings.
std::string format_double(double v);

std::string format_bool(bool v);

}  // namespace tsgb
