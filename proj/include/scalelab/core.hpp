#pragma once

// Shared plumbing: dimension descriptor, error taxonomy, deterministic
// formatting/hashing helpers, compensated summation.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scalelab {

// ---------------------------------------------------------------------------
// errors

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition violated by a caller (bad argument, mismatched rules, ...).
struct ValidationError : Error {
  using Error::Error;
};

// Discretization cannot support the requested computation (tail mass beyond
// the covered window, aliasing, scan failure). Messages carry a suggestion.
struct QuadratureError : Error {
  using Error::Error;
};

// Config file rejected before any computation ran.
struct ConfigError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// dimensions

// Spatial dimension s of the model; spacetime dimension is s+1.
struct Dims {
  int s = 3;

  constexpr int spacetime() const { return s + 1; }

  void validate() const {
    if (s != 2 && s != 3)
      throw ValidationError("Dims: spatial dimension must be 2 or 3, got " +
                            std::to_string(s));
  }
};

inline bool operator==(Dims a, Dims b) { return a.s == b.s; }

// ---------------------------------------------------------------------------
// deterministic helpers

namespace detail {

// FNV-1a, the 64-bit variant. Used for config hashes and rule fingerprints;
// stability across platforms matters more than collision strength here.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

// Scientific notation with exactly 12 significant digits, locale-independent
// ('.' decimal separator is guaranteed by snprintf in the "C" locale family
// we never switch away from). Used for every numeric cell we emit.
inline std::string sci12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

inline std::string hex16(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Kahan-Neumaier compensated accumulator. Quadrature sums run over ~1e6
// terms; plain summation would still clear our tolerances, but the margin
// is cheap and the order is fixed, so results stay bit-reproducible.
struct KahanSum {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

struct KahanCSum {
  KahanSum re, im;

  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

// Mixes a textual tag into a master seed; gives each experiment cell its own
// deterministic RNG stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = fnv1a64(tag);
  // splitmix64 finalizer on the xor, so nearby tags decorrelate
  std::uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

}  // namespace scalelab
