#pragma once

// Shared helpers for the test suite: deterministic random draws over small
// rationals and terse constructors for fixtures.

#include <array>
#include <cstdint>
#include <random>

#include <trifocal/trifocal.hpp>

namespace testutil {

using trifocal::BigInt;
using trifocal::Camera;
using trifocal::Mat3;
using trifocal::Rational;
using trifocal::TrifocalTensor;
using trifocal::Vec3;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Rational rational() { return Rational(BigInt(uniform(-20, 20)), BigInt(uniform(1, 20))); }

  Rational nonzero_rational() {
    for (;;) {
      Rational r = rational();
      if (!trifocal::is_zero(r)) return r;
    }
  }

  Vec3<Rational> vec3() { return Vec3<Rational>(rational(), rational(), rational()); }

  Mat3<Rational> mat3() {
    Mat3<Rational> m;
    for (auto& x : m.e) x = rational();
    return m;
  }

  TrifocalTensor<Rational> tensor27() { return TrifocalTensor<Rational>(mat3(), mat3(), mat3()); }

  Camera<Rational> camera() {
    for (;;) {
      std::array<Rational, 12> e;
      for (auto& x : e) x = rational();
      try {
        return Camera<Rational>(e);
      } catch (const trifocal::DegeneracyError&) {
        continue;
      }
    }
  }

 private:
  std::mt19937_64 gen_;
};

inline Rational frac(long long n, long long d = 1) { return Rational(BigInt(n), BigInt(d)); }

inline Vec3<Rational> v3(long long a, long long b, long long c) {
  return Vec3<Rational>(frac(a), frac(b), frac(c));
}

inline Mat3<Rational> m3(long long a, long long b, long long c, long long d, long long e,
                         long long f, long long g, long long h, long long i) {
  return Mat3<Rational>::from_rows(v3(a, b, c), v3(d, e, f), v3(g, h, i));
}

inline Mat3<Rational> diag3(long long a, long long b, long long c) {
  Mat3<Rational> m;
  m(0, 0) = frac(a);
  m(1, 1) = frac(b);
  m(2, 2) = frac(c);
  return m;
}

inline Camera<Rational> camera_from(std::array<long long, 12> e) {
  std::array<Rational, 12> r;
  for (int i = 0; i < 12; ++i) r[static_cast<std::size_t>(i)] = frac(e[static_cast<std::size_t>(i)]);
  return Camera<Rational>(r);
}

}  // namespace testutil
