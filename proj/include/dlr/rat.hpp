#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dlr {

struct overflow_error : std::runtime_error {
  explicit overflow_error(const std::string& m) : std::runtime_error(m) {}
};

inline int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw overflow_error("int64 add overflow");
  return r;
}

inline int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("int64 mul overflow");
  return r;
}

// Exact rational on int64, always normalized (gcd 1, positive denominator).
struct Rat {
  int64_t num = 0;
  int64_t den = 1;

  Rat() = default;
  Rat(int64_t n) : num(n), den(1) {}
  Rat(int64_t n, int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::runtime_error("Rat: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }

  bool is_zero() const { return num == 0; }
  bool is_integer() const { return den == 1; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    int64_t g = std::gcd(a.den, b.den);
    int64_t bd = b.den / g;
    int64_t n = checked_add(checked_mul(a.num, bd), checked_mul(b.num, a.den / g));
    int64_t d = checked_mul(a.den, bd);
    return Rat(n, d);
  }
  friend Rat operator-(const Rat& a, const Rat& b) { return a + Rat(-b.num, b.den); }
  friend Rat operator-(const Rat& a) { return Rat(-a.num, a.den); }
  friend Rat operator*(const Rat& a, const Rat& b) {
    int64_t g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
    int64_t g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
    return Rat(checked_mul(a.num / g1, b.num / g2),
               checked_mul(a.den / g2, b.den / g1));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw std::runtime_error("Rat: division by zero");
    return a * Rat(b.den, b.num);
  }
  Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
  Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
  Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    // safe compare via 128-bit cross products
    __int128 l = (__int128)a.num * b.den;
    __int128 r = (__int128)b.num * a.den;
    return l < r;
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

}  // namespace dlr
