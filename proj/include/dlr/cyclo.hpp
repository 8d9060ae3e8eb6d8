#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dlr/rat.hpp"

namespace dlr {

// Per-conductor data: the cyclotomic polynomial and rewrite rows expressing
// x^e (e up to max(N, 2*phi-1)) in the power basis x^0..x^{phi-1} mod Phi_N.
struct ConductorData {
  uint32_t N = 1;
  uint32_t phi = 1;
  std::vector<int64_t> cyclo_poly;            // Phi_N, monic, degree phi
  std::vector<std::vector<int64_t>> rewrite;  // rewrite[e], size phi
};

const ConductorData& conductor_data(uint32_t N);
uint32_t euler_phi(uint32_t n);

// Element of Q(zeta_N) in the power basis with one common denominator.
// Canonical: den >= 1, gcd(den, content(num)) = 1, num.size() == phi(N).
class CycloNum {
 public:
  CycloNum() : n_(1), den_(1), num_(1, 0) {}
  explicit CycloNum(const Rat& r) : n_(1), den_(r.den), num_(1, r.num) {}
  explicit CycloNum(int64_t v) : n_(1), den_(1), num_(1, v) {}

  static CycloNum root_of_unity(uint32_t N, int64_t k);
  static CycloNum zero() { return CycloNum(); }
  static CycloNum one() { return CycloNum(int64_t{1}); }
  // Sum of counts[k] * zeta_N^k, built in one reduction pass.
  static CycloNum from_root_histogram(uint32_t N, const std::vector<int64_t>& counts);

  uint32_t conductor() const { return n_; }
  const std::vector<int64_t>& num() const { return num_; }
  int64_t den() const { return den_; }

  bool is_zero() const;
  bool is_rational() const;
  Rat as_rat() const;        // throws if not rational
  int64_t as_integer() const;  // throws if not a rational integer

  CycloNum promoted(uint32_t M) const;  // n_ must divide M

  friend CycloNum operator+(const CycloNum& a, const CycloNum& b);
  friend CycloNum operator-(const CycloNum& a, const CycloNum& b);
  friend CycloNum operator-(const CycloNum& a);
  friend CycloNum operator*(const CycloNum& a, const CycloNum& b);
  CycloNum& operator+=(const CycloNum& o) { *this = *this + o; return *this; }
  CycloNum& operator-=(const CycloNum& o) { *this = *this - o; return *this; }
  CycloNum& operator*=(const CycloNum& o) { *this = *this * o; return *this; }

  CycloNum scaled(const Rat& r) const;
  CycloNum conj() const;       // complex conjugation
  Rat abs2() const;            // x * conj(x), must be rational
  CycloNum inverse() const;    // throws on zero
  CycloNum pow(int64_t k) const;

  friend bool operator==(const CycloNum& a, const CycloNum& b);
  friend bool operator!=(const CycloNum& a, const CycloNum& b) { return !(a == b); }

  // If the value is a root of unity, return true and set (order, exponent)
  // with value == zeta_order^exponent and order minimal.
  bool as_root_of_unity(uint32_t* order, uint32_t* exponent) const;

  // "N:[c0,c1,...]" with exact rational coefficients.
  std::string str() const;

 private:
  CycloNum(uint32_t N, int64_t den, std::vector<int64_t> num)
      : n_(N), den_(den), num_(std::move(num)) {
    normalize();
  }
  void normalize();

  uint32_t n_;
  int64_t den_;
  std::vector<int64_t> num_;
};

}  // namespace dlr
