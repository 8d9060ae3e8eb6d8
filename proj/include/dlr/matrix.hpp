#pragma once

#include <vector>

#include "dlr/chainring.hpp"

namespace dlr {

// Dense matrix over one chain ring. Square unless stated otherwise.
struct Mat {
  const Ring* ring = nullptr;
  int n = 0;
  std::vector<RElem> a;

  Mat() = default;
  Mat(const Ring& r, int size) : ring(&r), n(size), a((size_t)size * size, r.zero()) {}

  RElem& at(int i, int j) { return a[(size_t)i * n + j]; }
  const RElem& at(int i, int j) const { return a[(size_t)i * n + j]; }

  static Mat identity(const Ring& r, int size);

  bool operator==(const Mat& o) const;
  bool operator!=(const Mat& o) const { return !(*this == o); }
  bool operator<(const Mat& o) const;  // lexicographic, deterministic picks
};

Mat mat_add(const Mat& x, const Mat& y);
Mat mat_sub(const Mat& x, const Mat& y);
Mat mat_mul(const Mat& x, const Mat& y);
Mat mat_scalar_mul(const RElem& c, const Mat& x);
RElem mat_trace(const Mat& x);
RElem mat_det(const Mat& x);  // Leibniz, for small n
bool mat_is_identity(const Mat& x);
Mat mat_inverse(const Mat& x);  // throws if not invertible
bool mat_invertible(const Mat& x);
Mat mat_conjugate(const Mat& g, const Mat& x);  // g^{-1} x g
Mat mat_commutator(const Mat& x, const Mat& y);  // x^{-1} y^{-1} x y
Mat mat_pow(const Mat& x, uint64_t k);

Mat mat_reduce_to(const Mat& x, int level);
Mat mat_lift_to(const Mat& x, int level);
Mat mat_frobenius_q(const Mat& x);
bool mat_is_rational(const Mat& x);
// congruence level: largest i with x == 1 mod pi^i (capped at ring level)
int mat_congruence_level(const Mat& x);

void mat_append_key(const Mat& x, std::vector<uint64_t>* out);
std::vector<uint64_t> mat_key(const Mat& x);
std::string mat_str(const Mat& x);

}  // namespace dlr
