#pragma once

#include <functional>
#include <vector>

#include "dlr/cyclo.hpp"

namespace dlr {

// Dense square matrix over the cyclotomic numbers.
struct CMat {
  int n = 0;
  std::vector<CycloNum> a;

  CMat() = default;
  explicit CMat(int size) : n(size), a((size_t)size * size, CycloNum::zero()) {}

  CycloNum& at(int i, int j) { return a[(size_t)i * n + j]; }
  const CycloNum& at(int i, int j) const { return a[(size_t)i * n + j]; }

  static CMat identity(int size) {
    CMat m(size);
    for (int i = 0; i < size; ++i) m.at(i, i) = CycloNum::one();
    return m;
  }

  bool operator==(const CMat& o) const {
    if (n != o.n) return false;
    for (size_t k = 0; k < a.size(); ++k)
      if (!(a[k] == o.a[k])) return false;
    return true;
  }
};

inline CMat cmat_mul(const CMat& x, const CMat& y) {
  CMat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const CycloNum& v = x.at(i, k);
      if (v.is_zero()) continue;
      for (int j = 0; j < x.n; ++j) {
        if (y.at(k, j).is_zero()) continue;
        r.at(i, j) += v * y.at(k, j);
      }
    }
  return r;
}

inline CMat cmat_scalar_mul(const CycloNum& c, const CMat& x) {
  CMat r(x.n);
  for (size_t k = 0; k < x.a.size(); ++k)
    if (!x.a[k].is_zero()) r.a[k] = c * x.a[k];
  return r;
}

inline CycloNum cmat_trace(const CMat& x) {
  CycloNum t = CycloNum::zero();
  for (int i = 0; i < x.n; ++i) t += x.at(i, i);
  return t;
}

// trace of x*y without forming the product
inline CycloNum cmat_trace_mul(const CMat& x, const CMat& y) {
  CycloNum t = CycloNum::zero();
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      if (x.at(i, j).is_zero() || y.at(j, i).is_zero()) continue;
      t += x.at(i, j) * y.at(j, i);
    }
  return t;
}

inline CMat cmat_pow(const CMat& x, uint64_t k) {
  CMat r = CMat::identity(x.n), b = x;
  while (k) {
    if (k & 1) r = cmat_mul(r, b);
    b = cmat_mul(b, b);
    k >>= 1;
  }
  return r;
}

inline CycloNum cmat_det(const CMat& x) {
  int n = x.n;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  CycloNum det = CycloNum::zero();
  int parity = 1;
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      CycloNum term = CycloNum::one();
      bool zero = false;
      for (int i = 0; i < n; ++i) {
        if (x.at(i, perm[i]).is_zero()) { zero = true; break; }
        term *= x.at(i, perm[i]);
      }
      if (!zero) det += parity > 0 ? term : -term;
      return;
    }
    for (int i = k; i < n; ++i) {
      std::swap(perm[k], perm[i]);
      if (i != k) parity = -parity;
      rec(k + 1);
      std::swap(perm[k], perm[i]);
      if (i != k) parity = -parity;
    }
  };
  rec(0);
  return det;
}

inline bool cmat_is_scalar(const CMat& x, CycloNum* scalar) {
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      if (i == j) {
        if (!(x.at(i, j) == x.at(0, 0))) return false;
      } else if (!x.at(i, j).is_zero()) {
        return false;
      }
    }
  *scalar = x.at(0, 0);
  return true;
}

}  // namespace dlr
