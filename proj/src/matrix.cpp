#include "dlr/matrix.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace dlr {

Mat Mat::identity(const Ring& r, int size) {
  Mat m(r, size);
  for (int i = 0; i < size; ++i) m.at(i, i) = r.one();
  return m;
}

bool Mat::operator==(const Mat& o) const {
  if (ring != o.ring || n != o.n) return false;
  for (size_t k = 0; k < a.size(); ++k)
    if (!(a[k] == o.a[k])) return false;
  return true;
}

bool Mat::operator<(const Mat& o) const {
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k] == o.a[k]) continue;
    return a[k] < o.a[k];
  }
  return false;
}

Mat mat_add(const Mat& x, const Mat& y) {
  Mat r(*x.ring, x.n);
  for (size_t k = 0; k < r.a.size(); ++k) r.a[k] = x.ring->add(x.a[k], y.a[k]);
  return r;
}

Mat mat_sub(const Mat& x, const Mat& y) {
  Mat r(*x.ring, x.n);
  for (size_t k = 0; k < r.a.size(); ++k) r.a[k] = x.ring->sub(x.a[k], y.a[k]);
  return r;
}

Mat mat_mul(const Mat& x, const Mat& y) {
  const Ring& R = *x.ring;
  Mat r(R, x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const RElem& v = x.at(i, k);
      if (R.is_zero(v)) continue;
      for (int j = 0; j < x.n; ++j)
        r.at(i, j) = R.add(r.at(i, j), R.mul(v, y.at(k, j)));
    }
  return r;
}

Mat mat_scalar_mul(const RElem& c, const Mat& x) {
  Mat r(*x.ring, x.n);
  for (size_t k = 0; k < r.a.size(); ++k) r.a[k] = x.ring->mul(c, x.a[k]);
  return r;
}

RElem mat_trace(const Mat& x) {
  RElem t = x.ring->zero();
  for (int i = 0; i < x.n; ++i) t = x.ring->add(t, x.at(i, i));
  return t;
}

RElem mat_det(const Mat& x) {
  const Ring& R = *x.ring;
  int n = x.n;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  RElem det = R.zero();
  // Leibniz over permutations; n <= 4 in practice
  int parity = 1;
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      RElem term = R.one();
      for (int i = 0; i < n; ++i) term = R.mul(term, x.at(i, perm[i]));
      det = parity > 0 ? R.add(det, term) : R.sub(det, term);
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

bool mat_is_identity(const Mat& x) {
  const Ring& R = *x.ring;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      if (i == j ? !(x.at(i, j) == R.one()) : !R.is_zero(x.at(i, j))) return false;
    }
  return true;
}

bool mat_invertible(const Mat& x) { return x.ring->is_unit(mat_det(x)); }

Mat mat_inverse(const Mat& x) {
  const Ring& R = *x.ring;
  int n = x.n;
  std::vector<std::vector<RElem>> m(n, std::vector<RElem>(2 * n, R.zero()));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = x.at(i, j);
    m[i][n + i] = R.one();
  }
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (R.is_unit(m[i][col])) { piv = i; break; }
    if (piv < 0) throw std::runtime_error("mat_inverse: not invertible");
    std::swap(m[col], m[piv]);
    RElem inv = R.inverse(m[col][col]);
    for (int j = 0; j < 2 * n; ++j) m[col][j] = R.mul(m[col][j], inv);
    for (int i = 0; i < n; ++i) {
      if (i == col || R.is_zero(m[i][col])) continue;
      RElem f = m[i][col];
      for (int j = 0; j < 2 * n; ++j)
        m[i][j] = R.sub(m[i][j], R.mul(f, m[col][j]));
    }
  }
  Mat r(R, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.at(i, j) = m[i][n + j];
  return r;
}

Mat mat_conjugate(const Mat& g, const Mat& x) {
  return mat_mul(mat_mul(mat_inverse(g), x), g);
}

Mat mat_commutator(const Mat& x, const Mat& y) {
  return mat_mul(mat_mul(mat_inverse(x), mat_inverse(y)), mat_mul(x, y));
}

Mat mat_pow(const Mat& x, uint64_t k) {
  Mat r = Mat::identity(*x.ring, x.n), b = x;
  while (k) {
    if (k & 1) r = mat_mul(r, b);
    b = mat_mul(b, b);
    k >>= 1;
  }
  return r;
}

Mat mat_reduce_to(const Mat& x, int level) {
  const Ring& R = *x.ring;
  const Ring& T = R.tower()->ring(level, R.a());
  Mat r(T, x.n);
  for (size_t k = 0; k < x.a.size(); ++k) r.a[k] = R.reduce_to(x.a[k], level);
  return r;
}

Mat mat_lift_to(const Mat& x, int level) {
  const Ring& R = *x.ring;
  const Ring& T = R.tower()->ring(level, R.a());
  Mat r(T, x.n);
  for (size_t k = 0; k < x.a.size(); ++k) r.a[k] = R.lift_to(x.a[k], level);
  return r;
}

Mat mat_frobenius_q(const Mat& x) {
  Mat r(*x.ring, x.n);
  for (size_t k = 0; k < x.a.size(); ++k) r.a[k] = x.ring->frobenius_q(x.a[k]);
  return r;
}

bool mat_is_rational(const Mat& x) {
  for (const RElem& v : x.a)
    if (!x.ring->is_rational(v)) return false;
  return true;
}

int mat_congruence_level(const Mat& x) {
  const Ring& R = *x.ring;
  int lvl = R.level();
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      RElem v = i == j ? R.sub(x.at(i, j), R.one()) : x.at(i, j);
      lvl = std::min(lvl, R.valuation(v));
      if (lvl == 0) return 0;
    }
  return lvl;
}

void mat_append_key(const Mat& x, std::vector<uint64_t>* out) {
  for (const RElem& v : x.a) x.ring->append_key(v, out);
}

std::vector<uint64_t> mat_key(const Mat& x) {
  std::vector<uint64_t> k;
  mat_append_key(x, &k);
  return k;
}

std::string mat_str(const Mat& x) {
  std::string s = "[";
  for (int i = 0; i < x.n; ++i) {
    if (i) s += "; ";
    for (int j = 0; j < x.n; ++j) {
      if (j) s += " ";
      s += x.ring->str(x.at(i, j));
    }
  }
  return s + "]";
}

}  // namespace dlr
