#include "dlr/oracles.hpp"

#include <set>

namespace dlr::oracles {

CycloNum induced_full_sum(const TorusChar& theta, const Mat& h) {
  const GL& gl = *theta.gl;
  CycloNum sum = CycloNum::zero();
  gl.for_T1GjF(gl.lp(), [&](const Mat& x) {
    Mat xi = mat_inverse(x);
    Mat y = mat_mul(mat_mul(xi, h), x);
    if (gl.in_T1GjF(y, gl.l())) sum += theta_tilde(theta, y);
  });
  return sum.scaled(Rat(1, (int64_t)gl.size_T1GjF(gl.l())));
}

std::vector<std::vector<std::vector<uint32_t>>> all_lagrangians(const SymplecticSpace& V) {
  int64_t p = V.gl->p();
  int dim = V.dim, half = dim / 2;
  uint64_t total = 1;
  for (int i = 0; i < dim; ++i) total *= (uint64_t)p;
  // all nonzero vectors
  std::vector<std::vector<uint32_t>> vecs;
  for (uint64_t it = 1; it < total; ++it) {
    std::vector<uint32_t> v(dim);
    uint64_t t = it;
    for (int i = 0; i < dim; ++i) {
      v[i] = (uint32_t)(t % (uint64_t)p);
      t /= (uint64_t)p;
    }
    vecs.push_back(std::move(v));
  }
  auto pair_val = [&](const std::vector<uint32_t>& x, const std::vector<uint32_t>& y) {
    uint64_t s = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        s = (s + (uint64_t)x[i] * y[j] % (uint64_t)p * V.pairing[i][j]) % (uint64_t)p;
    return (uint32_t)s;
  };
  // canonical echelon form of a span for dedup
  auto echelon = [&](std::vector<std::vector<uint32_t>> rows) {
    std::vector<std::vector<uint32_t>> out;
    for (auto v : rows) {
      for (const auto& r : out) {
        int piv = -1;
        for (int k = 0; k < dim; ++k)
          if (r[k] != 0) { piv = k; break; }
        uint32_t f = v[piv];
        if (f == 0) continue;
        for (int k = 0; k < dim; ++k)
          v[k] = (uint32_t)((v[k] + (uint64_t)(p - 1) * f % p * r[k]) % (uint64_t)p);
      }
      int piv = -1;
      for (int k = 0; k < dim; ++k)
        if (v[k] != 0) { piv = k; break; }
      if (piv < 0) continue;
      uint64_t inv = 1;
      for (uint64_t t = 1; t < (uint64_t)p; ++t)
        if (t * v[piv] % (uint64_t)p == 1) { inv = t; break; }
      for (int k = 0; k < dim; ++k) v[k] = (uint32_t)(v[k] * inv % (uint64_t)p);
      out.push_back(std::move(v));
    }
    // back substitution for a unique form
    for (size_t i = 0; i < out.size(); ++i) {
      int piv = -1;
      for (int k = 0; k < dim; ++k)
        if (out[i][k] != 0) { piv = k; break; }
      for (size_t j = 0; j < out.size(); ++j) {
        if (j == i) continue;
        uint32_t f = out[j][piv];
        if (f == 0) continue;
        for (int k = 0; k < dim; ++k)
          out[j][k] =
              (uint32_t)((out[j][k] + (uint64_t)(p - 1) * f % p * out[i][k]) % (uint64_t)p);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  std::set<std::vector<std::vector<uint32_t>>> seen;
  std::vector<std::vector<std::vector<uint32_t>>> result;
  // iterate over half-subsets of vectors as candidate spanning sets
  std::vector<size_t> idx(half, 0);
  std::function<void(int, size_t)> rec = [&](int k, size_t start) {
    if (k == half) {
      std::vector<std::vector<uint32_t>> rows;
      for (int i = 0; i < half; ++i) rows.push_back(vecs[idx[i]]);
      auto ech = echelon(rows);
      if ((int)ech.size() != half) return;
      if (!seen.insert(ech).second) return;
      // isotropy of the whole subspace
      for (const auto& x : ech)
        for (const auto& y : ech)
          if (pair_val(x, y) != 0) return;
      result.push_back(ech);
      return;
    }
    for (size_t i = start; i < vecs.size(); ++i) {
      idx[k] = i;
      rec(k + 1, i + 1);
    }
  };
  rec(0, 0);
  return result;
}

Rat full_group_inner_product(const GL& gl, const std::function<CycloNum(const Mat&)>& f) {
  CycloNum sum = CycloNum::zero();
  uint64_t count = 0;
  gl.for_GF([&](const Mat& g) {
    CycloNum v = f(g);
    sum += v * v.conj();
    ++count;
  });
  return sum.scaled(Rat(1, (int64_t)count)).as_rat();
}

uint64_t stabilizer_order_bruteforce(const TorusChar& theta) {
  const GL& gl = *theta.gl;
  // directions spanning (G^l)^F and their inflation values
  std::vector<Mat> dirs;
  std::vector<CycloNum> vals;
  const Ring& O = gl.tower().ring(gl.r() - gl.l(), 1);
  const Ring& AMB = gl.amb_at(gl.r() - gl.l());
  for (int s = 0; s < gl.n(); ++s)
    for (int t = 0; t < gl.n(); ++t) {
      RElem gk = O.one();
      for (int k = 0; k < O.deg(); ++k) {
        Mat m = Mat::identity(gl.amb(), gl.n());
        m.at(s, t) = gl.amb().add(
            m.at(s, t),
            gl.amb().mul_pi(AMB.lift_to(gl.tower().embed(gk, AMB), gl.r()), gl.l()));
        dirs.push_back(m);
        vals.push_back(theta_tilde(theta, m));
        if (k + 1 < O.deg()) gk = O.mul(gk, O.gen());
      }
    }
  uint64_t count = 0;
  gl.for_GF([&](const Mat& g) {
    Mat gi = mat_inverse(g);
    for (size_t d = 0; d < dirs.size(); ++d) {
      Mat conj = mat_mul(mat_mul(g, dirs[d]), gi);
      if (!(theta_tilde(theta, conj) == vals[d])) return;
    }
    ++count;
  });
  return count;
}

bool conjugate_into_complement(const GL& gl, const Mat& x, std::vector<RElem>* coords) {
  bool found = false;
  gl.for_T1GjF(gl.lp(), [&](const Mat& h) {
    if (found) return;
    Mat c = mat_mul(mat_mul(h, x), mat_inverse(h));
    std::vector<RElem> tc;
    if (!gl.try_torus_coords(c, &tc)) return;
    for (const RElem& u : tc)
      if (!u.ring->is_teichmuller(u)) return;
    *coords = tc;
    found = true;
  });
  return found;
}

uint64_t element_order(const GL& gl, const Mat& x, uint64_t bound) {
  (void)gl;
  Mat p = x;
  for (uint64_t k = 1; k <= bound; ++k) {
    if (mat_is_identity(p)) return k;
    p = mat_mul(p, x);
  }
  throw std::runtime_error("element_order: bound exceeded");
}

}  // namespace dlr::oracles
