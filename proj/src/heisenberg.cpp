#include "dlr/heisenberg.hpp"

#include <algorithm>
#include <numeric>

namespace dlr {

namespace {

uint32_t zeta_p_dlog(const CycloNum& v, int64_t p) {
  for (uint32_t k = 0; k < (uint32_t)p; ++k)
    if (v == CycloNum::root_of_unity((uint32_t)p, k)) return k;
  throw std::runtime_error("zeta_p_dlog: not a p-th root of unity");
}

// deterministic p-th root of a root of unity
CycloNum canonical_pth_root(const CycloNum& w, int64_t p) {
  uint32_t ord = 0, k = 0;
  if (!w.as_root_of_unity(&ord, &k)) throw std::runtime_error("pth_root: not a root of unity");
  if (ord % (uint32_t)p != 0) {
    uint64_t pinv = 1;
    for (uint64_t t = 1; t < ord; ++t)
      if (t * (uint64_t)p % ord == 1) { pinv = t; break; }
    return CycloNum::root_of_unity(ord, (int64_t)((uint64_t)k * pinv % ord));
  }
  return CycloNum::root_of_unity(ord * (uint32_t)p, k);
}

std::vector<uint32_t> fp_combination(const std::vector<std::vector<uint32_t>>& basis,
                                     const std::vector<uint32_t>& coeffs, int dim,
                                     int64_t p) {
  std::vector<uint32_t> v(dim, 0);
  for (size_t j = 0; j < basis.size(); ++j)
    for (int i = 0; i < dim; ++i)
      v[i] = (uint32_t)((v[i] + (uint64_t)coeffs[j] * basis[j][i]) % (uint64_t)p);
  return v;
}

uint32_t pairing_of(const SymplecticSpace& V, const std::vector<uint32_t>& x,
                    const std::vector<uint32_t>& y, int64_t p) {
  uint64_t s = 0;
  for (int i = 0; i < V.dim; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < V.dim; ++j)
      s = (s + (uint64_t)x[i] * y[j] % (uint64_t)p * V.pairing[i][j]) % (uint64_t)p;
  }
  return (uint32_t)s;
}

// row echelon rank tracker over F_p
struct FpSpan {
  int64_t p;
  int dim;
  std::vector<std::vector<uint32_t>> rows;
  std::vector<int> pivots;

  bool insert(std::vector<uint32_t> v) {
    for (size_t r = 0; r < rows.size(); ++r) {
      uint32_t f = v[pivots[r]];
      if (f == 0) continue;
      for (int k = 0; k < dim; ++k)
        v[k] = (uint32_t)((v[k] + (uint64_t)(p - 1) * f % p * rows[r][k]) % (uint64_t)p);
    }
    int piv = -1;
    for (int k = 0; k < dim; ++k)
      if (v[k] != 0) { piv = k; break; }
    if (piv < 0) return false;
    uint64_t inv = 1;
    for (uint64_t t = 1; t < (uint64_t)p; ++t)
      if (t * v[piv] % (uint64_t)p == 1) { inv = t; break; }
    for (int k = 0; k < dim; ++k) v[k] = (uint32_t)(v[k] * inv % (uint64_t)p);
    rows.push_back(std::move(v));
    pivots.push_back(piv);
    return true;
  }
};

}  // namespace

std::vector<uint32_t> v_coords(const GL& gl, const Mat& h) {
  return gl.off_torus_coords(h);
}

SymplecticSpace build_symplectic(const TorusChar& theta, const GenericityClassifier& cls) {
  const GL& gl = *theta.gl;
  if (gl.r() % 2 == 0) throw std::runtime_error("build_symplectic: level must be odd");
  if (!cls.stabilizer_condition(theta))
    throw std::runtime_error("build_symplectic: stabiliser condition fails");
  SymplecticSpace V;
  V.gl = &gl;
  const auto& comp = gl.complement_basis_1();
  V.dim = (int)comp.size();
  for (const Mat& c1 : comp) {
    Mat lift = gl.teich_lift(c1);
    Mat h = Mat::identity(gl.amb(), gl.n());
    for (size_t k = 0; k < h.a.size(); ++k)
      h.a[k] = gl.amb().add(h.a[k], gl.amb().mul_pi(lift.a[k], gl.lp()));
    V.basis_lifts.push_back(h);
  }
  for (int i = 0; i < V.dim; ++i) {
    auto v = v_coords(gl, V.basis_lifts[i]);
    for (int k = 0; k < V.dim; ++k)
      if (v[k] != (uint32_t)(k == i ? 1 : 0))
        throw std::runtime_error("build_symplectic: bad basis lift");
  }
  int64_t p = gl.p();
  V.pairing.assign(V.dim, std::vector<uint32_t>(V.dim, 0));
  for (int i = 0; i < V.dim; ++i)
    for (int j = 0; j < V.dim; ++j) {
      if (i == j) continue;
      Mat comm = mat_commutator(V.basis_lifts[i], V.basis_lifts[j]);
      V.pairing[i][j] = zeta_p_dlog(theta_tilde(theta, comm), p);
    }
  for (int i = 0; i < V.dim; ++i)
    for (int j = 0; j < V.dim; ++j)
      if ((V.pairing[i][j] + V.pairing[j][i]) % (uint64_t)p != 0)
        throw std::runtime_error("build_symplectic: pairing not alternating");
  FpSpan span{p, V.dim, {}, {}};
  for (int i = 0; i < V.dim; ++i) {
    std::vector<uint32_t> row(V.pairing[i].begin(), V.pairing[i].end());
    if (!span.insert(std::move(row)))
      throw std::runtime_error("build_symplectic: degenerate pairing");
  }
  return V;
}

std::vector<std::vector<uint32_t>> find_lagrangian(const SymplecticSpace& V) {
  int64_t p = V.gl->p();
  int half = V.dim / 2;
  std::vector<std::vector<uint32_t>> basis;
  FpSpan span{p, V.dim, {}, {}};
  uint64_t total = 1;
  for (int i = 0; i < V.dim; ++i) total *= (uint64_t)p;
  for (uint64_t it = 1; it < total && (int)basis.size() < half; ++it) {
    std::vector<uint32_t> v(V.dim);
    uint64_t t = it;
    for (int i = 0; i < V.dim; ++i) {
      v[i] = (uint32_t)(t % (uint64_t)p);
      t /= (uint64_t)p;
    }
    bool isotropic = pairing_of(V, v, v, p) == 0;
    for (const auto& b : basis) {
      if (!isotropic) break;
      if (pairing_of(V, v, b, p) != 0) isotropic = false;
    }
    if (!isotropic) continue;
    auto copy = v;
    if (span.insert(std::move(copy))) basis.push_back(std::move(v));
  }
  if ((int)basis.size() != half)
    throw std::runtime_error("find_lagrangian: completion failed");
  return basis;
}

Mat HeisenbergRep::lift_vector(const std::vector<uint32_t>& v) const {
  Mat g = Mat::identity(gl->amb(), gl->n());
  for (int i = 0; i < space.dim; ++i)
    for (uint32_t c = 0; c < v[i]; ++c) g = mat_mul(g, space.basis_lifts[i]);
  return g;
}

Mat HeisenbergRep::section_L(const std::vector<uint32_t>& wl) const {
  Mat g = Mat::identity(gl->amb(), gl->n());
  for (size_t j = 0; j < wl.size(); ++j)
    for (uint32_t c = 0; c < wl[j]; ++c) g = mat_mul(g, lagr_lifts[j]);
  return g;
}

Mat HeisenbergRep::section_U(const std::vector<uint32_t>& u) const {
  Mat g = Mat::identity(gl->amb(), gl->n());
  for (size_t j = 0; j < u.size(); ++j)
    for (uint32_t c = 0; c < u[j]; ++c) g = mat_mul(g, compl_lifts[j]);
  return g;
}

size_t HeisenbergRep::v_index(const std::vector<uint32_t>& v) const {
  size_t idx = 0;
  for (int i = 0; i < space.dim; ++i) idx += (size_t)v[i] * v_index_mul[i];
  return idx;
}

CycloNum HeisenbergRep::chi(const Mat& k_l) const {
  const GL& g = *gl;
  int64_t p = g.p();
  auto v = v_coords(g, k_l);
  std::vector<uint32_t> lu(space.dim, 0);
  for (int i = 0; i < space.dim; ++i) {
    uint64_t s = 0;
    for (int j = 0; j < space.dim; ++j) s += (uint64_t)lu_inverse[i][j] * v[j];
    lu[i] = (uint32_t)(s % (uint64_t)p);
  }
  for (size_t k = lagr.size(); k < lu.size(); ++k)
    if (lu[k] != 0) throw std::runtime_error("chi: element outside the Lagrangian preimage");
  std::vector<uint32_t> wl(lu.begin(), lu.begin() + lagr.size());
  Mat tl = section_L(wl);
  Mat k = mat_mul(mat_inverse(tl), k_l);
  CycloNum val = theta_tilde(theta, k);
  for (size_t j = 0; j < wl.size(); ++j)
    if (wl[j]) val *= chi_gen[j].pow(wl[j]);
  return val;
}

CMat HeisenbergRep::matrix(const Mat& h) const {
  const GL& g = *gl;
  int64_t p = g.p();
  int m = (int)compl_u.size();
  CMat out(dim);
  std::vector<uint32_t> u(m, 0);
  for (int col = 0; col < dim; ++col) {
    Mat tu = section_U(u);
    Mat y = mat_mul(h, tu);
    auto vy = v_coords(g, y);
    std::vector<uint32_t> lu(space.dim, 0);
    for (int i = 0; i < space.dim; ++i) {
      uint64_t s = 0;
      for (int j = 0; j < space.dim; ++j) s += (uint64_t)lu_inverse[i][j] * vy[j];
      lu[i] = (uint32_t)(s % (uint64_t)p);
    }
    std::vector<uint32_t> up(lu.begin() + lagr.size(), lu.end());
    int row = 0;
    {
      size_t mul = 1;
      for (size_t i = 0; i < up.size(); ++i) {
        row += (int)(up[i] * mul);
        mul *= (size_t)p;
      }
    }
    out.at(row, col) = chi(mat_mul(mat_inverse(section_U(up)), y));
    for (int i = 0; i < m; ++i) {
      if (++u[i] < (uint32_t)p) break;
      u[i] = 0;
    }
  }
  return out;
}

CycloNum HeisenbergRep::trace(const Mat& h) const {
  auto v = v_coords(*gl, h);
  Mat tv = lift_vector(v);
  Mat k = mat_mul(mat_inverse(tv), h);
  return theta_tilde(theta, k) * cmat_trace(class_mats[v_index(v)]);
}

Rat HeisenbergRep::self_inner_product() const {
  CycloNum total = CycloNum::zero();
  for (const CMat& m : class_mats) {
    CycloNum t = cmat_trace(m);
    total += t * t.conj();
  }
  return total.scaled(Rat(1, (int64_t)class_mats.size())).as_rat();
}

HeisenbergRep build_rho(const TorusChar& theta, const GenericityClassifier& cls,
                        const std::vector<std::vector<uint32_t>>* lagrangian_override) {
  const GL& gl = *theta.gl;
  int64_t p = gl.p();
  HeisenbergRep rep;
  rep.gl = &gl;
  rep.theta = theta;
  rep.space = build_symplectic(theta, cls);
  rep.lagr = lagrangian_override ? *lagrangian_override : find_lagrangian(rep.space);
  int half = rep.space.dim / 2;
  if ((int)rep.lagr.size() != half) throw std::runtime_error("build_rho: bad Lagrangian");
  {
    FpSpan span{p, rep.space.dim, {}, {}};
    for (const auto& b : rep.lagr) {
      auto copy = b;
      if (!span.insert(std::move(copy)))
        throw std::runtime_error("build_rho: dependent Lagrangian");
      // isotropy of the provided basis
      for (const auto& b2 : rep.lagr)
        if (pairing_of(rep.space, b, b2, p) != 0)
          throw std::runtime_error("build_rho: basis not isotropic");
    }
    for (int i = 0; i < rep.space.dim && (int)rep.compl_u.size() < half; ++i) {
      std::vector<uint32_t> e(rep.space.dim, 0);
      e[i] = 1;
      auto copy = e;
      if (span.insert(std::move(copy))) rep.compl_u.push_back(std::move(e));
    }
    if ((int)rep.compl_u.size() != half)
      throw std::runtime_error("build_rho: transversal completion failed");
  }
  {
    int d = rep.space.dim;
    std::vector<std::vector<uint64_t>> m(d, std::vector<uint64_t>(2 * d, 0));
    for (int j = 0; j < d; ++j) {
      const auto& col = j < half ? rep.lagr[j] : rep.compl_u[j - half];
      for (int i = 0; i < d; ++i) m[i][j] = col[i];
    }
    for (int i = 0; i < d; ++i) m[i][d + i] = 1;
    for (int col = 0; col < d; ++col) {
      int piv = -1;
      for (int i = col; i < d; ++i)
        if (m[i][col] % (uint64_t)p != 0) { piv = i; break; }
      if (piv < 0) throw std::runtime_error("build_rho: basis not invertible");
      std::swap(m[col], m[piv]);
      uint64_t inv = 1;
      for (uint64_t t = 1; t < (uint64_t)p; ++t)
        if (t * m[col][col] % (uint64_t)p == 1) { inv = t; break; }
      for (int j = 0; j < 2 * d; ++j) m[col][j] = m[col][j] * inv % (uint64_t)p;
      for (int i = 0; i < d; ++i) {
        if (i == col || m[i][col] == 0) continue;
        uint64_t f = m[i][col];
        for (int j = 0; j < 2 * d; ++j)
          m[i][j] = (m[i][j] + (uint64_t)(p - 1) * f % (uint64_t)p * m[col][j]) % (uint64_t)p;
      }
    }
    rep.lu_inverse.assign(d, std::vector<uint32_t>(d, 0));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) rep.lu_inverse[i][j] = (uint32_t)m[i][d + j];
  }
  rep.dim = 1;
  for (int i = 0; i < half; ++i) rep.dim *= (int)p;
  {
    uint64_t expect = 1;
    for (int i = 0; i < gl.phi_plus(); ++i) expect *= (uint64_t)gl.q();
    if ((uint64_t)rep.dim != expect) throw std::runtime_error("build_rho: dimension mismatch");
  }
  for (const auto& b : rep.lagr) rep.lagr_lifts.push_back(rep.lift_vector(b));
  for (const auto& b : rep.compl_u) rep.compl_lifts.push_back(rep.lift_vector(b));
  for (const Mat& g : rep.lagr_lifts) {
    Mat gp = mat_pow(g, (uint64_t)p);
    rep.chi_gen.push_back(canonical_pth_root(theta_tilde(theta, gp), p));
  }
  // chi must be multiplicative on the Lagrangian preimage
  {
    std::vector<Mat> probes;
    std::vector<uint32_t> w(rep.lagr.size(), 0);
    while (true) {
      probes.push_back(rep.section_L(w));
      size_t i = 0;
      for (; i < w.size(); ++i) {
        if (++w[i] < (uint32_t)p) break;
        w[i] = 0;
      }
      if (i == w.size()) break;
    }
    const Ring& AMB = gl.amb();
    for (const Mat& c1 : gl.complement_basis_1()) {
      Mat lift = gl.teich_lift(c1);
      Mat u = Mat::identity(AMB, gl.n());
      for (size_t k = 0; k < u.a.size(); ++k)
        u.a[k] = AMB.add(u.a[k], AMB.mul_pi(lift.a[k], gl.l()));
      probes.push_back(u);
    }
    for (const Mat& x : probes)
      for (const Mat& y : probes) {
        CycloNum lhs = rep.chi(mat_mul(x, y));
        if (!(lhs == rep.chi(x) * rep.chi(y)))
          throw std::runtime_error("build_rho: chi not multiplicative");
      }
  }
  rep.v_index_mul.resize(rep.space.dim);
  {
    uint64_t mul = 1;
    for (int i = 0; i < rep.space.dim; ++i) {
      rep.v_index_mul[i] = mul;
      mul *= (uint64_t)p;
    }
    rep.class_mats.resize(mul);
    std::vector<uint32_t> v(rep.space.dim, 0);
    for (size_t idx = 0; idx < mul; ++idx) {
      rep.class_mats[idx] = rep.matrix(rep.lift_vector(v));
      size_t i = 0;
      for (; i < v.size(); ++i) {
        if (++v[i] < (uint32_t)p) break;
        v[i] = 0;
      }
    }
  }
  for (int i = 0; i < rep.space.dim; ++i)
    for (int j = 0; j < rep.space.dim; ++j) {
      CMat lhs = rep.matrix(mat_mul(rep.space.basis_lifts[i], rep.space.basis_lifts[j]));
      CMat rhs = cmat_mul(rep.matrix(rep.space.basis_lifts[i]),
                          rep.matrix(rep.space.basis_lifts[j]));
      if (!(lhs == rhs)) throw std::runtime_error("build_rho: not a homomorphism");
    }
  return rep;
}

// ---- extension ----

namespace {

struct Monomial {
  std::vector<int> perm;        // column j has its nonzero in row perm[j]
  std::vector<CycloNum> phase;  // the nonzero value per column
};

Monomial to_monomial(const CMat& m) {
  Monomial out;
  out.perm.assign(m.n, -1);
  out.phase.assign(m.n, CycloNum::zero());
  for (int j = 0; j < m.n; ++j) {
    for (int i = 0; i < m.n; ++i) {
      if (m.at(i, j).is_zero()) continue;
      if (out.perm[j] >= 0) throw std::runtime_error("to_monomial: not monomial");
      out.perm[j] = i;
      out.phase[j] = m.at(i, j);
    }
    if (out.perm[j] < 0) throw std::runtime_error("to_monomial: zero column");
  }
  return out;
}

// solve M rho(g) = rho(a g a^{-1}) M from the monomial constraints by cell
// orbit propagation; Schur forces a one-dimensional solution space
CMat solve_intertwiner(const HeisenbergRep& rho, const Mat& a) {
  int D = rho.dim;
  Mat ai = mat_inverse(a);
  std::vector<Monomial> lhs, rhs;
  for (const Mat& h : rho.space.basis_lifts) {
    lhs.push_back(to_monomial(rho.matrix(h)));
    rhs.push_back(to_monomial(rho.matrix(mat_mul(mat_mul(a, h), ai))));
  }
  int cells = D * D;
  std::vector<int> state(cells, -1);  // -1 unvisited, 0 dead, 1 alive
  std::vector<CycloNum> rel(cells, CycloNum::zero());
  int alive_root = -1;
  for (int c0 = 0; c0 < cells; ++c0) {
    if (state[c0] != -1) continue;
    std::vector<int> comp{c0};
    rel[c0] = CycloNum::one();
    state[c0] = 1;
    bool dead = false;
    for (size_t head = 0; head < comp.size(); ++head) {
      int cell = comp[head];
      int i = cell / D, j = cell % D;
      for (size_t g = 0; g < lhs.size(); ++g) {
        // forward: M[sigma'(i)][sigma(j)] = (phi'(i)/phi(j)) M[i][j]
        int ni = rhs[g].perm[i], nj = lhs[g].perm[j];
        CycloNum f = rhs[g].phase[i] * lhs[g].phase[j].inverse();
        int ncell = ni * D + nj;
        CycloNum nval = f * rel[cell];
        if (state[ncell] == -1) {
          state[ncell] = 1;
          rel[ncell] = nval;
          comp.push_back(ncell);
        } else if (!(rel[ncell] == nval)) {
          dead = true;
        }
        // backward
        int pi = -1, pj = -1;
        for (int t = 0; t < D; ++t) {
          if (rhs[g].perm[t] == i) pi = t;
          if (lhs[g].perm[t] == j) pj = t;
        }
        CycloNum fb = rhs[g].phase[pi] * lhs[g].phase[pj].inverse();
        int pcell = pi * D + pj;
        if (state[pcell] == -1) {
          state[pcell] = 1;
          rel[pcell] = rel[cell] * fb.inverse();
          comp.push_back(pcell);
        } else if (!(rel[cell] == rel[pcell] * fb)) {
          dead = true;
        }
      }
    }
    if (dead) {
      for (int c : comp) state[c] = 0;
    } else {
      if (alive_root >= 0)
        throw std::runtime_error("solve_intertwiner: solution space not one-dimensional");
      alive_root = c0;
    }
  }
  if (alive_root < 0) throw std::runtime_error("solve_intertwiner: no intertwiner");
  CMat M(D);
  for (int c = 0; c < cells; ++c)
    if (state[c] == 1) M.at(c / D, c % D) = rel[c];
  for (size_t g = 0; g < rho.space.basis_lifts.size(); ++g) {
    CMat l = cmat_mul(M, rho.matrix(rho.space.basis_lifts[g]));
    CMat r = cmat_mul(rho.matrix(mat_mul(mat_mul(a, rho.space.basis_lifts[g]), ai)), M);
    if (!(l == r)) throw std::runtime_error("solve_intertwiner: relation check failed");
  }
  return M;
}

// scale to finite order dividing ord, using gcd(ord, dim) = 1
CMat normalize_intertwiner(const CMat& M, uint64_t ord, int dim) {
  CMat P = cmat_pow(M, ord);
  CycloNum c;
  if (!cmat_is_scalar(P, &c))
    throw std::runtime_error("normalize_intertwiner: power not scalar");
  int64_t u = 0, v = 0;
  {
    int64_t a = (int64_t)ord, b = dim;
    int64_t x0 = 1, x1 = 0, y0 = 0, y1 = 1;
    while (b) {
      int64_t qq = a / b, t = a % b;
      a = b;
      b = t;
      t = x0 - qq * x1;
      x0 = x1;
      x1 = t;
      t = y0 - qq * y1;
      y0 = y1;
      y1 = t;
    }
    if (a != 1) throw std::runtime_error("normalize_intertwiner: orders not coprime");
    u = x0;
    v = y0;
  }
  CycloNum lambda = c.pow(u) * cmat_det(M).pow(v);
  // (M / lambda)^ord = c I / lambda^ord, so lambda^ord = c certifies order ord
  if (!(lambda.pow((int64_t)ord) == c))
    throw std::runtime_error("normalize_intertwiner: normalization failed");
  return cmat_scalar_mul(lambda.inverse(), M);
}

}  // namespace

CycloNum ExtendedRep::torus_target(const std::vector<RElem>& t1_coords) const {
  if (even_path) return theta.eval_coords(t1_coords);
  auto sd = gl->semisimple_data(t1_coords);
  int sign = (gl->n() + sd.rk_centralizer) % 2 == 0 ? 1 : -1;
  int64_t mag = 1;
  for (int i = 0; i < sd.phi_s_plus; ++i) mag *= gl->q();
  return theta.eval_coords(t1_coords).scaled(Rat(sign * mag));
}

const CMat& ExtendedRep::a_matrix(const std::vector<RElem>& t1_coords) const {
  std::vector<uint64_t> key;
  for (const RElem& c : t1_coords) c.ring->append_key(c, &key);
  auto it = a_cache.find(key);
  if (it != a_cache.end()) return it->second;
  // power chains of the generator matrices, built once
  if (gen_pows.empty()) {
    for (int b = 0; b < gl->blocks(); ++b) {
      uint64_t ordb = (uint64_t)gl->block_ring(b, gl->r()).qa() - 1;
      std::vector<CMat> chain{CMat::identity(dim)};
      for (uint64_t k = 1; k < ordb; ++k)
        chain.push_back(cmat_mul(chain.back(), gen_mats[b]));
      gen_pows.push_back(std::move(chain));
    }
  }
  CMat m = CMat::identity(dim);
  bool first = true;
  for (int b = 0; b < gl->blocks(); ++b) {
    const Ring& BR = gl->block_ring(b, gl->r());
    const RElem& gen = gl->t1_generators()[b];
    uint64_t ordb = (uint64_t)BR.qa() - 1;
    RElem pw = BR.one();
    uint64_t k = ordb;
    for (uint64_t t = 0; t < ordb; ++t) {
      if (pw == t1_coords[b]) { k = t; break; }
      pw = BR.mul(pw, gen);
    }
    if (k == ordb) throw std::runtime_error("a_matrix: not a Teichmuller coordinate");
    if (k != 0) {
      m = first ? gen_pows[b][k] : cmat_mul(m, gen_pows[b][k]);
      first = false;
    }
  }
  return a_cache.emplace(std::move(key), std::move(m)).first->second;
}

CycloNum ExtendedRep::lambda_value(const std::vector<RElem>& t1_coords) const {
  if (even_path) return CycloNum::one();
  uint32_t N = 1;
  std::vector<uint64_t> ords;
  for (int b = 0; b < gl->blocks(); ++b) {
    uint64_t d = (uint64_t)gl->block_ring(b, gl->r()).qa() - 1;
    ords.push_back(d);
    N = (uint32_t)std::lcm<uint64_t>(N, d);
  }
  uint64_t e = 0;
  for (int b = 0; b < gl->blocks(); ++b) {
    const Ring& BR = gl->block_ring(b, gl->r());
    const RElem& gen = gl->t1_generators()[b];
    RElem pw = BR.one();
    uint64_t k = 0;
    for (uint64_t t = 0; t < ords[b]; ++t) {
      if (pw == t1_coords[b]) { k = t; break; }
      pw = BR.mul(pw, gen);
    }
    e = (e + (uint64_t)lambda_exp[b] * k % ords[b] * (N / ords[b])) % N;
  }
  return CycloNum::root_of_unity(N, (int64_t)e);
}

CycloNum ExtendedRep::raw_torus_trace(const std::vector<RElem>& t1_coords) const {
  return cmat_trace(a_matrix(t1_coords));
}

CycloNum ExtendedRep::trace(const Mat& g) const {
  if (even_path) return theta_tilde(theta, g);
  auto abar = gl->torus_quotient_coords(g);
  Mat a = gl->torus_point(abar);
  Mat h = mat_mul(mat_inverse(a), g);
  auto v = v_coords(*gl, h);
  Mat tv = rho.lift_vector(v);
  Mat k = mat_mul(mat_inverse(tv), h);
  CycloNum val = lambda_value(abar) * theta_tilde(theta, k);
  return val * cmat_trace_mul(a_matrix(abar), rho.class_mats[rho.v_index(v)]);
}

CMat ExtendedRep::matrix(const Mat& g) const {
  if (even_path) {
    CMat m(1);
    m.at(0, 0) = theta_tilde(theta, g);
    return m;
  }
  auto abar = gl->torus_quotient_coords(g);
  Mat a = gl->torus_point(abar);
  Mat h = mat_mul(mat_inverse(a), g);
  auto v = v_coords(*gl, h);
  Mat tv = rho.lift_vector(v);
  Mat k = mat_mul(mat_inverse(tv), h);
  CycloNum val = lambda_value(abar) * theta_tilde(theta, k);
  return cmat_scalar_mul(val, cmat_mul(a_matrix(abar), rho.class_mats[rho.v_index(v)]));
}

Rat ExtendedRep::self_inner_product() const {
  if (even_path) return Rat(1);
  CycloNum total = CycloNum::zero();
  for (const auto& coords : gl->t1_list()) {
    const CMat& am = a_matrix(coords);
    for (const CMat& cm : rho.class_mats) {
      CycloNum t = cmat_trace_mul(am, cm);
      total += t * t.conj();
    }
  }
  uint64_t denom = gl->order_T1F() * rho.class_mats.size();
  return total.scaled(Rat(1, (int64_t)denom)).as_rat();
}

ExtendedRep build_extended_raw(const TorusChar& theta, const GenericityClassifier& cls) {
  const GL& gl = *theta.gl;
  ExtendedRep rep;
  rep.gl = &gl;
  rep.theta = theta;
  if (gl.r() % 2 == 0) {
    rep.even_path = true;
    rep.dim = 1;
    rep.lambda_exp.assign(gl.blocks(), 0);
    return rep;
  }
  rep.rho = build_rho(theta, cls);
  rep.dim = rep.rho.dim;
  const auto& gens = gl.t1_generators();
  for (int b = 0; b < gl.blocks(); ++b) {
    std::vector<RElem> coords;
    for (int bb = 0; bb < gl.blocks(); ++bb)
      coords.push_back(bb == b ? gens[bb] : gl.block_ring(bb, gl.r()).one());
    Mat a = gl.torus_point(coords);
    uint64_t ord = (uint64_t)gl.block_ring(b, gl.r()).qa() - 1;
    CMat M = ord == 1 ? CMat::identity(rep.dim)
                      : normalize_intertwiner(solve_intertwiner(rep.rho, a), ord, rep.dim);
    rep.gen_mats.push_back(M);
  }
  for (size_t i = 0; i < rep.gen_mats.size(); ++i)
    for (size_t j = i + 1; j < rep.gen_mats.size(); ++j)
      if (!(cmat_mul(rep.gen_mats[i], rep.gen_mats[j]) ==
            cmat_mul(rep.gen_mats[j], rep.gen_mats[i])))
        throw std::runtime_error("build_extended: generators do not commute");
  rep.lambda_exp.assign(gl.blocks(), 0);
  return rep;
}

void apply_canonical_correction(ExtendedRep* rep) {
  if (rep->even_path) return;
  const GL& gl = *rep->gl;
  std::vector<uint64_t> ords;
  for (int b = 0; b < gl.blocks(); ++b)
    ords.push_back((uint64_t)gl.block_ring(b, gl.r()).qa() - 1);
  std::vector<uint32_t> lam(gl.blocks(), 0);
  for (int b = 0; b < gl.blocks(); ++b) {
    if (ords[b] == 1) continue;
    std::vector<RElem> coords;
    for (int bb = 0; bb < gl.blocks(); ++bb)
      coords.push_back(bb == b ? gl.t1_generators()[bb] : gl.block_ring(bb, gl.r()).one());
    CycloNum raw = rep->raw_torus_trace(coords);
    if (raw.is_zero()) throw std::runtime_error("correction: torus trace vanishes");
    CycloNum lv = rep->torus_target(coords) * raw.inverse();
    uint32_t ord = 0, k = 0;
    if (!lv.as_root_of_unity(&ord, &k))
      throw std::runtime_error("correction: ratio is not a root of unity");
    if (ords[b] % ord != 0) throw std::runtime_error("correction: ratio order mismatch");
    lam[b] = (uint32_t)((uint64_t)k * (ords[b] / ord) % ords[b]);
  }
  rep->lambda_exp = lam;
  // exact check across all of T_1^F: the corrected trace matches the closed
  // form and the uncorrected trace has the forced magnitude
  for (const auto& coords : gl.t1_list()) {
    CycloNum raw = rep->raw_torus_trace(coords);
    auto sd = gl.semisimple_data(coords);
    int64_t mag = 1;
    for (int i = 0; i < sd.phi_s_plus; ++i) mag *= gl.q();
    if (!(raw * raw.conj() == CycloNum(mag * mag)))
      throw std::runtime_error("correction: torus trace magnitude violation");
    if (!(rep->lambda_value(coords) * raw == rep->torus_target(coords)))
      throw std::runtime_error("correction: corrected trace mismatch");
  }
}

ExtendedRep build_extended(const TorusChar& theta, const GenericityClassifier& cls) {
  ExtendedRep rep = build_extended_raw(theta, cls);
  apply_canonical_correction(&rep);
  return rep;
}

}  // namespace dlr
