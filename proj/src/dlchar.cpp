#include "dlr/dlchar.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dlr {

SteinbergData steinberg_data(const GL& gl, const std::vector<RElem>& t1_coords) {
  auto sd = gl.semisimple_data(t1_coords);
  SteinbergData out;
  out.phi_s_plus = sd.phi_s_plus;
  out.rk_G1 = gl.n();
  out.rk_T1 = gl.blocks();
  out.rk_centralizer = sd.rk_centralizer;
  out.st_sign = (out.rk_G1 + out.rk_centralizer) % 2 == 0 ? 1 : -1;
  out.st_value_mag = 1;
  for (int i = 0; i < sd.phi_s_plus; ++i) out.st_value_mag *= gl.q();
  return out;
}

CycloNum AlgebraisedDL::chi(const Mat& g) const {
  CycloNum sum = CycloNum::zero();
  const auto& reps = gl->dl_transversal();
  const auto& inv = gl->dl_transversal_inv();
  for (size_t i = 0; i < reps.size(); ++i) {
    Mat y = mat_mul(mat_mul(inv[i], g), reps[i]);
    if (!gl->in_TGjF(y, gl->lp())) continue;
    sum += rhohat.trace(y);
  }
  return sum;
}

int64_t AlgebraisedDL::chi_dim() const {
  return (int64_t)gl->dl_transversal().size() * rhohat.dim;
}

int64_t AlgebraisedDL::expected_dim() const {
  int64_t v = (int64_t)gl->index_p_prime();
  for (int i = 0; i < (gl->r() - 1) * gl->phi_plus(); ++i) v *= gl->q();
  return v;
}

AlgebraisedDL build_dl(const TorusChar& theta, const GenericityClassifier& cls) {
  const GL& gl = *theta.gl;
  GenericityReport rep = cls.classify(theta);
  if (!rep.strongly_generic)
    throw std::runtime_error("build_dl: theta is not strongly generic");
  AlgebraisedDL dl;
  dl.gl = &gl;
  dl.theta = theta;
  dl.rhohat = build_extended(theta, cls);
  // e_theta(1)^r with e_theta(1) = (-1)^{rk T_1 + rk G_1}
  int par = (gl.n() + gl.blocks()) % 2;
  dl.sign = (gl.r() % 2 == 1 && par == 1) ? -1 : 1;
  return dl;
}

bool dim_check(const AlgebraisedDL& dl) {
  if (dl.chi_dim() != dl.expected_dim()) return false;
  // the induced character evaluated at the identity must agree
  CycloNum at_one = dl.chi(Mat::identity(dl.gl->amb(), dl.gl->n()));
  return at_one.as_integer() == dl.expected_dim();
}

bool rss_character_check(const AlgebraisedDL& dl, const std::vector<RElem>& s_coords) {
  const GL& gl = *dl.gl;
  if (!gl.is_regular_semisimple(s_coords))
    throw std::runtime_error("rss_character_check: element is not regular");
  Mat s = gl.torus_point(s_coords);
  // left side: sign * chi(s), with the trace of the extension evaluated both
  // from the matrix model and by the torus-quotient closed form
  CycloNum lhs = CycloNum::zero();
  const auto& reps = gl.dl_transversal();
  const auto& inv = gl.dl_transversal_inv();
  for (size_t i = 0; i < reps.size(); ++i) {
    Mat y = mat_mul(mat_mul(inv[i], s), reps[i]);
    if (!gl.in_TGjF(y, gl.lp())) continue;
    CycloNum model = dl.rhohat.trace(y);
    CycloNum rule = dl.rhohat.torus_target(gl.torus_quotient_coords(y));
    if (!(model == rule))
      throw std::runtime_error("rss_character_check: model vs torus-quotient rule");
    lhs += model;
  }
  if (dl.sign < 0) lhs = -lhs;
  CycloNum rhs = CycloNum::zero();
  for (const Mat& w : gl.weyl_reps())
    rhs += dl.theta.eval_point(mat_mul(mat_mul(mat_inverse(w), s), w));
  return lhs == rhs;
}

Rat mackey_inner_product(const AlgebraisedDL& dl) {
  const GL& gl = *dl.gl;
  const auto& reps = gl.dl_transversal();
  int nreps = (int)reps.size();
  std::vector<Mat> reps_inv;
  for (const Mat& x : reps) reps_inv.push_back(mat_inverse(x));

  // K-generators acting on the coset space: torus generators plus the
  // congruence directions
  std::vector<Mat> kgens;
  for (int b = 0; b < gl.blocks(); ++b) {
    std::vector<RElem> coords;
    for (int bb = 0; bb < gl.blocks(); ++bb)
      coords.push_back(bb == b ? gl.t1_generators()[bb] : gl.block_ring(bb, gl.r()).one());
    kgens.push_back(gl.torus_point(coords));
    // principal unit generator of the block
    const Ring& BR = gl.block_ring(b, gl.r());
    if (gl.r() > 1) {
      std::vector<RElem> pcoords;
      for (int bb = 0; bb < gl.blocks(); ++bb)
        pcoords.push_back(bb == b
                              ? BR.add(BR.one(), BR.mul_pi(BR.one(), 1))
                              : gl.block_ring(bb, gl.r()).one());
      kgens.push_back(gl.torus_point(pcoords));
    }
  }
  {
    const Ring& O = gl.tower().ring(gl.r() - gl.lp(), 1);
    const Ring& AMB = gl.amb_at(gl.r() - gl.lp());
    for (int s = 0; s < gl.n(); ++s)
      for (int t = 0; t < gl.n(); ++t) {
        RElem gk = O.one();
        for (int k = 0; k < O.deg(); ++k) {
          Mat m = Mat::identity(gl.amb(), gl.n());
          m.at(s, t) = gl.amb().add(m.at(s, t),
                                    gl.amb().mul_pi(AMB.lift_to(gl.tower().embed(gk, AMB), gl.r()),
                                                    gl.lp()));
          kgens.push_back(m);
          if (k + 1 < O.deg()) gk = O.mul(gk, O.gen());
        }
      }
  }
  auto coset_of = [&](const Mat& g) -> int {
    for (int j = 0; j < nreps; ++j)
      if (gl.in_TGjF(mat_mul(reps_inv[j], g), gl.lp())) return j;
    throw std::runtime_error("mackey: coset not found");
  };
  // orbits of K on the coset space = double cosets
  std::vector<int> orbit(nreps, -1);
  std::vector<int> dc_reps;
  for (int i = 0; i < nreps; ++i) {
    if (orbit[i] >= 0) continue;
    int id = (int)dc_reps.size();
    dc_reps.push_back(i);
    std::vector<int> stack{i};
    orbit[i] = id;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      for (const Mat& k : kgens) {
        int nc = coset_of(mat_mul(k, reps[c]));
        if (orbit[nc] < 0) {
          orbit[nc] = id;
          stack.push_back(nc);
        }
      }
    }
  }
  CycloNum total = CycloNum::zero();
  for (int rep_ix : dc_reps) {
    const Mat& g = reps[rep_ix];
    Mat gi = mat_inverse(g);
    CycloNum sum = CycloNum::zero();
    uint64_t isize = 0;
    gl.for_TGjF(gl.lp(), [&](const Mat& y) {
      Mat conj = mat_mul(mat_mul(gi, y), g);
      if (!gl.in_TGjF(conj, gl.lp())) return;
      ++isize;
      sum += dl.rhohat.trace(y) * dl.rhohat.trace(conj).conj();
    });
    total += sum.scaled(Rat(1, (int64_t)isize));
  }
  return total.as_rat();
}

// ---- polynomial helpers over the residue field ----

namespace {

using FqPoly = std::vector<RElem>;  // over ring(1,1), lowest degree first

void fq_trim(const Ring& F, FqPoly& f) {
  while (f.size() > 1 && F.is_zero(f.back())) f.pop_back();
}

FqPoly fq_mul(const Ring& F, const FqPoly& a, const FqPoly& b) {
  FqPoly c(a.size() + b.size() - 1, F.zero());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
  return c;
}

FqPoly fq_gcd(const Ring& F, FqPoly a, FqPoly b) {
  fq_trim(F, a);
  fq_trim(F, b);
  while (!(b.size() == 1 && F.is_zero(b[0]))) {
    // a mod b
    RElem lead_inv = F.inverse(b.back());
    while (a.size() >= b.size() && !(a.size() == 1 && F.is_zero(a[0]))) {
      RElem c = F.mul(a.back(), lead_inv);
      size_t off = a.size() - b.size();
      for (size_t j = 0; j < b.size(); ++j)
        a[off + j] = F.sub(a[off + j], F.mul(c, b[j]));
      fq_trim(F, a);
      if (F.is_zero(a.back())) break;
    }
    std::swap(a, b);
    fq_trim(F, b);
  }
  return a;
}

FqPoly fq_derivative(const Ring& F, const FqPoly& f) {
  FqPoly d;
  for (size_t i = 1; i < f.size(); ++i)
    d.push_back(F.mul_base(f[i], (uint64_t)(i % (uint64_t)F.p())));
  if (d.empty()) d.push_back(F.zero());
  return d;
}

}  // namespace

std::vector<RElem> char_poly_1(const GL& gl, const Mat& y1) {
  const Ring& F = gl.tower().ring(1, 1);
  int n = gl.n();
  // entries of XI - y as linear polynomials over F_q
  std::vector<FqPoly> entries(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      RElem v = gl.tower().project(y1.at(i, j), F);
      FqPoly e{F.neg(v)};
      if (i == j) e.push_back(F.one());
      entries[i * n + j] = e;
    }
  // Leibniz expansion
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  FqPoly det{F.zero()};
  int parity = 1;
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      FqPoly term{F.one()};
      for (int i = 0; i < n; ++i) term = fq_mul(F, term, entries[i * n + perm[i]]);
      if (det.size() < term.size()) det.resize(term.size(), F.zero());
      for (size_t i = 0; i < term.size(); ++i)
        det[i] = parity > 0 ? F.add(det[i], term[i]) : F.sub(det[i], term[i]);
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

std::vector<RElem> min_poly_1(const GL& gl, const Mat& y1) {
  const Ring& F = gl.tower().ring(1, 1);
  int n = gl.n();
  // find the first power linearly dependent on the smaller ones over F_q
  std::vector<Mat> pows{Mat::identity(*y1.ring, n)};
  for (int d = 1; d <= n; ++d) pows.push_back(mat_mul(pows.back(), y1));
  // coordinates of a matrix over F_q
  auto coords = [&](const Mat& m) {
    std::vector<RElem> out;
    for (const RElem& v : m.a) out.push_back(gl.tower().project(v, F));
    return out;
  };
  for (int d = 1; d <= n; ++d) {
    // solve sum_{i<d} c_i y^i = y^d over F_q by Gaussian elimination
    int rows = n * n;
    std::vector<std::vector<RElem>> m(rows, std::vector<RElem>(d + 1, F.zero()));
    for (int i = 0; i < d; ++i) {
      auto ci = coords(pows[i]);
      for (int rix = 0; rix < rows; ++rix) m[rix][i] = ci[rix];
    }
    auto cd = coords(pows[d]);
    for (int rix = 0; rix < rows; ++rix) m[rix][d] = cd[rix];
    // row reduce
    int rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < d && rank < rows; ++col) {
      int piv = -1;
      for (int i = rank; i < rows; ++i)
        if (!F.is_zero(m[i][col])) { piv = i; break; }
      if (piv < 0) continue;
      std::swap(m[rank], m[piv]);
      RElem inv = F.inverse(m[rank][col]);
      for (int j = 0; j <= d; ++j) m[rank][j] = F.mul(m[rank][j], inv);
      for (int i = 0; i < rows; ++i) {
        if (i == rank || F.is_zero(m[i][col])) continue;
        RElem f = m[i][col];
        for (int j = 0; j <= d; ++j) m[i][j] = F.sub(m[i][j], F.mul(f, m[rank][j]));
      }
      pivot_col.push_back(col);
      ++rank;
    }
    // consistent iff no row has zero left part and nonzero rhs
    bool consistent = true;
    for (int i = rank; i < rows; ++i)
      if (!F.is_zero(m[i][d])) { consistent = false; break; }
    if (!consistent) continue;
    FqPoly mp(d + 1, F.zero());
    mp[d] = F.one();
    for (int k = 0; k < rank; ++k) mp[pivot_col[k]] = F.neg(m[k][d]);
    return mp;
  }
  throw std::runtime_error("min_poly_1: no relation found");
}

bool poly_squarefree_1(const GL& gl, const std::vector<RElem>& poly) {
  const Ring& F = gl.tower().ring(1, 1);
  FqPoly g = fq_gcd(F, poly, fq_derivative(F, poly));
  return g.size() == 1 && !F.is_zero(g[0]);
}

// ---- orbit map ----

OrbitDescriptor omega(const AlgebraisedDL& dl) {
  const GL& gl = *dl.gl;
  const Ring& A1 = gl.amb_at(1);
  const Ring& F = gl.tower().ring(1, 1);
  int n = gl.n();
  // enumerate rational level-1 matrices x, cache chi(1 + pi^{r-1}[x])
  std::vector<Mat> args1;
  std::vector<CycloNum> chivals;
  {
    std::vector<RElem> field;
    F.enumerate([&](const RElem& v) { field.push_back(v); });
    std::vector<RElem> emb;
    for (const RElem& v : field) emb.push_back(gl.tower().embed(v, A1));
    uint64_t qn = field.size(), total = 1;
    for (int k = 0; k < n * n; ++k) total *= qn;
    for (uint64_t it = 0; it < total; ++it) {
      uint64_t t = it;
      Mat x(A1, n);
      for (int k = 0; k < n * n; ++k) {
        x.a[k] = emb[t % qn];
        t /= qn;
      }
      args1.push_back(x);
      Mat lift = gl.teich_lift(x);
      Mat g = Mat::identity(gl.amb(), n);
      for (size_t k = 0; k < g.a.size(); ++k)
        g.a[k] = gl.amb().add(g.a[k], gl.amb().mul_pi(lift.a[k], gl.r() - 1));
      chivals.push_back(dl.chi(g));
    }
  }
  // multiplicities against psi_y by the exact Fourier sum over x
  OrbitDescriptor out;
  int64_t q_nn = 1;
  for (int k = 0; k < n * n; ++k) q_nn *= gl.q();
  std::map<std::vector<uint64_t>, size_t> support_index;
  std::vector<Mat> support;
  std::vector<int64_t> mults;
  for (size_t yi = 0; yi < args1.size(); ++yi) {
    const Mat& y = args1[yi];
    CycloNum m = CycloNum::zero();
    for (size_t xi = 0; xi < args1.size(); ++xi) {
      RElem tr = gl.tower().project(mat_trace(mat_mul(args1[xi], y)), F);
      m += chivals[xi] * psi_eval(tr).conj();
    }
    m = m.scaled(Rat(1, q_nn));
    int64_t mult = m.as_integer();  // non-integer multiplicity is a hard error
    if (mult < 0) throw std::runtime_error("omega: negative multiplicity");
    if (mult == 0) continue;
    support_index.emplace(mat_key(y), support.size());
    support.push_back(y);
    mults.push_back(mult);
  }
  if (support.empty()) throw std::runtime_error("omega: empty support");
  out.multiplicity = mults[0];
  out.multiplicities_constant = true;
  for (int64_t m : mults)
    if (m != mults[0]) out.multiplicities_constant = false;
  // single orbit under G_1^F conjugation
  std::set<std::vector<uint64_t>> orbit;
  {
    std::vector<Mat> stack{support[0]};
    orbit.insert(mat_key(support[0]));
    while (!stack.empty()) {
      Mat y = stack.back();
      stack.pop_back();
      gl.for_G1F([&](const Mat& g) {
        Mat c = mat_mul(mat_mul(mat_inverse(g), y), g);
        auto key = mat_key(c);
        if (orbit.insert(key).second) stack.push_back(c);
      });
    }
  }
  std::set<std::vector<uint64_t>> support_set;
  for (const Mat& y : support) support_set.insert(mat_key(y));
  out.single_orbit = orbit == support_set;
  // semisimple and regular through the minimal/characteristic polynomials
  auto mp = min_poly_1(gl, support[0]);
  out.semisimple = poly_squarefree_1(gl, mp);
  auto cp = char_poly_1(gl, support[0]);
  out.regular = poly_squarefree_1(gl, cp);
  // support must be the orbit of the residue dual of theta
  auto beta_res = beta_residue(dl.theta);
  Mat beta_avatar = gl.block_linear_matrix(beta_res);
  out.matches_beta_orbit = support_set.count(mat_key(beta_avatar)) > 0 && out.single_orbit;
  for (const auto& k : support_set) out.support_keys.push_back(k);
  std::sort(out.support_keys.begin(), out.support_keys.end());
  return out;
}

// ---- counting induced characters per orbit ----

HillCount hill_count(const GL& gl, const GenericityClassifier& cls,
                     const std::vector<RElem>& orbit_residue) {
  HillCount out;
  out.expected = 1;
  for (int b = 0; b < gl.blocks(); ++b)
    out.expected *= gl.block_ring(b, gl.r() - 1).unit_count();
  // the orbit of the requested residue, as level-1 keys
  std::set<std::vector<uint64_t>> orbit;
  {
    Mat rep = gl.block_linear_matrix(orbit_residue);
    std::vector<Mat> stack{rep};
    orbit.insert(mat_key(rep));
    while (!stack.empty()) {
      Mat y = stack.back();
      stack.pop_back();
      gl.for_G1F([&](const Mat& g) {
        Mat c = mat_mul(mat_mul(mat_inverse(g), y), g);
        auto key = mat_key(c);
        if (orbit.insert(key).second) stack.push_back(c);
      });
    }
  }
  // class-function fingerprints of the induced characters
  std::set<std::string> distinct;
  for_all_theta(gl, [&](const TorusChar& th) {
    GenericityReport rep = cls.classify(th);
    if (!rep.strongly_generic) return;
    Mat avatar = gl.block_linear_matrix(rep.beta_res);
    if (!orbit.count(mat_key(avatar))) return;
    ++out.theta_matching;
    AlgebraisedDL dl = build_dl(th, cls);
    std::string fp;
    gl.for_GF([&](const Mat& g) {
      fp += dl.chi(g).str();
      fp += "|";
    });
    distinct.insert(std::move(fp));
  });
  out.distinct_chi = distinct.size();
  return out;
}

}  // namespace dlr
