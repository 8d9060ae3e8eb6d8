#include "dlr/groups.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dlr {

namespace {

uint64_t upow64(uint64_t b, uint64_t k) {
  uint64_t r = 1;
  while (k--) r *= b;
  return r;
}

}  // namespace

GL::GL(std::shared_ptr<RingTower> tower, int n, int r, std::vector<int> partition,
       uint64_t guard)
    : tower_(std::move(tower)), n_(n), r_(r), guard_(guard), partition_(std::move(partition)) {
  int sum = 0;
  A_ = 1;
  for (int a : partition_) {
    if (a < 1) throw std::runtime_error("GL: bad partition");
    sum += a;
    A_ = (int)std::lcm(A_, a);
  }
  if (sum != n_) throw std::runtime_error("GL: partition does not sum to n");
  l_ = (r_ + 1) / 2;
  lp_ = r_ / 2;
  amb_ = &tower_->ring(r_, A_);
  block_start_.resize(partition_.size());
  int off = 0;
  for (size_t i = 0; i < partition_.size(); ++i) {
    block_start_[i] = off;
    off += partition_[i];
  }
  build_torus();
}

const Ring& GL::amb_at(int level) const { return tower_->ring(level, A_); }
const Ring& GL::block_ring(int i, int level) const {
  return tower_->ring(level, partition_[i]);
}

std::string GL::key() const {
  std::ostringstream os;
  os << "gl" << n_ << ":r" << r_ << ":q" << q() << ":torus(";
  for (size_t i = 0; i < partition_.size(); ++i) {
    if (i) os << ",";
    os << partition_[i];
  }
  os << ")";
  return os.str();
}

uint64_t GL::order_G1F() const {
  uint64_t qq = (uint64_t)q(), res = 1;
  uint64_t qn = upow64(qq, n_);
  for (int i = 0; i < n_; ++i) res *= qn - upow64(qq, i);
  return res;
}

uint64_t GL::order_T1F() const {
  uint64_t res = 1;
  for (int a : partition_) res *= upow64((uint64_t)q(), a) - 1;
  return res;
}

uint64_t GL::order_GF() const {
  return order_G1F() * upow64((uint64_t)q(), (uint64_t)(r_ - 1) * n_ * n_);
}

uint64_t GL::index_p_prime() const {
  uint64_t m = order_G1F() / order_T1F();
  while (m % (uint64_t)p() == 0) m /= (uint64_t)p();
  return m;
}

// ---- torus construction ----

void GL::build_torus() {
  // conjugator: block diagonal of V^{-1}, V_{kj} = F^k(gen^j) over amb
  Mat V(*amb_, n_);
  for (size_t b = 0; b < partition_.size(); ++b) {
    int a = partition_[b], off = block_start_[b];
    const Ring& BR = block_ring((int)b, r_);
    RElem g = tower_->embed(BR.gen(), *amb_);
    // row k: F^k applied to (1, g, g^2, ..., g^{a-1})
    std::vector<RElem> pow(a, amb_->one());
    for (int j = 1; j < a; ++j) pow[j] = amb_->mul(pow[j - 1], g);
    for (int k = 0; k < a; ++k) {
      for (int j = 0; j < a; ++j) V.at(off + k, off + j) = pow[j];
      for (int j = 0; j < a; ++j) pow[j] = amb_->frobenius_q(pow[j]);
    }
  }
  conj_inv_ = V;
  conj_ = mat_inverse(V);
}

Mat GL::torus_point_at(int level, const std::vector<RElem>& coords) const {
  const Ring& AMB = amb_at(level);
  Mat m(AMB, n_);
  for (size_t b = 0; b < partition_.size(); ++b) {
    int a = partition_[b], off = block_start_[b];
    const Ring& BR = block_ring((int)b, level);
    if (coords[b].ring != &BR) throw std::runtime_error("torus_point: wrong block ring");
    RElem uk = coords[b];
    for (int k = 0; k < a; ++k) {
      auto rc = tower_->rel_coords(uk);
      for (int j = 0; j < a; ++j) m.at(off + j, off + k) = tower_->embed(rc[j], AMB);
      if (k + 1 < a) uk = BR.mul(uk, BR.gen());
    }
  }
  return m;
}

Mat GL::torus_point(const std::vector<RElem>& coords) const {
  return torus_point_at(r_, coords);
}

bool GL::try_torus_coords(const Mat& g, std::vector<RElem>* coords) const {
  int level = g.ring->level();
  const Ring& O = tower_->ring(level, 1);
  std::vector<RElem> c;
  for (size_t b = 0; b < partition_.size(); ++b) {
    int a = partition_[b], off = block_start_[b];
    const Ring& BR = block_ring((int)b, level);
    // column off holds the relative coordinates of the block unit
    std::vector<RElem> rc(a, O.zero());
    for (int j = 0; j < a; ++j)
      if (!tower_->try_project(g.at(off + j, off), O, &rc[j])) return false;
    c.push_back(tower_->rel_eval(rc, BR));
  }
  Mat rebuilt = torus_point_at(level, c);
  if (!(rebuilt == g)) return false;
  for (const RElem& u : c)
    if (!u.ring->is_unit(u)) return false;
  *coords = std::move(c);
  return true;
}

std::vector<RElem> GL::torus_coords(const Mat& g) const {
  std::vector<RElem> c;
  if (!try_torus_coords(g, &c)) throw std::runtime_error("torus_coords: not a torus point");
  return c;
}

// ---- memberships ----

bool GL::in_GF(const Mat& g) const {
  return mat_is_rational(g) && g.ring->is_unit(mat_det(g));
}

bool GL::in_GiF(const Mat& g, int i) const {
  return mat_is_rational(g) && mat_congruence_level(g) >= i;
}

bool GL::in_TF(const Mat& g) const {
  std::vector<RElem> c;
  return mat_is_rational(g) && try_torus_coords(g, &c);
}

bool GL::in_TGjF(const Mat& g, int j) const {
  if (!in_GF(g)) return false;
  std::vector<RElem> c;
  return try_torus_coords(mat_reduce_to(g, j), &c);
}

bool GL::in_T1GjF(const Mat& g, int j) const {
  if (!in_TGjF(g, j)) return false;
  return mat_is_identity(mat_reduce_to(g, 1));
}

// ---- level-1 bases and decompositions ----

void GL::build_level1_bases() const {
  if (!lieT1_.empty()) return;
  const Ring& A1 = amb_at(1);
  const Ring& O1 = tower_->ring(1, 1);
  int ncoord = n_ * n_ * O1.deg();

  auto rational_coords = [&](const Mat& m, std::vector<uint64_t>* out) -> bool {
    out->clear();
    for (const RElem& v : m.a) {
      RElem w;
      if (!tower_->try_project(v, O1, &w)) return false;
      for (int k = 0; k < O1.deg(); ++k) out->push_back(w.c[k]);
    }
    return true;
  };

  std::vector<Mat> lie;
  for (size_t b = 0; b < partition_.size(); ++b) {
    const Ring& BR = block_ring((int)b, 1);
    RElem gm = BR.one();
    for (int m = 0; m < BR.deg(); ++m) {
      std::vector<RElem> coords;
      for (size_t bb = 0; bb < partition_.size(); ++bb)
        coords.push_back(bb == b ? gm : block_ring((int)bb, 1).zero());
      lie.push_back(block_linear_matrix(coords));
      if (m + 1 < BR.deg()) gm = BR.mul(gm, BR.gen());
    }
  }

  // greedy completion by E_{st} z_k candidates, F_p row reduction
  int64_t pp = p();
  std::vector<std::vector<uint64_t>> rows;  // echelon rows over F_p
  std::vector<int> pivots;
  auto insert_row = [&](std::vector<uint64_t> v) -> bool {
    for (size_t rix = 0; rix < rows.size(); ++rix) {
      int piv = pivots[rix];
      if (v[piv] == 0) continue;
      uint64_t f = v[piv];
      for (int k = 0; k < ncoord; ++k)
        v[k] = (v[k] + (uint64_t)(pp - 1) * f % pp * rows[rix][k]) % pp;
    }
    int piv = -1;
    for (int k = 0; k < ncoord; ++k)
      if (v[k] != 0) { piv = k; break; }
    if (piv < 0) return false;
    uint64_t inv = 1;
    for (uint64_t t = 1; t < (uint64_t)pp; ++t)
      if (t * v[piv] % pp == 1) { inv = t; break; }
    for (int k = 0; k < ncoord; ++k) v[k] = v[k] * inv % pp;
    rows.push_back(std::move(v));
    pivots.push_back(piv);
    return true;
  };

  std::vector<uint64_t> vc;
  for (const Mat& m : lie) {
    if (!rational_coords(m, &vc)) throw std::runtime_error("lieT basis not rational");
    if (!insert_row(vc)) throw std::runtime_error("lieT basis dependent");
  }
  std::vector<Mat> comp;
  for (int s = 0; s < n_ && (int)comp.size() < ncoord; ++s)
    for (int t = 0; t < n_; ++t) {
      for (int k = 0; k < O1.deg(); ++k) {
        RElem zk = O1.one();
        for (int kk = 0; kk < k; ++kk) zk = O1.mul(zk, O1.gen());
        Mat cand(A1, n_);
        cand.at(s, t) = tower_->embed(zk, A1);
        if (!rational_coords(cand, &vc)) continue;
        if (insert_row(vc)) comp.push_back(cand);
      }
    }
  if ((int)(lie.size() + comp.size()) != ncoord)
    throw std::runtime_error("level-1 basis incomplete");
  lieT1_ = std::move(lie);
  comp1_ = std::move(comp);
}

// block-diagonal matrix with linear (not companion-of-unit) blocks; the
// regular representation is linear in the ring element, so this is the same
// construction as torus_point_at but without the unit requirement
Mat GL::block_linear_matrix(const std::vector<RElem>& coords) const {
  int level = coords[0].ring->level();
  const Ring& AMB = amb_at(level);
  Mat m(AMB, n_);
  for (size_t b = 0; b < partition_.size(); ++b) {
    int a = partition_[b], off = block_start_[b];
    const Ring& BR = block_ring((int)b, level);
    RElem uk = coords[b];
    for (int k = 0; k < a; ++k) {
      auto rc = tower_->rel_coords(uk);
      for (int j = 0; j < a; ++j) m.at(off + j, off + k) = tower_->embed(rc[j], AMB);
      if (k + 1 < a) uk = BR.mul(uk, BR.gen());
    }
  }
  return m;
}

const std::vector<Mat>& GL::lieT_basis_1() const {
  std::lock_guard<std::mutex> lock(mu_);
  build_level1_bases();
  return lieT1_;
}

const std::vector<Mat>& GL::complement_basis_1() const {
  std::lock_guard<std::mutex> lock(mu_);
  build_level1_bases();
  return comp1_;
}

// solver for [lieT | comp] coordinates at a given level, cached
const std::vector<std::vector<uint64_t>>& GL::lie_solver(int level) const {
  auto it = lie_solver_.find(level);
  if (it != lie_solver_.end()) return it->second;
  build_level1_bases();
  const Ring& O = tower_->ring(level, 1);
  const Ring& AMB = amb_at(level);
  int ncoord = n_ * n_ * O.deg();

  auto mat_coords = [&](const Mat& m, std::vector<uint64_t>* out) {
    out->clear();
    for (const RElem& v : m.a) {
      RElem w = tower_->project(v, O);
      for (int k = 0; k < O.deg(); ++k) out->push_back(w.c[k]);
    }
  };

  // columns: lie blocks (i, mexp) then comp basis x prime basis of O
  std::vector<std::vector<uint64_t>> cols;
  for (size_t b = 0; b < partition_.size(); ++b) {
    const Ring& BR = block_ring((int)b, level);
    RElem gm = BR.one();
    for (int m = 0; m < BR.deg(); ++m) {
      std::vector<RElem> coords;
      for (size_t bb = 0; bb < partition_.size(); ++bb)
        coords.push_back(bb == b ? gm : block_ring((int)bb, level).zero());
      std::vector<uint64_t> vc;
      mat_coords(block_linear_matrix(coords), &vc);
      cols.push_back(std::move(vc));
      if (m + 1 < BR.deg()) gm = BR.mul(gm, BR.gen());
    }
  }
  for (const Mat& c1 : comp1_) {
    Mat lifted = mat_reduce_to(teich_lift(c1), level);
    std::vector<uint64_t> vc;
    mat_coords(lifted, &vc);
    cols.push_back(std::move(vc));
  }
  (void)AMB;
  if ((int)cols.size() != ncoord) throw std::runtime_error("lie_solver: bad basis count");
  // invert the column matrix over the prime ring at this level
  int nn = ncoord;
  std::vector<std::vector<uint64_t>> w(nn, std::vector<uint64_t>(2 * nn, 0));
  for (int i = 0; i < nn; ++i) {
    for (int j = 0; j < nn; ++j) w[i][j] = cols[j][i];
    w[i][nn + i] = 1;
  }
  for (int col = 0; col < nn; ++col) {
    int piv = -1;
    for (int i = col; i < nn; ++i)
      if (w[i][col] % (uint64_t)p() != 0) { piv = i; break; }
    if (piv < 0) throw std::runtime_error("lie_solver: pivot failure");
    std::swap(w[col], w[piv]);
    uint64_t inv = O.binv(w[col][col]);
    for (int j = 0; j < 2 * nn; ++j) w[col][j] = O.bmul(w[col][j], inv);
    for (int i = 0; i < nn; ++i) {
      if (i == col || w[i][col] == 0) continue;
      uint64_t f = w[i][col];
      for (int j = 0; j < 2 * nn; ++j) w[i][j] = O.bsub(w[i][j], O.bmul(f, w[col][j]));
    }
  }
  std::vector<std::vector<uint64_t>> inv(nn, std::vector<uint64_t>(nn, 0));
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) inv[i][j] = w[i][nn + j];
  return lie_solver_.emplace(level, std::move(inv)).first->second;
}

// canonical splitting of a rational matrix into its torus-diagonal part and
// the sum of root spaces, read off in split coordinates
std::vector<RElem> GL::lie_torus_part(const Mat& m, int level) const {
  Mat Vr = mat_reduce_to(conj_inv_, level);  // V: rows are the embeddings
  Mat Cr = mat_reduce_to(conj_, level);      // V^{-1}
  Mat mc = mat_mul(mat_mul(Vr, m), Cr);
  std::vector<RElem> out;
  for (size_t b = 0; b < partition_.size(); ++b) {
    const Ring& BR = block_ring((int)b, level);
    out.push_back(tower_->project(mc.at(block_start_[b], block_start_[b]), BR));
  }
  // the remainder must have zero split-diagonal
  Mat lin = block_linear_matrix(out);
  Mat rc = mat_mul(mat_mul(Vr, mat_sub(m, lin)), Cr);
  for (int k = 0; k < n_; ++k)
    if (!rc.ring->is_zero(rc.at(k, k)))
      throw std::runtime_error("lie_torus_part: split failed");
  return out;
}

void GL::decompose_1(const Mat& m1, std::vector<uint32_t>* lie_c,
                     std::vector<uint32_t>* comp_c) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto& inv = lie_solver(1);
  const Ring& O = tower_->ring(1, 1);
  std::vector<uint64_t> y;
  for (const RElem& v : m1.a) {
    RElem w = tower_->project(v, O);
    for (int k = 0; k < O.deg(); ++k) y.push_back(w.c[k]);
  }
  int nn = (int)y.size();
  int nlie = n_ * O.deg();
  lie_c->clear();
  comp_c->clear();
  for (int i = 0; i < nn; ++i) {
    uint64_t v = 0;
    for (int j = 0; j < nn; ++j) v = O.badd(v, O.bmul(inv[i][j], y[j]));
    if (i < nlie)
      lie_c->push_back((uint32_t)v);
    else
      comp_c->push_back((uint32_t)v);
  }
}

Mat GL::teich_lift(const Mat& m1) const {
  Mat out(*amb_, n_);
  for (size_t k = 0; k < m1.a.size(); ++k) out.a[k] = amb_->teichmuller(m1.a[k]);
  return out;
}

// ---- components ----

Mat GL::t_component(const Mat& g) const {
  if (!in_TGjF(g, l_)) throw std::runtime_error("t_component: not in (TG^l)^F");
  std::vector<RElem> cl;
  if (!try_torus_coords(mat_reduce_to(g, l_), &cl))
    throw std::runtime_error("t_component: internal");
  std::vector<RElem> lifted;
  for (size_t b = 0; b < cl.size(); ++b)
    lifted.push_back(block_ring((int)b, l_).lift_to(cl[b], r_));
  Mat that = torus_point(lifted);
  Mat h = mat_mul(mat_inverse(that), g);
  // h = 1 + pi^l m, split m into torus and root parts at level r - l
  int rem = r_ - l_;
  if (rem == 0) return that;  // r = 1 edge, not used in practice
  Mat hm = mat_sub(h, Mat::identity(*amb_, n_));
  Mat m(tower_->ring(rem, A_), n_);
  for (size_t k = 0; k < hm.a.size(); ++k) m.a[k] = amb_->div_pi(hm.a[k], l_);
  std::vector<RElem> z = lie_torus_part(m, rem);
  // multiply the lifted coords by 1 + pi^l z blockwise
  std::vector<RElem> final_coords;
  for (size_t b = 0; b < z.size(); ++b) {
    const Ring& BR = block_ring((int)b, r_);
    RElem corr = BR.add(BR.one(), BR.mul_pi(BR.lift_to(z[b], r_), l_));
    final_coords.push_back(BR.mul(lifted[b], corr));
  }
  return torus_point(final_coords);
}

std::vector<RElem> GL::t_component_coords(const Mat& g) const {
  std::vector<uint64_t> key = mat_key(g);
  {
    std::lock_guard<std::mutex> lock(comp_mu_);
    auto it = tcomp_cache_.find(key);
    if (it != tcomp_cache_.end()) return it->second;
  }
  std::vector<RElem> coords = torus_coords(t_component(g));
  std::lock_guard<std::mutex> lock(comp_mu_);
  tcomp_cache_.emplace(std::move(key), coords);
  return coords;
}

std::vector<uint32_t> GL::off_torus_coords(const Mat& h) const {
  std::vector<uint64_t> key = mat_key(h);
  {
    std::lock_guard<std::mutex> lock(comp_mu_);
    auto it = vcoord_cache_.find(key);
    if (it != vcoord_cache_.end()) return it->second;
  }
  std::vector<RElem> clp;
  if (!try_torus_coords(mat_reduce_to(h, lp_), &clp))
    throw std::runtime_error("off_torus_coords: not in (T^1 G^{l'})^F");
  std::vector<RElem> lifted;
  for (size_t b = 0; b < clp.size(); ++b)
    lifted.push_back(block_ring((int)b, lp_).lift_to(clp[b], r_));
  Mat that = torus_point(lifted);
  Mat g = mat_mul(mat_inverse(that), h);
  if (mat_congruence_level(g) < lp_)
    throw std::runtime_error("off_torus_coords: bad torus part");
  Mat diff = mat_sub(g, Mat::identity(*amb_, n_));
  Mat x(tower_->ring(r_ - lp_, A_), n_);
  for (size_t k = 0; k < diff.a.size(); ++k) x.a[k] = amb_->div_pi(diff.a[k], lp_);
  std::vector<uint32_t> lie, comp;
  decompose_1(mat_reduce_to(x, 1), &lie, &comp);
  std::lock_guard<std::mutex> lock(comp_mu_);
  vcoord_cache_.emplace(std::move(key), comp);
  return comp;
}

std::vector<RElem> GL::torus_quotient_coords(const Mat& g) const {
  std::vector<RElem> c1;
  if (!try_torus_coords(mat_reduce_to(g, 1), &c1))
    throw std::runtime_error("torus_quotient: not in (TG^{l'})^F");
  std::vector<RElem> out;
  for (size_t b = 0; b < c1.size(); ++b)
    out.push_back(block_ring((int)b, r_).teichmuller(c1[b]));
  return out;
}

Mat GL::teich_part(const Mat& g) const { return torus_point(torus_quotient_coords(g)); }

// ---- enumerators ----

void GL::for_G1F(const std::function<void(const Mat&)>& f) const {
  const Ring& O1 = tower_->ring(1, 1);
  const Ring& A1 = amb_at(1);
  std::vector<RElem> field;
  O1.enumerate([&](const RElem& x) { field.push_back(x); });
  std::vector<RElem> emb;
  for (const RElem& x : field) emb.push_back(tower_->embed(x, A1));
  uint64_t qn = field.size();
  uint64_t total = 1;
  for (int i = 0; i < n_ * n_; ++i) total *= qn;
  if (total > guard_) throw std::runtime_error("for_G1F: guard exceeded");
  Mat m(A1, n_);
  for (uint64_t it = 0; it < total; ++it) {
    uint64_t t = it;
    for (int k = 0; k < n_ * n_; ++k) {
      m.a[k] = emb[t % qn];
      t /= qn;
    }
    if (A1.is_unit(mat_det(m))) f(m);
  }
}

void GL::for_T1F(const std::function<void(const Mat&)>& f) const {
  for (const auto& coords : t1_list()) f(torus_point(coords));
}

const std::vector<std::vector<RElem>>& GL::t1_list() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!t1_list_.empty()) return t1_list_;
  // odometer over nonzero residue-field elements per block
  std::vector<std::vector<RElem>> opts;
  for (size_t b = 0; b < partition_.size(); ++b) {
    const Ring& BR = block_ring((int)b, r_);
    std::vector<RElem> o;
    for (const RElem& u : BR.residue_field())
      if (!u.ring->is_zero(u)) o.push_back(BR.teichmuller(u));
    opts.push_back(std::move(o));
  }
  std::vector<size_t> idx(partition_.size(), 0);
  while (true) {
    std::vector<RElem> coords;
    for (size_t b = 0; b < partition_.size(); ++b) coords.push_back(opts[b][idx[b]]);
    t1_list_.push_back(std::move(coords));
    size_t b = 0;
    for (; b < idx.size(); ++b) {
      if (++idx[b] < opts[b].size()) break;
      idx[b] = 0;
    }
    if (b == idx.size()) break;
  }
  return t1_list_;
}

const std::vector<RElem>& GL::t1_generators() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!t1_gens_.empty()) return t1_gens_;
  for (size_t b = 0; b < partition_.size(); ++b)
    t1_gens_.push_back(block_ring((int)b, r_).teich_generator());
  return t1_gens_;
}

void GL::for_TF_coords(const std::function<void(const std::vector<RElem>&)>& f) const {
  std::vector<std::vector<RElem>> opts;
  uint64_t total = 1;
  for (size_t b = 0; b < partition_.size(); ++b) {
    const Ring& BR = block_ring((int)b, r_);
    std::vector<RElem> o;
    BR.enumerate([&](const RElem& u) {
      if (BR.is_unit(u)) o.push_back(u);
    });
    total *= o.size();
    opts.push_back(std::move(o));
  }
  if (total > guard_) throw std::runtime_error("for_TF_coords: guard exceeded");
  std::vector<size_t> idx(partition_.size(), 0);
  while (true) {
    std::vector<RElem> coords;
    for (size_t b = 0; b < partition_.size(); ++b) coords.push_back(opts[b][idx[b]]);
    f(coords);
    size_t b = 0;
    for (; b < idx.size(); ++b) {
      if (++idx[b] < opts[b].size()) break;
      idx[b] = 0;
    }
    if (b == idx.size()) break;
  }
}

void GL::for_GiF(int i, const std::function<void(const Mat&)>& f) const {
  int rem = r_ - i;
  if (rem <= 0) {
    f(Mat::identity(*amb_, n_));
    return;
  }
  const Ring& OR = tower_->ring(rem, 1);
  std::vector<RElem> vals;
  OR.enumerate([&](const RElem& x) { vals.push_back(x); });
  uint64_t qr = vals.size();
  uint64_t total = 1;
  for (int k = 0; k < n_ * n_; ++k) {
    if (total > guard_ / qr) throw std::runtime_error("for_GiF: guard exceeded");
    total *= qr;
  }
  const Ring& AR = amb_at(rem);
  std::vector<RElem> emb;
  for (const RElem& x : vals) emb.push_back(AR.lift_to(tower_->embed(x, AR), r_));
  Mat m(*amb_, n_);
  for (uint64_t it = 0; it < total; ++it) {
    uint64_t t = it;
    Mat g = Mat::identity(*amb_, n_);
    for (int k = 0; k < n_ * n_; ++k) {
      g.a[k] = amb_->add(g.a[k], amb_->mul_pi(emb[t % qr], i));
      t /= qr;
    }
    (void)m;
    f(g);
  }
}

uint64_t GL::size_T1GjF(int j) const {
  uint64_t res = 1;
  for (int a : partition_) res *= upow64((uint64_t)q(), (uint64_t)a * (j - 1));
  res *= upow64((uint64_t)q(), (uint64_t)(r_ - j) * n_ * n_);
  return res;
}

uint64_t GL::size_TGjF(int j) const { return order_T1F() * size_T1GjF(j); }

void GL::for_T1GjF(int j, const std::function<void(const Mat&)>& f) const {
  if (size_T1GjF(j) > guard_) throw std::runtime_error("for_T1GjF: guard exceeded");
  // section of (T^1 / T^j)^F: principal unit coords at level j, lifted
  std::vector<std::vector<RElem>> topts;
  for (size_t b = 0; b < partition_.size(); ++b) {
    const Ring& BJ = block_ring((int)b, j);
    const Ring& BR = block_ring((int)b, r_);
    std::vector<RElem> o;
    if (j == 1) {
      o.push_back(BR.one());
    } else {
      const Ring& BL = block_ring((int)b, j - 1);
      BL.enumerate([&](const RElem& w) {
        RElem u = BJ.add(BJ.one(), BJ.mul_pi(BL.lift_to(w, j), 1));
        o.push_back(BJ.lift_to(u, r_));
      });
    }
    topts.push_back(std::move(o));
  }
  std::vector<size_t> idx(partition_.size(), 0);
  while (true) {
    std::vector<RElem> coords;
    for (size_t b = 0; b < partition_.size(); ++b) coords.push_back(topts[b][idx[b]]);
    Mat that = torus_point(coords);
    for_GiF(j, [&](const Mat& g) { f(mat_mul(that, g)); });
    size_t b = 0;
    for (; b < idx.size(); ++b) {
      if (++idx[b] < topts[b].size()) break;
      idx[b] = 0;
    }
    if (b == idx.size()) break;
  }
}

void GL::for_TGjF(int j, const std::function<void(const Mat&)>& f) const {
  if (size_TGjF(j) > guard_) throw std::runtime_error("for_TGjF: guard exceeded");
  for (const auto& coords : t1_list()) {
    Mat a = torus_point(coords);
    for_T1GjF(j, [&](const Mat& h) { f(mat_mul(a, h)); });
  }
}

void GL::for_GF(const std::function<void(const Mat&)>& f) const {
  const Ring& O = tower_->ring(r_, 1);
  std::vector<RElem> vals;
  O.enumerate([&](const RElem& x) { vals.push_back(x); });
  std::vector<RElem> emb;
  for (const RElem& x : vals) emb.push_back(tower_->embed(x, *amb_));
  uint64_t qr = vals.size();
  uint64_t total = 1;
  for (int k = 0; k < n_ * n_; ++k) {
    if (total > guard_ / qr) throw std::runtime_error("for_GF: guard exceeded");
    total *= qr;
  }
  Mat g(*amb_, n_);
  for (uint64_t it = 0; it < total; ++it) {
    uint64_t t = it;
    for (int k = 0; k < n_ * n_; ++k) {
      g.a[k] = emb[t % qr];
      t /= qr;
    }
    if (amb_->is_unit(mat_det(g))) f(g);
  }
}

// ---- Weyl group ----

uint64_t GL::weyl_order_expected() const {
  std::map<int, int> mult;
  for (int a : partition_) mult[a]++;
  uint64_t w = 1;
  for (auto [d, m] : mult) {
    for (int i = 0; i < m; ++i) w *= (uint64_t)d;
    for (int i = 2; i <= m; ++i) w *= (uint64_t)i;
  }
  return w;
}

const std::vector<Mat>& GL::weyl_reps() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!weyl_.empty()) return weyl_;
  std::vector<Mat> gens;
  // per-block Frobenius action, O_r-linear on the block
  for (size_t b = 0; b < partition_.size(); ++b) {
    int a = partition_[b], off = block_start_[b];
    if (a == 1) continue;
    const Ring& BR = block_ring((int)b, r_);
    Mat w = Mat::identity(*amb_, n_);
    RElem gk = BR.one();
    for (int k = 0; k < a; ++k) {
      auto rc = tower_->rel_coords(BR.frobenius_q(gk));
      for (int jj = 0; jj < a; ++jj) w.at(off + jj, off + k) = tower_->embed(rc[jj], *amb_);
      if (k + 1 < a) gk = BR.mul(gk, BR.gen());
    }
    gens.push_back(w);
  }
  // swaps of equal-size blocks
  for (size_t b1 = 0; b1 < partition_.size(); ++b1)
    for (size_t b2 = b1 + 1; b2 < partition_.size(); ++b2) {
      if (partition_[b1] != partition_[b2]) continue;
      Mat w(*amb_, n_);
      std::vector<bool> moved(n_, false);
      for (int k = 0; k < partition_[b1]; ++k) {
        w.at(block_start_[b2] + k, block_start_[b1] + k) = amb_->one();
        w.at(block_start_[b1] + k, block_start_[b2] + k) = amb_->one();
        moved[block_start_[b1] + k] = moved[block_start_[b2] + k] = true;
      }
      for (int k = 0; k < n_; ++k)
        if (!moved[k]) w.at(k, k) = amb_->one();
      gens.push_back(w);
    }

  auto same_coset = [&](const Mat& x, const Mat& y) {
    std::vector<RElem> c;
    return try_torus_coords(mat_mul(mat_inverse(x), y), &c);
  };
  std::vector<Mat> reps{Mat::identity(*amb_, n_)};
  for (size_t head = 0; head < reps.size(); ++head) {
    for (const Mat& g : gens) {
      Mat cand = mat_mul(reps[head], g);
      bool known = false;
      for (const Mat& r : reps)
        if (same_coset(r, cand)) { known = true; break; }
      if (!known) reps.push_back(cand);
    }
  }
  if (reps.size() != weyl_order_expected())
    throw std::runtime_error("weyl_reps: unexpected count");
  weyl_ = std::move(reps);
  return weyl_;
}

// ---- coset data ----

const std::vector<Mat>& GL::coset_reps_1() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!cosets1_.empty()) return cosets1_;
  std::vector<Mat> reps;
  uint64_t want = order_G1F() / order_T1F();
  for_G1F([&](const Mat& g) {
    if (reps.size() >= want) return;
    Mat gi = mat_inverse(g);
    for (const Mat& r : reps) {
      std::vector<RElem> c;
      if (try_torus_coords(mat_mul(gi, r), &c)) return;
    }
    reps.push_back(g);
  });
  if (reps.size() != want) throw std::runtime_error("coset_reps_1: wrong count");
  cosets1_ = std::move(reps);
  return cosets1_;
}

const std::vector<Mat>& GL::dl_transversal() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!transversal_.empty()) return transversal_;
  }
  const auto& reps1 = coset_reps_1();
  const auto& comp = complement_basis_1();
  std::vector<Mat> lifted;
  for (const Mat& g : reps1) lifted.push_back(teich_lift(g));
  // digit part: products over levels 1..l'-1 of complement combinations
  std::vector<Mat> digits{Mat::identity(*amb_, n_)};
  int64_t pp = p();
  for (int j = 1; j <= lp_ - 1; ++j) {
    std::vector<Mat> next;
    uint64_t total = 1;
    for (size_t k = 0; k < comp.size(); ++k) total *= (uint64_t)pp;
    const Ring& A1 = amb_at(1);
    for (const Mat& base : digits) {
      for (uint64_t it = 0; it < total; ++it) {
        uint64_t t = it;
        Mat combo(A1, n_);
        for (size_t k = 0; k < comp.size(); ++k) {
          uint64_t c = t % (uint64_t)pp;
          t /= (uint64_t)pp;
          if (c) combo = mat_add(combo, mat_scalar_mul(A1.from_int((int64_t)c), comp[k]));
        }
        Mat lift = teich_lift(combo);
        Mat u = Mat::identity(*amb_, n_);
        for (size_t k = 0; k < u.a.size(); ++k)
          u.a[k] = amb_->add(u.a[k], amb_->mul_pi(lift.a[k], j));
        next.push_back(mat_mul(base, u));
      }
    }
    digits = std::move(next);
  }
  std::vector<Mat> out;
  for (const Mat& g : lifted)
    for (const Mat& u : digits) out.push_back(mat_mul(g, u));
  // verify: pairwise distinct cosets of (TG^{l'})^F
  if (digits.size() > 1) {
    for (size_t i = 0; i < out.size(); ++i)
      for (size_t j = i + 1; j < out.size(); ++j)
        if (in_TGjF(mat_mul(mat_inverse(out[i]), out[j]), lp_))
          throw std::runtime_error("dl_transversal: coset collision");
  }
  uint64_t expect = order_GF() / size_TGjF(lp_);
  if (out.size() != expect) throw std::runtime_error("dl_transversal: wrong count");
  std::lock_guard<std::mutex> lock(mu_);
  transversal_ = std::move(out);
  return transversal_;
}

const std::vector<Mat>& GL::dl_transversal_inv() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!transversal_inv_.empty()) return transversal_inv_;
  }
  const auto& reps = dl_transversal();
  std::vector<Mat> inv;
  for (const Mat& x : reps) inv.push_back(mat_inverse(x));
  std::lock_guard<std::mutex> lock(mu_);
  if (transversal_inv_.empty()) transversal_inv_ = std::move(inv);
  return transversal_inv_;
}

// ---- root data ----

Mat GL::root_point(int i, int j, const RElem& z) const {
  Mat e = Mat::identity(*amb_, n_);
  e.at(i, j) = amb_->add(e.at(i, j), z);
  return mat_mul(mat_mul(conj_, e), conj_inv_);
}

Mat GL::coroot_point(int i, int j, const RElem& z) const {
  Mat e = Mat::identity(*amb_, n_);
  e.at(i, i) = z;
  e.at(j, j) = amb_->inverse(z);
  return mat_mul(mat_mul(conj_, e), conj_inv_);
}

const std::vector<GL::RootLine>& GL::root_lines() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!root_lines_.empty()) return root_lines_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      RootLine rl;
      rl.i = i;
      rl.j = j;
      std::map<std::vector<uint64_t>, Mat> seen;
      for (const RElem& c : amb_->residue_field()) {
        RElem z = amb_->add(amb_->one(), amb_->mul_pi(amb_->teichmuller(c), r_ - 1));
        Mat t = coroot_point(i, j, z);
        // norm over F: product of Frobenius translates
        Mat acc = t;
        Mat ft = t;
        for (int d = 1; d < A_; ++d) {
          ft = mat_frobenius_q(ft);
          acc = mat_mul(acc, ft);
        }
        if (!mat_is_rational(acc)) throw std::runtime_error("root_lines: norm not rational");
        seen.emplace(mat_key(acc), acc);
      }
      for (auto& [k, m] : seen) {
        (void)k;
        rl.norm_image.push_back(m);
      }
      root_lines_.push_back(std::move(rl));
    }
  return root_lines_;
}

// ---- semisimple data ----

GL::SemisimpleData GL::semisimple_data(const std::vector<RElem>& t1_coords) const {
  const Ring& A1 = amb_at(1);
  std::vector<RElem> eig;
  for (size_t b = 0; b < partition_.size(); ++b) {
    RElem u = block_ring((int)b, r_).residue(t1_coords[b]);
    RElem v = tower_->embed(u, A1);
    for (int k = 0; k < partition_[b]; ++k) {
      eig.push_back(v);
      v = A1.frobenius_q(v);
    }
  }
  int phi_s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j && eig[i] == eig[j]) ++phi_s;
  // group distinct eigenvalues into Frobenius orbits
  std::vector<RElem> distinct;
  std::vector<int> mult;
  for (const RElem& v : eig) {
    bool found = false;
    for (size_t k = 0; k < distinct.size(); ++k)
      if (distinct[k] == v) {
        ++mult[k];
        found = true;
        break;
      }
    if (!found) {
      distinct.push_back(v);
      mult.push_back(1);
    }
  }
  std::vector<bool> used(distinct.size(), false);
  int rk = 0;
  for (size_t k = 0; k < distinct.size(); ++k) {
    if (used[k]) continue;
    // walk the orbit
    RElem v = distinct[k];
    int m = mult[k];
    while (true) {
      v = A1.frobenius_q(v);
      size_t idx = distinct.size();
      for (size_t t = 0; t < distinct.size(); ++t)
        if (distinct[t] == v) { idx = t; break; }
      if (idx == distinct.size()) throw std::runtime_error("semisimple_data: orbit escape");
      if (used[idx] || idx == k) {
        used[k] = true;
        break;
      }
      if (mult[idx] != m) throw std::runtime_error("semisimple_data: uneven orbit");
      used[idx] = true;
    }
    rk += m;
  }
  return SemisimpleData{phi_s / 2, rk};
}

bool GL::is_regular_semisimple(const std::vector<RElem>& t1_coords) const {
  return semisimple_data(t1_coords).phi_s_plus == 0;
}

const AbelianStructure<RingUnitGroup>& GL::block_unit_structure(int i) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = block_structs_.find(i);
  if (it != block_structs_.end()) return *it->second;
  auto g = std::make_unique<RingUnitGroup>(block_ring(i, r_));
  auto st = std::make_unique<AbelianStructure<RingUnitGroup>>(abelian_structure(*g, guard_));
  st->group = g.get();
  block_groups_.emplace(i, std::move(g));
  return *block_structs_.emplace(i, std::move(st)).first->second;
}

}  // namespace dlr
