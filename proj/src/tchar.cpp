#include "dlr/tchar.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dlr {

CycloNum psi_eval(const RElem& y) {
  const Ring& R = *y.ring;
  uint64_t tr = R.trace_abs(y);
  if (R.kind() == RingKind::mixed) {
    uint32_t N = 1;
    for (int i = 0; i < R.level(); ++i) N *= (uint32_t)R.p();
    return CycloNum::root_of_unity(N, (int64_t)tr);
  }
  // equal characteristic: top digit of the trace against zeta_p
  uint64_t digit = tr;
  for (int i = 0; i + 1 < R.level(); ++i) digit /= (uint64_t)R.p();
  return CycloNum::root_of_unity((uint32_t)R.p(), (int64_t)(digit % (uint64_t)R.p()));
}

CycloNum fixed_psi(const RingTower& tower, const RElem& residue_elem) {
  (void)tower;
  if (residue_elem.ring->level() != 1)
    throw std::runtime_error("fixed_psi: level-1 input expected");
  return psi_eval(residue_elem);
}

// ---- TorusChar ----

uint32_t TorusChar::conductor() const {
  uint32_t N = 1;
  for (int b = 0; b < gl->blocks(); ++b)
    N = (uint32_t)std::lcm<uint64_t>(N, gl->block_unit_structure(b).character_conductor());
  return N;
}

uint64_t TorusChar::exponent_coords(const std::vector<RElem>& coords, uint32_t N) const {
  uint64_t e = 0;
  for (size_t b = 0; b < coords.size(); ++b) {
    const auto& st = gl->block_unit_structure((int)b);
    uint32_t nb = st.character_conductor();
    e = (e + character_exponent(st, exps[b], coords[b], nb) * (uint64_t)(N / nb)) % N;
  }
  return e;
}

bool TorusChar::is_one_at(const std::vector<RElem>& coords) const {
  return exponent_coords(coords, conductor()) == 0;
}

CycloNum TorusChar::eval_coords(const std::vector<RElem>& coords) const {
  uint32_t N = conductor();
  return CycloNum::root_of_unity(N, (int64_t)exponent_coords(coords, N));
}

CycloNum TorusChar::eval_point(const Mat& t) const {
  return eval_coords(gl->torus_coords(t));
}

bool TorusChar::is_trivial() const {
  for (const auto& e : exps)
    for (uint32_t v : e)
      if (v != 0) return false;
  return true;
}

std::string TorusChar::key() const {
  std::ostringstream os;
  os << "[";
  for (size_t b = 0; b < exps.size(); ++b) {
    if (b) os << ";";
    for (size_t i = 0; i < exps[b].size(); ++i) {
      if (i) os << ",";
      os << exps[b][i];
    }
  }
  os << "]";
  return os.str();
}

uint64_t theta_count(const GL& gl) {
  uint64_t total = 1;
  for (int b = 0; b < gl.blocks(); ++b)
    total *= gl.block_unit_structure(b).group_order;
  return total;
}

TorusChar theta_from_index(const GL& gl, uint64_t index) {
  TorusChar t;
  t.gl = &gl;
  for (int b = 0; b < gl.blocks(); ++b) {
    const auto& st = gl.block_unit_structure(b);
    std::vector<uint32_t> e;
    for (uint64_t d : st.orders) {
      e.push_back((uint32_t)(index % d));
      index /= d;
    }
    t.exps.push_back(std::move(e));
  }
  return t;
}

void for_all_theta(const GL& gl, const std::function<void(const TorusChar&)>& f) {
  uint64_t total = theta_count(gl);
  for (uint64_t i = 0; i < total; ++i) f(theta_from_index(gl, i));
}

CycloNum theta_tilde(const TorusChar& theta, const Mat& g) {
  return theta.eval_coords(theta.gl->t_component_coords(g));
}

// ---- beta ----

namespace {

Mat block_direction(const GL& gl, int level, int block, const RElem& z) {
  std::vector<RElem> coords;
  for (int b = 0; b < gl.blocks(); ++b)
    coords.push_back(b == block ? z : gl.block_ring(b, level).zero());
  return gl.block_linear_matrix(coords);
}

// 1 + pi^shift * lift(avatar)
Mat one_plus_shifted(const GL& gl, const Mat& avatar, int shift) {
  Mat g = Mat::identity(gl.amb(), gl.n());
  for (size_t k = 0; k < g.a.size(); ++k) {
    RElem lifted = avatar.ring->lift_to(avatar.a[k], gl.r());
    g.a[k] = gl.amb().add(g.a[k], gl.amb().mul_pi(lifted, shift));
  }
  return g;
}

}  // namespace

Beta beta_of_theta(const TorusChar& theta) {
  const GL& gl = *theta.gl;
  int lp = gl.lp();
  Beta beta;
  for (int b = 0; b < gl.blocks(); ++b) {
    const Ring& BR = gl.block_ring(b, lp);
    std::vector<RElem> dirs;
    {
      RElem gk = BR.one();
      for (int k = 0; k < BR.deg(); ++k) {
        dirs.push_back(gk);
        if (k + 1 < BR.deg()) gk = BR.mul(gk, BR.gen());
      }
    }
    std::vector<CycloNum> want;
    for (const RElem& z : dirs)
      want.push_back(theta_tilde(theta, one_plus_shifted(gl, block_direction(gl, lp, b, z), gl.l())));
    int hits = 0;
    RElem found = BR.zero();
    BR.enumerate([&](const RElem& cand) {
      for (size_t j = 0; j < dirs.size(); ++j)
        if (!(psi_eval(BR.mul(cand, dirs[j])) == want[j])) return;
      ++hits;
      found = cand;
    });
    if (hits != 1) throw std::runtime_error("beta_of_theta: dual not unique");
    beta.blocks.push_back(found);
    beta.residue_blocks.push_back(BR.residue(found));
  }
  beta.avatar = gl.block_linear_matrix(beta.blocks);
  // verify the defining identity on the off-torus directions as well
  const Ring& Olp = gl.tower().ring(lp, 1);
  for (const Mat& c1 : gl.complement_basis_1()) {
    Mat lift = mat_reduce_to(gl.teich_lift(c1), lp);
    for (int m = 0; m < lp; ++m) {
      Mat dir(*lift.ring, gl.n());
      for (size_t k = 0; k < dir.a.size(); ++k) dir.a[k] = lift.ring->mul_pi(lift.a[k], m);
      RElem tr = gl.tower().project(mat_trace(mat_mul(beta.avatar, dir)), Olp);
      if (!(theta_tilde(theta, one_plus_shifted(gl, dir, gl.l())) == psi_eval(tr)))
        throw std::runtime_error("beta_of_theta: defining identity failed");
    }
  }
  return beta;
}

std::vector<RElem> beta_residue(const TorusChar& theta) {
  const GL& gl = *theta.gl;
  std::vector<RElem> out;
  for (int b = 0; b < gl.blocks(); ++b) {
    const Ring& B1 = gl.block_ring(b, 1);
    std::vector<RElem> dirs;
    {
      RElem gk = B1.one();
      for (int k = 0; k < B1.deg(); ++k) {
        dirs.push_back(gk);
        if (k + 1 < B1.deg()) gk = B1.mul(gk, B1.gen());
      }
    }
    std::vector<CycloNum> want;
    for (const RElem& z : dirs)
      want.push_back(theta_tilde(
          theta, one_plus_shifted(gl, block_direction(gl, 1, b, z), gl.r() - 1)));
    int hits = 0;
    RElem found = B1.zero();
    for (const RElem& cand : B1.residue_field()) {
      bool ok = true;
      for (size_t j = 0; j < dirs.size(); ++j)
        if (!(psi_eval(B1.mul(cand, dirs[j])) == want[j])) { ok = false; break; }
      if (ok) {
        ++hits;
        found = cand;
      }
    }
    if (hits != 1) throw std::runtime_error("beta_residue: dual not unique");
    out.push_back(found);
  }
  return out;
}

bool residue_is_regular(const GL& gl, const std::vector<RElem>& residue_blocks) {
  const Ring& A1 = gl.amb_at(1);
  std::vector<RElem> eig;
  for (int b = 0; b < gl.blocks(); ++b) {
    RElem v = gl.tower().embed(residue_blocks[b], A1);
    for (int k = 0; k < gl.partition()[b]; ++k) {
      eig.push_back(v);
      v = A1.frobenius_q(v);
    }
  }
  for (size_t i = 0; i < eig.size(); ++i)
    for (size_t j = i + 1; j < eig.size(); ++j)
      if (eig[i] == eig[j]) return false;
  return true;
}

// ---- classifier ----

GenericityClassifier::GenericityClassifier(const GL& gl) : gl_(&gl) {
  for (const auto& rl : gl.root_lines()) {
    std::vector<std::vector<RElem>> coords;
    for (const Mat& m : rl.norm_image) coords.push_back(gl.torus_coords(m));
    norm_coords_.push_back(std::move(coords));
  }
}

bool GenericityClassifier::is_regular_normmap(const TorusChar& theta, int* witness) const {
  for (size_t line = 0; line < norm_coords_.size(); ++line) {
    bool nontrivial = false;
    for (const auto& coords : norm_coords_[line])
      if (!theta.is_one_at(coords)) {
        nontrivial = true;
        break;
      }
    if (!nontrivial) {
      if (witness) *witness = (int)line;
      return false;
    }
  }
  return true;
}

bool GenericityClassifier::is_regular_beta(const TorusChar& theta) const {
  return residue_is_regular(*gl_, beta_residue(theta));
}

bool GenericityClassifier::is_general_position(const TorusChar& theta, int* witness) const {
  const auto& reps = gl_->weyl_reps();
  for (size_t w = 1; w < reps.size(); ++w)
    if (theta_fixed_by(theta, reps[w])) {
      if (witness) *witness = (int)w;
      return false;
    }
  return true;
}

uint64_t GenericityClassifier::centralizer_order(const Mat& avatar1) const {
  std::vector<uint64_t> key = mat_key(avatar1);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = centralizer_cache_.find(key);
    if (it != centralizer_cache_.end()) return it->second;
  }
  const GL& gl = *gl_;
  int lp = gl.lp();
  const Ring& O = gl.tower().ring(lp, 1);
  const Ring& AMB = gl.amb_at(lp);
  Mat av = mat_lift_to(avatar1, lp);
  std::vector<RElem> vals;
  O.enumerate([&](const RElem& x) { vals.push_back(x); });
  std::vector<RElem> emb;
  for (const RElem& x : vals) emb.push_back(gl.tower().embed(x, AMB));
  uint64_t qr = vals.size(), total = 1;
  for (int k = 0; k < gl.n() * gl.n(); ++k) {
    if (total > gl.guard() / qr) throw std::runtime_error("centralizer: guard exceeded");
    total *= qr;
  }
  uint64_t count = 0;
  Mat g(AMB, gl.n());
  for (uint64_t it = 0; it < total; ++it) {
    uint64_t t = it;
    for (int k = 0; k < gl.n() * gl.n(); ++k) {
      g.a[k] = emb[t % qr];
      t /= qr;
    }
    if (!AMB.is_unit(mat_det(g))) continue;
    if (mat_mul(g, av) == mat_mul(av, g)) ++count;
  }
  std::lock_guard<std::mutex> lock(mu_);
  centralizer_cache_.emplace(std::move(key), count);
  return count;
}

bool GenericityClassifier::stabilizer_condition(const TorusChar& theta) const {
  const GL& gl = *gl_;
  auto res = beta_residue(theta);
  Mat av1 = gl.block_linear_matrix(res);
  uint64_t expect = 1;
  for (int b = 0; b < gl.blocks(); ++b)
    expect *= gl.block_ring(b, gl.lp()).unit_count();
  return centralizer_order(av1) == expect;
}

GenericityReport GenericityClassifier::classify(const TorusChar& theta) const {
  GenericityReport rep;
  rep.regular_normmap = is_regular_normmap(theta, &rep.witness_root);
  rep.beta_res = beta_residue(theta);
  rep.regular_beta = residue_is_regular(*gl_, rep.beta_res);
  rep.general_position = is_general_position(theta, &rep.witness_weyl);
  rep.stabilizer_condition = stabilizer_condition(theta);
  rep.strongly_generic =
      rep.regular_normmap && rep.general_position && rep.stabilizer_condition;
  std::ostringstream os;
  os << "beta_res[";
  for (int b = 0; b < gl_->blocks(); ++b) {
    if (b) os << ";";
    os << rep.beta_res[b].ring->str(rep.beta_res[b]);
  }
  os << "]";
  rep.beta_charpoly = os.str();
  return rep;
}

// ---- Weyl twisting ----

bool theta_fixed_by(const TorusChar& theta, const Mat& w) {
  const GL& gl = *theta.gl;
  Mat wi = mat_inverse(w);
  for (int b = 0; b < gl.blocks(); ++b) {
    const auto& st = gl.block_unit_structure(b);
    for (const RElem& gen : st.gens) {
      std::vector<RElem> coords;
      for (int bb = 0; bb < gl.blocks(); ++bb)
        coords.push_back(bb == b ? gen : gl.block_ring(bb, gl.r()).one());
      Mat t = gl.torus_point(coords);
      Mat tw = mat_mul(mat_mul(wi, t), w);
      if (!(theta.eval_point(tw) == theta.eval_coords(coords))) return false;
    }
  }
  return true;
}

TorusChar w_twist(const TorusChar& theta, const Mat& w) {
  const GL& gl = *theta.gl;
  Mat wi = mat_inverse(w);
  TorusChar out;
  out.gl = &gl;
  for (int b = 0; b < gl.blocks(); ++b) {
    const auto& st = gl.block_unit_structure(b);
    std::vector<uint32_t> e;
    for (size_t i = 0; i < st.gens.size(); ++i) {
      std::vector<RElem> coords;
      for (int bb = 0; bb < gl.blocks(); ++bb)
        coords.push_back(bb == b ? st.gens[i] : gl.block_ring(bb, gl.r()).one());
      Mat t = gl.torus_point(coords);
      CycloNum v = theta.eval_point(mat_mul(mat_mul(wi, t), w));
      uint32_t ord = 0, expn = 0;
      if (!v.as_root_of_unity(&ord, &expn))
        throw std::runtime_error("w_twist: value not a root of unity");
      uint64_t d = st.orders[i];
      if (d % ord != 0) throw std::runtime_error("w_twist: order mismatch");
      e.push_back((uint32_t)((uint64_t)expn * (d / ord) % d));
    }
    out.exps.push_back(std::move(e));
  }
  return out;
}

// ---- density ----

std::vector<DensityRow> density_experiment(const RingSpec& base, int n,
                                           const std::vector<int>& partition, int r,
                                           int m_max, uint64_t guard) {
  std::vector<DensityRow> rows;
  for (int m = 1; m <= m_max; ++m) {
    RingSpec spec = base;
    spec.e = base.e * m;
    spec.r = r;
    auto tower = std::make_shared<RingTower>(spec);
    GL gl(tower, n, r, partition, guard);
    GenericityClassifier cls(gl);
    DensityRow row;
    row.m = m;
    row.theta_total = theta_count(gl);
    if (row.theta_total > guard) throw std::runtime_error("density: guard exceeded");
    row.theta_regular = 0;
    for_all_theta(gl, [&](const TorusChar& th) {
      if (cls.is_regular_normmap(th)) ++row.theta_regular;
    });
    row.beta_total = 0;
    row.beta_regular = 0;
    std::vector<std::vector<RElem>> opts;
    for (int b = 0; b < gl.blocks(); ++b) opts.push_back(gl.block_ring(b, 1).residue_field());
    std::vector<size_t> idx(opts.size(), 0);
    while (true) {
      std::vector<RElem> res;
      for (size_t b = 0; b < opts.size(); ++b) res.push_back(opts[b][idx[b]]);
      ++row.beta_total;
      if (residue_is_regular(gl, res)) ++row.beta_regular;
      size_t b = 0;
      for (; b < idx.size(); ++b) {
        if (++idx[b] < opts[b].size()) break;
        idx[b] = 0;
      }
      if (b == idx.size()) break;
    }
    row.theta_fraction = Rat((int64_t)row.theta_regular, (int64_t)row.theta_total);
    row.beta_fraction = Rat((int64_t)row.beta_regular, (int64_t)row.beta_total);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dlr
