#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dlr/heisenberg.hpp"
#include "dlr/oracles.hpp"

using namespace dlr;

namespace {

std::shared_ptr<RingTower> tower_q(int64_t p, int e, int r, RingKind k = RingKind::mixed) {
  return std::make_shared<RingTower>(RingSpec{p, e, r, k, 1});
}

TorusChar first_strongly_generic(const GL& gl, const GenericityClassifier& cls,
                                 uint64_t skip = 0) {
  for (uint64_t i = 0; i < theta_count(gl); ++i) {
    TorusChar th = theta_from_index(gl, i);
    if (cls.classify(th).strongly_generic) {
      if (skip == 0) return th;
      --skip;
    }
  }
  throw std::runtime_error("no strongly generic character found");
}

}  // namespace

TEST_CASE("symplectic space: split n=2 q=3 r=3") {
  GL gl(tower_q(3, 1, 3), 2, 3, {1, 1});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls);
  SymplecticSpace V = build_symplectic(th, cls);
  CHECK(V.dim == 2);
  CHECK(V.pairing[0][0] == 0);
  CHECK(V.pairing[1][1] == 0);
  CHECK(V.pairing[0][1] != 0);
  CHECK((V.pairing[0][1] + V.pairing[1][0]) % 3 == 0);
  // non-generic theta is rejected
  TorusChar triv = theta_from_index(gl, 0);
  CHECK_THROWS(build_symplectic(triv, cls));
}

TEST_CASE("symplectic space: q=4 equal characteristic has dim 4 over F_2") {
  auto t = std::make_shared<RingTower>(RingSpec{2, 2, 3, RingKind::equal, 1});
  GL gl(t, 2, 3, {1, 1});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls);
  SymplecticSpace V = build_symplectic(th, cls);
  CHECK(V.dim == 4);
  CHECK(gl.p() == 2);
}

TEST_CASE("heisenberg lift: dimension and unit inner product") {
  for (std::vector<int> part : {std::vector<int>{1, 1}, std::vector<int>{2}}) {
    GL gl(tower_q(3, 1, 3), 2, 3, part);
    GenericityClassifier cls(gl);
    TorusChar th = first_strongly_generic(gl, cls, 1);
    HeisenbergRep rho = build_rho(th, cls);
    CHECK(rho.dim == 3);  // q^{#Phi^+}
    CHECK(rho.self_inner_product() == Rat(1));
    // restriction to the kernel acts by the inflated character
    Mat probe = Mat::identity(gl.amb(), 2);
    probe.at(0, 1) = gl.amb().mul_pi(gl.amb().one(), gl.l());
    CMat m = rho.matrix(probe);
    CycloNum s;
    CHECK(cmat_is_scalar(m, &s));
    CHECK(s == theta_tilde(th, probe));
  }
}

TEST_CASE("trace of the lift equals the scaled induced character, q=2 r=3") {
  for (std::vector<int> part : {std::vector<int>{1, 1}, std::vector<int>{2}}) {
    GL gl(tower_q(2, 1, 3), 2, 3, part);
    GenericityClassifier cls(gl);
    TorusChar th = first_strongly_generic(gl, cls);
    HeisenbergRep rho = build_rho(th, cls);
    // exact class function identity on all of (T^1 G^{l'})^F:
    // tr rho = q^{-#Phi^+ (l-l')} Ind
    uint64_t checked = 0;
    gl.for_T1GjF(gl.lp(), [&](const Mat& h) {
      CycloNum lhs = rho.trace(h);
      CycloNum rhs = oracles::induced_full_sum(th, h).scaled(Rat(1, 2));
      if (!(lhs == rhs)) {
        CHECK(lhs == rhs);
        return;
      }
      ++checked;
    });
    CHECK(checked == gl.size_T1GjF(gl.lp()));
  }
}

TEST_CASE("all Lagrangians give the same trace class function") {
  GL gl(tower_q(3, 1, 3), 2, 3, {2});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls, 2);
  SymplecticSpace V = build_symplectic(th, cls);
  auto lagrs = oracles::all_lagrangians(V);
  CHECK(lagrs.size() == 4);  // lines in a symplectic F_3^2 are all isotropic
  HeisenbergRep base = build_rho(th, cls);
  for (const auto& L : lagrs) {
    HeisenbergRep other = build_rho(th, cls, &L);
    for (size_t v = 0; v < base.class_mats.size(); ++v)
      CHECK(cmat_trace(base.class_mats[v]) == cmat_trace(other.class_mats[v]));
  }
}

TEST_CASE("extension: homomorphism on the full group, q=2 r=3 split") {
  GL gl(tower_q(2, 1, 3), 2, 3, {1, 1});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls);
  ExtendedRep ext = build_extended(th, cls);
  std::vector<Mat> elems;
  std::vector<CMat> mats;
  gl.for_TGjF(gl.lp(), [&](const Mat& g) {
    elems.push_back(g);
    mats.push_back(ext.matrix(g));
  });
  for (size_t i = 0; i < elems.size(); ++i)
    for (size_t j = 0; j < elems.size(); ++j) {
      CMat lhs = ext.matrix(mat_mul(elems[i], elems[j]));
      if (!(lhs == cmat_mul(mats[i], mats[j]))) {
        CHECK(false);
        return;
      }
    }
  CHECK(elems.size() == 256);
}

TEST_CASE("extension: homomorphism on a stride, q=2 r=3 elliptic") {
  GL gl(tower_q(2, 1, 3), 2, 3, {2});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls);
  ExtendedRep ext = build_extended(th, cls);
  std::vector<Mat> elems;
  gl.for_TGjF(gl.lp(), [&](const Mat& g) { elems.push_back(g); });
  CHECK(elems.size() == 768);
  for (size_t i = 0; i < elems.size(); i += 7)
    for (size_t j = 0; j < elems.size(); j += 11) {
      CMat lhs = ext.matrix(mat_mul(elems[i], elems[j]));
      CMat rhs = cmat_mul(ext.matrix(elems[i]), ext.matrix(elems[j]));
      if (!(lhs == rhs)) {
        CHECK(false);
        return;
      }
    }
  // restriction to (T^1 G^{l'})^F is the lift itself, matrixwise
  gl.for_T1GjF(gl.lp(), [&](const Mat& h) {
    static int cnt = 0;
    if (cnt++ % 13) return;
    CHECK(ext.matrix(h) == ext.rho.matrix(h));
  });
}

TEST_CASE("canonical torus traces: sign at 1 and magnitudes") {
  for (std::vector<int> part : {std::vector<int>{1, 1}, std::vector<int>{2}}) {
    GL gl(tower_q(3, 1, 3), 2, 3, part);
    GenericityClassifier cls(gl);
    TorusChar th = first_strongly_generic(gl, cls, 3);
    ExtendedRep ext = build_extended(th, cls);
    // value at 1: q^{#Phi^+}, positive
    std::vector<RElem> one_coords;
    for (int b = 0; b < gl.blocks(); ++b) one_coords.push_back(gl.block_ring(b, 3).one());
    CHECK(ext.trace(gl.torus_point(one_coords)) == CycloNum(int64_t{3}));
    // |trace| = q^{#Phi_s^+} on all of T_1^F
    for (const auto& coords : gl.t1_list()) {
      CycloNum tr = ext.trace(gl.torus_point(coords));
      auto sd = gl.semisimple_data(coords);
      int64_t mag = 1;
      for (int i = 0; i < sd.phi_s_plus; ++i) mag *= 3;
      CHECK(tr * tr.conj() == CycloNum(mag * mag));
      // and the closed form target matches
      CHECK(tr == ext.torus_target(coords));
    }
    // <tr, tr> = 1 on (TG^{l'})^F
    CHECK(ext.self_inner_product() == Rat(1));
  }
}

TEST_CASE("extension independence: rescaled intertwiners give the same traces") {
  GL gl(tower_q(3, 1, 3), 2, 3, {2});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls, 5);
  ExtendedRep a = build_extended(th, cls);
  ExtendedRep b = build_extended_raw(th, cls);
  // twist the raw extension by a nontrivial character of T_1^F before the
  // correction: multiply the generator matrix by a root of unity
  uint64_t ord = (uint64_t)gl.block_ring(0, 3).qa() - 1;
  b.gen_mats[0] = cmat_scalar_mul(CycloNum::root_of_unity((uint32_t)ord, 1), b.gen_mats[0]);
  b.a_cache.clear();
  b.gen_pows.clear();
  apply_canonical_correction(&b);
  for (const auto& coords : gl.t1_list())
    CHECK(a.trace(gl.torus_point(coords)) == b.trace(gl.torus_point(coords)));
  uint64_t checked = 0;
  gl.for_TGjF(gl.lp(), [&](const Mat& g) {
    if (checked++ % 97) return;
    CHECK(a.trace(g) == b.trace(g));
  });
}

TEST_CASE("value rule at p'-elements with the conjugation oracle, q=2 elliptic") {
  GL gl(tower_q(2, 1, 3), 2, 3, {2});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls, 1);
  ExtendedRep ext = build_extended(th, cls);
  uint64_t group_order = gl.size_TGjF(gl.lp());
  uint64_t checked = 0;
  gl.for_TGjF(gl.lp(), [&](const Mat& x) {
    uint64_t ord = oracles::element_order(gl, x, group_order);
    if (ord % 2 == 0) return;  // p-part present
    if (ord == 1) return;
    CycloNum model = ext.trace(x);
    CycloNum rule = ext.torus_target(gl.torus_quotient_coords(x));
    CHECK(model == rule);
    // the oracle finds a conjugator into the complement
    std::vector<RElem> coords;
    REQUIRE(oracles::conjugate_into_complement(gl, x, &coords));
    for (size_t b = 0; b < coords.size(); ++b)
      CHECK(coords[b] == gl.torus_quotient_coords(x)[b]);
    ++checked;
  });
  CHECK(checked > 0);
}

TEST_CASE("even level: extension is the inflated character") {
  GL gl(tower_q(3, 1, 2), 2, 2, {1, 1});
  GenericityClassifier cls(gl);
  TorusChar th = first_strongly_generic(gl, cls);
  ExtendedRep ext = build_extended(th, cls);
  CHECK(ext.even_path);
  CHECK(ext.dim == 1);
  gl.for_TGjF(gl.lp(), [&](const Mat& g) {
    static int cnt = 0;
    if (cnt++ % 17) return;
    CHECK(ext.trace(g) == theta_tilde(th, g));
  });
  CHECK(ext.self_inner_product() == Rat(1));
}

TEST_CASE("stabilizer brute force agrees with the centralizer criterion, q=2 r=2") {
  for (std::vector<int> part : {std::vector<int>{1, 1}, std::vector<int>{2}}) {
    GL gl(tower_q(2, 1, 2), 2, 2, part);
    GenericityClassifier cls(gl);
    uint64_t expect_sg = gl.size_TGjF(gl.lp());
    for_all_theta(gl, [&](const TorusChar& th) {
      uint64_t stab = oracles::stabilizer_order_bruteforce(th);
      bool cond = cls.stabilizer_condition(th);
      CHECK(cond == (stab == expect_sg));
    });
  }
}
