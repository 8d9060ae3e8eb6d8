#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "dlr/chainring.hpp"

using namespace dlr;

TEST_CASE("ring sizes and unit counts") {
  {
    RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 1});
    const Ring& R = t.ring(3, 1);
    CHECK(R.size() == 27);
    CHECK(R.unit_count() == 18);
  }
  {
    RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 2});
    const Ring& R = t.ring(3, 2);
    CHECK(R.size() == 729);
    CHECK(R.unit_count() == 648);
    // direct count
    uint64_t units = 0;
    R.enumerate([&](const RElem& x) {
      if (R.is_unit(x)) ++units;
    });
    CHECK(units == 648);
  }
  {
    RingTower t(RingSpec{2, 2, 2, RingKind::equal, 1});
    const Ring& R = t.ring(2, 1);
    CHECK(R.size() == 16);
    CHECK(R.unit_count() == 12);
  }
}

TEST_CASE("spec key round trip and rejection") {
  RingSpec s{3, 1, 3, RingKind::mixed, 2};
  CHECK(s.key() == "mixed:p3:e1:r3:a2");
  RingSpec t = RingSpec::parse("mixed:p3:e1:r3:a2");
  CHECK(t.p == 3);
  CHECK(t.a == 2);
  CHECK(t.kind == RingKind::mixed);
  CHECK_THROWS(RingTower(RingSpec{4, 1, 2, RingKind::mixed, 1}));
}

TEST_CASE("teichmuller lifts in Z/27") {
  RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 1});
  const Ring& R = t.ring(3, 1);
  const Ring& R1 = t.ring(1, 1);
  // -1 lifts to 26
  RElem u = R1.from_int(2);
  RElem lift = R.teichmuller(u);
  CHECK(lift == R.from_int(26));
  // zero lifts to zero
  CHECK(R.teichmuller(R1.zero()) == R.zero());
}

TEST_CASE("teichmuller lift of a field generator in GR(27,2)") {
  RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 2});
  const Ring& R = t.ring(3, 2);
  RElem g = R.teich_generator();
  CHECK(R.mult_order(g) == 8);
  CHECK(R.pow(g, 8) == R.one());
  CHECK(R.is_teichmuller(g));
  // exhaustive: it really is the unique multiplicative lift of its residue
  int count = 0;
  R.enumerate([&](const RElem& x) {
    if (R.is_teichmuller(x) && R.residue(x) == R.residue(g)) ++count;
  });
  CHECK(count == 1);
}

TEST_CASE("frobenius is a ring automorphism with the right fixed ring") {
  RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 2});
  const Ring& R = t.ring(3, 2);
  // fixes Z/27 elementwise
  for (int v = 0; v < 27; ++v) CHECK(R.frobenius_q(R.from_int(v)) == R.from_int(v));
  // acts on Teichmuller points by t -> t^3, e.g. 1 + 3t -> 1 + 3t^3
  RElem tt = R.teich_generator();
  RElem x = R.add(R.one(), R.mul_pi(tt, 1));
  RElem fx = R.add(R.one(), R.mul_pi(R.pow(tt, 3), 1));
  CHECK(R.frobenius_q(x) == fx);
  // exhaustive additivity/multiplicativity on a sampled grid plus order
  std::vector<RElem> all;
  R.enumerate([&](const RElem& y) { all.push_back(y); });
  for (size_t i = 0; i < all.size(); i += 17)
    for (size_t j = 0; j < all.size(); j += 23) {
      const RElem &aa = all[i], &bb = all[j];
      CHECK(R.frobenius_q(R.add(aa, bb)) == R.add(R.frobenius_q(aa), R.frobenius_q(bb)));
      CHECK(R.frobenius_q(R.mul(aa, bb)) == R.mul(R.frobenius_q(aa), R.frobenius_q(bb)));
    }
  // order exactly a = 2, fixed subring is the image of Z/27
  int fixed = 0;
  bool order_two = true;
  for (const RElem& y : all) {
    RElem fy = R.frobenius_q(y);
    if (fy == y) ++fixed;
    if (!(R.frobenius_q(fy) == y)) order_two = false;
  }
  CHECK(order_two);
  CHECK(fixed == 27);
}

TEST_CASE("norm and trace") {
  RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 2});
  const Ring& R = t.ring(3, 2);
  RElem g = R.teich_generator();
  // norm of a Teichmuller generator is the Teichmuller point of g^{1+q}
  RElem n = R.norm_F(g, 2);
  CHECK(n == R.pow(g, 4));
  CHECK(R.mult_order(n) == 2);  // g^4 has order 2 in mu_8
  // norm multiplicative on a sweep of units
  std::vector<RElem> units;
  R.enumerate([&](const RElem& y) {
    if (R.is_unit(y)) units.push_back(y);
  });
  for (size_t i = 0; i < units.size(); i += 41)
    for (size_t j = 0; j < units.size(); j += 53)
      CHECK(R.norm_F(R.mul(units[i], units[j]), 2) ==
            R.mul(R.norm_F(units[i], 2), R.norm_F(units[j], 2)));
  // 1 + pi^{r-1} c has norm 1 + pi^{r-1} (c + c^q)
  RElem c = g;
  RElem x = R.add(R.one(), R.mul_pi(c, 2));
  RElem expect = R.add(R.one(), R.mul_pi(R.add(c, R.frobenius_q(c)), 2));
  CHECK(R.norm_F(x, 2) == expect);
  // trace: t + t^3 for the Teichmuller generator, F-invariant
  RElem tr = R.trace_F(g, 2);
  CHECK(tr == R.add(g, R.pow(g, 3)));
  CHECK(R.is_rational(tr));
}

TEST_CASE("valuation, reduction, residue") {
  RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 1});
  const Ring& R = t.ring(3, 1);
  CHECK(R.valuation(R.from_int(18)) == 2);
  CHECK(R.valuation(R.zero()) == 3);
  CHECK(R.reduce_to(R.from_int(14), 1) == t.ring(1, 1).from_int(2));
  // reduce_to is a ring morphism
  const Ring& R2 = t.ring(2, 1);
  for (int x = 0; x < 27; ++x)
    for (int y = 0; y < 27; y += 5) {
      CHECK(R.reduce_to(R.mul(R.from_int(x), R.from_int(y)), 2) ==
            R2.mul(R.reduce_to(R.from_int(x), 2), R.reduce_to(R.from_int(y), 2)));
    }
}

TEST_CASE("modulus is deterministic and reduction compatible") {
  RingTower t1(RingSpec{3, 1, 3, RingKind::mixed, 2});
  RingTower t2(RingSpec{3, 1, 3, RingKind::mixed, 2});
  CHECK(t1.ring(3, 2).modulus() == t2.ring(3, 2).modulus());
  // h at level 2 equals h at level 3 reduced
  auto h3 = t1.ring(3, 2).modulus();
  auto h2 = t1.ring(2, 2).modulus();
  for (size_t i = 0; i < h3.size(); ++i) CHECK(h2[i] == h3[i] % 9);
  // Hensel: h divides x^{q^a - 1} - 1, i.e. the generator is Teichmuller
  const Ring& R = t1.ring(3, 2);
  CHECK(R.pow(R.gen(), 8) == R.one());
}

TEST_CASE("equal characteristic ring F_4[t]/t^2") {
  RingTower t(RingSpec{2, 2, 2, RingKind::equal, 1});
  const Ring& R = t.ring(2, 1);
  CHECK(R.deg() == 2);
  // t + t = 0 in characteristic 2 (uniformiser has additive order 2)
  RElem pi = R.mul_pi(R.one(), 1);
  CHECK(R.add(pi, pi) == R.zero());
  // ring axioms on the full 16-element sweep
  std::vector<RElem> all;
  R.enumerate([&](const RElem& x) { all.push_back(x); });
  CHECK(all.size() == 16);
  for (const RElem& x : all)
    for (const RElem& y : all) {
      CHECK(R.add(x, y) == R.add(y, x));
      CHECK(R.mul(x, y) == R.mul(y, x));
    }
  for (const RElem& x : all)
    for (const RElem& y : all)
      for (size_t k = 0; k < all.size(); k += 5)
        CHECK(R.mul(x, R.add(y, all[k])) == R.add(R.mul(x, y), R.mul(x, all[k])));
  // the q-power Frobenius is trivial on O_r itself; the absolute p-power
  // Frobenius fixes exactly F_2[t]/t^2
  int fixed_q = 0, fixed_p = 0;
  for (const RElem& x : all) {
    if (R.frobenius_q(x) == x) ++fixed_q;
    if (R.frobenius_p(x) == x) ++fixed_p;
  }
  CHECK(fixed_q == 16);
  CHECK(fixed_p == 4);
}

TEST_CASE("embeddings between extension degrees") {
  RingTower t(RingSpec{3, 1, 3, RingKind::mixed, 2});
  const Ring& S = t.ring(3, 1);
  const Ring& B = t.ring(3, 2);
  // embed is a ring morphism on a sweep
  for (int x = 0; x < 27; ++x)
    for (int y = 0; y < 27; y += 4) {
      RElem ex = t.embed(S.from_int(x), B), ey = t.embed(S.from_int(y), B);
      CHECK(t.embed(S.mul(S.from_int(x), S.from_int(y)), B) == B.mul(ex, ey));
      CHECK(t.embed(S.add(S.from_int(x), S.from_int(y)), B) == B.add(ex, ey));
    }
  // project returns, and rejects elements outside the subring
  RElem v = t.embed(S.from_int(14), B);
  CHECK(t.project(v, S) == S.from_int(14));
  CHECK_THROWS(t.project(B.gen(), S));
  // relative coordinates round trip
  RElem z = B.add(B.gen(), B.from_int(5));
  auto c = t.rel_coords(z);
  CHECK(c.size() == 2);
  CHECK(t.rel_eval(c, B) == z);
}
