#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dlr/chainring.hpp"
#include "dlr/cyclo.hpp"

namespace dlr {

std::vector<std::pair<uint64_t, int>> factorize_u64(uint64_t n);

// Group model concept used below:
//   struct G {
//     using Elem = ...;
//     Elem identity() const;
//     Elem mul(const Elem&, const Elem&) const;
//     std::vector<uint64_t> key(const Elem&) const;   // canonical encoding
//     void enumerate(const std::function<void(const Elem&)>&) const;
//   };

// Independent generating set of a finite abelian group with discrete logs.
// Coprime primary parts are merged slotwise, so the orders come out in
// invariant-factor style (largest first).
template <class G>
struct AbelianStructure {
  const G* group = nullptr;
  std::vector<typename G::Elem> gens;
  std::vector<uint64_t> orders;
  std::map<std::vector<uint64_t>, std::vector<uint32_t>> dlog;
  uint64_t group_order = 1;

  std::vector<uint32_t> coords(const typename G::Elem& x) const {
    auto it = dlog.find(group->key(x));
    if (it == dlog.end()) throw std::runtime_error("AbelianStructure: unknown element");
    return it->second;
  }
  uint32_t character_conductor() const {
    uint32_t N = 1;
    for (uint64_t d : orders) N = (uint32_t)std::lcm<uint64_t>(N, d);
    return N;
  }
};

template <class G>
typename G::Elem group_pow(const G& g, typename G::Elem x, uint64_t k) {
  typename G::Elem r = g.identity();
  while (k) {
    if (k & 1) r = g.mul(r, x);
    x = g.mul(x, x);
    k >>= 1;
  }
  return r;
}

template <class G>
AbelianStructure<G> abelian_structure(const G& g, uint64_t guard = (1u << 24)) {
  using Elem = typename G::Elem;
  std::vector<Elem> elems;
  std::map<std::vector<uint64_t>, size_t> index;
  g.enumerate([&](const Elem& x) {
    if (elems.size() >= guard) throw std::runtime_error("abelian_structure: guard exceeded");
    auto k = g.key(x);
    if (index.count(k)) throw std::runtime_error("abelian_structure: duplicate element");
    index.emplace(std::move(k), elems.size());
    elems.push_back(x);
  });
  uint64_t n = elems.size();
  if (n == 0) throw std::runtime_error("abelian_structure: empty enumeration");
  for (size_t i = 0; i < elems.size(); i += elems.size() / 37 + 1)
    for (size_t j = 0; j < elems.size(); j += elems.size() / 41 + 1)
      if (g.key(g.mul(elems[i], elems[j])) != g.key(g.mul(elems[j], elems[i])))
        throw std::runtime_error("abelian_structure: group is not abelian");

  struct PrimaryBasis {
    std::vector<Elem> gens;
    std::vector<uint64_t> orders;
  };
  std::vector<PrimaryBasis> parts;

  for (auto [ell, e] : factorize_u64(n)) {
    uint64_t elle = 1;
    for (int i = 0; i < e; ++i) elle *= ell;
    uint64_t cof = n / elle;
    std::map<std::vector<uint64_t>, Elem> prim;  // the ell-primary component
    for (const Elem& x : elems) {
      Elem y = group_pow(g, x, cof);
      prim.emplace(g.key(y), y);
    }
    PrimaryBasis pb;
    // span of the basis found so far: key -> exponents w.r.t. pb.gens
    std::map<std::vector<uint64_t>, std::vector<uint64_t>> span;
    span.emplace(g.key(g.identity()), std::vector<uint64_t>{});
    while (span.size() < prim.size()) {
      // pick an element of maximal order in the quotient by the span
      const Elem* best = nullptr;
      int best_j = -1;
      for (const auto& [key, y] : prim) {
        (void)key;
        int j = 0;
        Elem z = y;
        while (!span.count(g.key(z))) {
          z = group_pow(g, z, ell);
          ++j;
        }
        if (j > best_j) {
          best_j = j;
          best = &y;
        }
      }
      if (best == nullptr || best_j <= 0)
        throw std::runtime_error("abelian_structure: basis search stuck");
      uint64_t k = 1;
      for (int i = 0; i < best_j; ++i) k *= ell;
      // correct the pick inside its span coset so that pick^k = 1
      Elem adjusted = *best;
      const auto& c = span.at(g.key(group_pow(g, *best, k)));
      for (size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        if (c[i] % k != 0)
          throw std::runtime_error("abelian_structure: basis invariant violated");
        adjusted = g.mul(adjusted, group_pow(g, pb.gens[i], (pb.orders[i] - c[i]) / k));
      }
      if (g.key(group_pow(g, adjusted, k)) != g.key(g.identity()))
        throw std::runtime_error("abelian_structure: adjustment failed");
      // extend the span table by the new cyclic factor
      std::vector<std::pair<Elem, std::vector<uint64_t>>> old;
      for (const auto& [key, coords] : span) {
        (void)key;
        Elem z = g.identity();
        for (size_t i = 0; i < coords.size(); ++i)
          z = g.mul(z, group_pow(g, pb.gens[i], coords[i]));
        old.emplace_back(z, coords);
      }
      std::map<std::vector<uint64_t>, std::vector<uint64_t>> nspan;
      Elem acc = g.identity();
      for (uint64_t cc = 0; cc < k; ++cc) {
        for (auto& [z, coords] : old) {
          Elem w = g.mul(z, acc);
          auto nc = coords;
          nc.push_back(cc);
          if (!nspan.emplace(g.key(w), std::move(nc)).second)
            throw std::runtime_error("abelian_structure: dependent generator");
        }
        acc = g.mul(acc, adjusted);
      }
      span = std::move(nspan);
      pb.gens.push_back(adjusted);
      pb.orders.push_back(k);
    }
    parts.push_back(std::move(pb));
  }

  AbelianStructure<G> st;
  st.group = &g;
  st.group_order = n;
  size_t slots = 0;
  for (const auto& pb : parts) slots = std::max(slots, pb.gens.size());
  for (size_t i = 0; i < slots; ++i) {
    Elem z = g.identity();
    uint64_t ord = 1;
    for (const auto& pb : parts) {
      if (i < pb.gens.size()) {
        z = g.mul(z, pb.gens[i]);
        ord *= pb.orders[i];
      }
    }
    st.gens.push_back(z);
    st.orders.push_back(ord);
  }
  // full discrete-log table, which also certifies independence
  uint64_t total = 1;
  for (uint64_t d : st.orders) total *= d;
  if (total != n) throw std::runtime_error("abelian_structure: order product mismatch");
  std::vector<uint32_t> cc(st.gens.size(), 0);
  while (true) {
    Elem z = g.identity();
    for (size_t i = 0; i < st.gens.size(); ++i)
      z = g.mul(z, group_pow(g, st.gens[i], cc[i]));
    if (!st.dlog.emplace(g.key(z), cc).second)
      throw std::runtime_error("abelian_structure: generators not independent");
    size_t i = 0;
    for (; i < cc.size(); ++i) {
      if (++cc[i] < st.orders[i]) break;
      cc[i] = 0;
    }
    if (i == cc.size()) break;
  }
  return st;
}

// Exponent of the character value as a power of zeta_N; N must be a
// multiple of every generator order.
template <class G>
uint64_t character_exponent(const AbelianStructure<G>& st, const std::vector<uint32_t>& m,
                            const typename G::Elem& x, uint32_t N) {
  auto c = st.coords(x);
  uint64_t expo = 0;
  for (size_t i = 0; i < c.size(); ++i) {
    uint64_t step = (uint64_t)N / st.orders[i];
    uint64_t term = (uint64_t)(m[i] % st.orders[i]) * c[i] % st.orders[i];
    expo = (expo + term * step) % N;
  }
  return expo;
}

// Character of an AbelianStructure given by exponents m (m_i modulo orders).
template <class G>
CycloNum eval_character(const AbelianStructure<G>& st, const std::vector<uint32_t>& m,
                        const typename G::Elem& x) {
  uint32_t N = st.character_conductor();
  return CycloNum::root_of_unity(N, (int64_t)character_exponent(st, m, x, N));
}

// Adapter: multiplicative group of units of a chain ring.
struct RingUnitGroup {
  using Elem = RElem;
  const Ring* ring;

  explicit RingUnitGroup(const Ring& r) : ring(&r) {}
  Elem identity() const { return ring->one(); }
  Elem mul(const Elem& x, const Elem& y) const { return ring->mul(x, y); }
  std::vector<uint64_t> key(const Elem& x) const {
    std::vector<uint64_t> k;
    ring->append_key(x, &k);
    return k;
  }
  void enumerate(const std::function<void(const Elem&)>& f) const {
    ring->enumerate([&](const Elem& x) {
      if (ring->is_unit(x)) f(x);
    });
  }
};

// Adapter: additive group of a chain ring.
struct RingAdditiveGroup {
  using Elem = RElem;
  const Ring* ring;

  explicit RingAdditiveGroup(const Ring& r) : ring(&r) {}
  Elem identity() const { return ring->zero(); }
  Elem mul(const Elem& x, const Elem& y) const { return ring->add(x, y); }
  std::vector<uint64_t> key(const Elem& x) const {
    std::vector<uint64_t> k;
    ring->append_key(x, &k);
    return k;
  }
  void enumerate(const std::function<void(const Elem&)>& f) const { ring->enumerate(f); }
};

// Adapter: subgroup of principal units 1 + pi O of a chain ring.
struct PrincipalUnitGroup {
  using Elem = RElem;
  const Ring* ring;

  explicit PrincipalUnitGroup(const Ring& r) : ring(&r) {}
  Elem identity() const { return ring->one(); }
  Elem mul(const Elem& x, const Elem& y) const { return ring->mul(x, y); }
  std::vector<uint64_t> key(const Elem& x) const {
    std::vector<uint64_t> k;
    ring->append_key(x, &k);
    return k;
  }
  void enumerate(const std::function<void(const Elem&)>& f) const {
    const Ring& low = ring->tower()->ring(ring->level() > 1 ? ring->level() - 1 : 1, ring->a());
    if (ring->level() == 1) {
      f(ring->one());
      return;
    }
    low.enumerate([&](const Elem& c) {
      f(ring->add(ring->one(), ring->mul_pi(low.lift_to(c, ring->level()), 1)));
    });
  }
};

// Normalized inner product of two class functions on an enumerable group.
template <class G>
CycloNum class_inner_product(const G& g,
                             const std::function<CycloNum(const typename G::Elem&)>& f1,
                             const std::function<CycloNum(const typename G::Elem&)>& f2,
                             uint64_t guard = (1u << 22)) {
  CycloNum sum = CycloNum::zero();
  uint64_t n = 0;
  g.enumerate([&](const typename G::Elem& x) {
    if (++n > guard) throw std::runtime_error("class_inner_product: guard exceeded");
    sum += f1(x) * f2(x).conj();
  });
  return sum.scaled(Rat(1, (int64_t)n));
}

}  // namespace dlr
