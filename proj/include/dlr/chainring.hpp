#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace dlr {

enum class RingKind { mixed, equal };

// Spec of the chain ring O_r with residue field F_q (q = p^e) and of its
// unramified extensions O^(a)_r.
struct RingSpec {
  int64_t p = 2;
  int e = 1;
  int r = 1;
  RingKind kind = RingKind::mixed;
  int a = 1;

  int64_t q() const;
  std::string key() const;  // e.g. "mixed:p3:e1:r3:a2"
  static RingSpec parse(const std::string& key);
};

class RingTower;

// One ring in the tower: degree d = e*a over the prime chain ring
// (Z/p^level or F_p[t]/t^level), modulus h with Teichmueller generator x.
// Immutable after construction; elements hold a raw pointer to it.
class Ring {
 public:
  static constexpr int kMaxDeg = 6;
  using Coords = std::array<uint64_t, kMaxDeg>;

  struct Elem {
    const Ring* ring = nullptr;
    Coords c{};

    bool operator==(const Elem& o) const;
    bool operator!=(const Elem& o) const { return !(*this == o); }
    // lexicographic on coordinates, for deterministic enumeration picks
    bool operator<(const Elem& o) const;
  };

  int64_t p() const { return p_; }
  int e() const { return e_; }
  int a() const { return a_; }
  int level() const { return level_; }
  int deg() const { return d_; }
  RingKind kind() const { return kind_; }
  int64_t q() const { return q_; }          // residue field of O_r
  int64_t qa() const { return qa_; }        // residue field of this ring
  const RingTower* tower() const { return tower_; }
  uint64_t size() const;                    // p^(d*level)
  uint64_t unit_count() const;              // q_a^(level-1) * (q_a - 1)
  const std::vector<uint64_t>& modulus() const { return h_; }

  Elem zero() const;
  Elem one() const;
  Elem gen() const;  // the class of x (Teichmueller element)
  Elem from_coords(const std::vector<uint64_t>& c) const;
  Elem from_int(int64_t v) const;  // v * 1, v reduced into the prime ring

  Elem add(const Elem& x, const Elem& y) const;
  Elem sub(const Elem& x, const Elem& y) const;
  Elem neg(const Elem& x) const;
  Elem mul(const Elem& x, const Elem& y) const;
  Elem mul_base(const Elem& x, uint64_t b) const;
  Elem pow(const Elem& x, uint64_t k) const;
  bool is_zero(const Elem& x) const;
  bool is_unit(const Elem& x) const;
  Elem inverse(const Elem& x) const;  // throws on non-unit

  int valuation(const Elem& x) const;  // in [0, level], val(0) = level
  Elem mul_pi(const Elem& x, int k) const;
  // exact division by pi^k into the ring at level-k (requires val >= k)
  Elem div_pi(const Elem& x, int k) const;
  Elem reduce_to(const Elem& x, int new_level) const;  // ring morphism
  Elem residue(const Elem& x) const { return reduce_to(x, 1); }
  // lift coordinates upward (a section of reduce_to, not a morphism)
  Elem lift_to(const Elem& x, int new_level) const;

  Elem frobenius_p(const Elem& x) const;      // absolute p-power Frobenius
  Elem frobenius_q(const Elem& x) const;      // F = frobenius_p^e
  bool is_rational(const Elem& x) const;      // fixed by F
  Elem teichmuller(const Elem& residue1) const;  // residue1 in level-1 ring
  Elem teichmuller_here(const Elem& x) const;    // Teichmueller lift of residue(x)
  bool is_teichmuller(const Elem& x) const;

  // absolute trace to the prime chain ring, returned as a base value
  uint64_t trace_abs(const Elem& x) const;
  // relative trace / norm for F = frobenius_q over the degree-a tower
  Elem trace_F(const Elem& x, int steps) const;
  Elem norm_F(const Elem& x, int steps) const;

  uint64_t mult_order(const Elem& x) const;  // order of a unit
  // deterministic generator of the Teichmueller group mu_{qa-1}
  Elem teich_generator() const;

  void enumerate(const std::function<void(const Elem&)>& f) const;
  // all elements of the level-1 ring (the residue field)
  const std::vector<Elem>& residue_field() const;

  std::string str(const Elem& x) const;
  // packs coordinates into a single integer key (level fits 64 bits)
  // usable for hashing; coords are already canonical
  void append_key(const Elem& x, std::vector<uint64_t>* out) const;

  // arithmetic on packed values of the prime chain ring at this level
  uint64_t badd(uint64_t x, uint64_t y) const;
  uint64_t bsub(uint64_t x, uint64_t y) const;
  uint64_t bneg(uint64_t x) const;
  uint64_t bmul(uint64_t x, uint64_t y) const;
  uint64_t binv(uint64_t x) const;
  int bval(uint64_t x) const;
  uint64_t breduce(uint64_t x, int new_level) const;
  uint64_t bdivpi(uint64_t x, int k) const;
  uint64_t bmulpi(uint64_t x, int k) const;

 private:
  friend class RingTower;
  Ring() = default;

  const RingTower* tower_ = nullptr;
  RingKind kind_ = RingKind::mixed;
  int64_t p_ = 2;
  int e_ = 1, a_ = 1, level_ = 1, d_ = 1;
  int64_t q_ = 2, qa_ = 2;
  uint64_t pl_ = 2;  // p^level
  std::vector<uint64_t> h_;                       // modulus, degree d, monic
  std::vector<std::array<uint64_t, kMaxDeg>> red_;  // x^d .. x^(2d-2) mod h
  std::vector<Coords> frob_cols_;                 // columns of frobenius_p
  mutable std::mutex cache_mu_;
  mutable std::vector<Elem> residue_field_;       // lazily built
  mutable std::map<std::vector<uint64_t>, Elem> teich_cache_;
  mutable Elem teich_gen_;
  mutable bool teich_gen_ready_ = false;
};

using RElem = Ring::Elem;

// Owns the rings for one RingSpec family: all levels 1..r and all extension
// degrees needed, plus the embeddings between them. Thread-safe after the
// needed rings have been touched once.
class RingTower {
 public:
  explicit RingTower(const RingSpec& spec);

  const RingSpec& spec() const { return spec_; }
  // ring at the given level with extension degree a over O_r  (d = e*a)
  const Ring& ring(int level, int a = 1) const;

  // embedding O^(b) -> O^(a) at one level, b | a
  RElem embed(const RElem& x, const Ring& to) const;
  // section of embed; throws if x is not in the image
  RElem project(const RElem& x, const Ring& to) const;
  bool try_project(const RElem& x, const Ring& to, RElem* out) const;

  // coordinates of x in ring(level, a) over O_r w.r.t. the basis {gen^j}
  std::vector<RElem> rel_coords(const RElem& x) const;
  RElem rel_eval(const std::vector<RElem>& c, const Ring& to) const;

 private:
  struct EmbedData {
    RElem root_image;                        // image of the small generator
    std::vector<std::vector<uint64_t>> fwd;  // prime-linear matrix, col-major
    // row-reduced data for the section
    std::vector<std::vector<uint64_t>> sec;
    std::vector<int> sec_perm;
  };
  struct RelData {
    std::vector<std::vector<uint64_t>> inv;  // inverse of the basis matrix
  };

  const EmbedData& embed_data(int level, int b, int a) const;
  const RelData& rel_data(int level, int a) const;

  RingSpec spec_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<Ring>> rings_;
  mutable std::map<std::tuple<int, int, int>, std::unique_ptr<EmbedData>> embeds_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<RelData>> rels_;
};

// least-lex monic irreducible of degree d over F_p with unit constant term
std::vector<int64_t> least_irreducible(int64_t p, int d);

}  // namespace dlr
