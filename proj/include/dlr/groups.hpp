#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dlr/abelian.hpp"
#include "dlr/matrix.hpp"

namespace dlr {

// GL_n(O_r) together with one maximal torus type, everything living over the
// splitting ring O^(A)_r, A = lcm of the partition blocks. Rational elements
// (entrywise F-fixed) form the group GL_n(O_r).
class GL {
 public:
  GL(std::shared_ptr<RingTower> tower, int n, int r, std::vector<int> partition,
     uint64_t guard = (1u << 24));

  const RingTower& tower() const { return *tower_; }
  int n() const { return n_; }
  int r() const { return r_; }
  int l() const { return l_; }        // ceil(r/2)
  int lp() const { return lp_; }      // floor(r/2)
  int64_t q() const { return amb_->q(); }
  int64_t p() const { return amb_->p(); }
  const Ring& amb() const { return *amb_; }            // splitting ring, level r
  const Ring& amb_at(int level) const;                 // splitting ring, lower level
  const std::vector<int>& partition() const { return partition_; }
  const Ring& block_ring(int i, int level) const;      // O^(a_i) at a level
  int blocks() const { return (int)partition_.size(); }
  uint64_t guard() const { return guard_; }
  std::string key() const;  // e.g. "gl2:r3:q3:torus(2)"

  int phi_plus() const { return n_ * (n_ - 1) / 2; }
  uint64_t order_G1F() const;   // |GL_n(F_q)|
  uint64_t order_T1F() const;   // prod (q^{a_i} - 1)
  uint64_t order_GF() const;    // q^{(r-1) n^2} |GL_n(F_q)|
  // p'-part of |G_1^F| / |T_1^F|
  uint64_t index_p_prime() const;

  // ---- torus ----
  // coords[i] is a unit of block_ring(i, level of the matrix)
  Mat torus_point(const std::vector<RElem>& coords) const;  // full level
  Mat torus_point_at(int level, const std::vector<RElem>& coords) const;
  bool try_torus_coords(const Mat& g, std::vector<RElem>* coords) const;
  std::vector<RElem> torus_coords(const Mat& g) const;  // throws on failure

  // ---- memberships (g at full level over amb) ----
  bool in_GF(const Mat& g) const;
  bool in_GiF(const Mat& g, int i) const;
  bool in_TF(const Mat& g) const;
  // (T G^j)^F and (T^1 G^j)^F
  bool in_TGjF(const Mat& g, int j) const;
  bool in_T1GjF(const Mat& g, int j) const;

  // ---- components ----
  // torus part of g in (TG^l)^F: unique t with g t^{-1} in the level-l
  // product of root subgroups; throws if g is outside (TG^l)^F
  Mat t_component(const Mat& g) const;
  // torus coordinates of t_component(g), cached across calls (the map is
  // independent of any character choice)
  std::vector<RElem> t_component_coords(const Mat& g) const;
  // coordinates of g in the off-torus quotient at level l' (the symplectic
  // space used by the Heisenberg machinery), cached
  std::vector<uint32_t> off_torus_coords(const Mat& g) const;
  // image of g in T_1^F (coords form), for g in (TG^{l'})^F
  std::vector<RElem> torus_quotient_coords(const Mat& g) const;
  // Teichmuller section of torus_quotient: the unique Teichmuller torus
  // point in the coset g (T^1 G^{l'})^F
  Mat teich_part(const Mat& g) const;

  // ---- level-1 linear algebra ----
  // basis of the torus Lie algebra inside M_n(F_q), rational level-1 mats
  const std::vector<Mat>& lieT_basis_1() const;
  // deterministic complement basis (the off-torus directions), F_p-basis
  const std::vector<Mat>& complement_basis_1() const;
  // write a rational level-1 matrix as lie-torus part + complement part;
  // returns F_p coordinates w.r.t. the two bases
  void decompose_1(const Mat& m1, std::vector<uint32_t>* lie_c,
                   std::vector<uint32_t>* comp_c) const;
  // same decomposition at a given level, prime-ring coordinates; used by
  // t_component. Outputs the lie-torus part per block.
  std::vector<RElem> lie_torus_part(const Mat& m, int level) const;

  // Teichmuller entrywise lift of a rational level-1 matrix
  Mat teich_lift(const Mat& m1) const;
  // block-diagonal regular-representation matrix of arbitrary (not
  // necessarily unit) block elements; the Lie-algebra picture of the torus
  Mat block_linear_matrix(const std::vector<RElem>& coords) const;

  // ---- enumerators (deterministic order) ----
  void for_G1F(const std::function<void(const Mat&)>& f) const;  // level-1 mats
  void for_T1F(const std::function<void(const Mat&)>& f) const;  // full level
  void for_TF_coords(const std::function<void(const std::vector<RElem>&)>& f) const;
  void for_GiF(int i, const std::function<void(const Mat&)>& f) const;
  void for_T1GjF(int j, const std::function<void(const Mat&)>& f) const;
  void for_TGjF(int j, const std::function<void(const Mat&)>& f) const;
  void for_GF(const std::function<void(const Mat&)>& f) const;  // guarded
  uint64_t size_T1GjF(int j) const;
  uint64_t size_TGjF(int j) const;

  // ---- Weyl group ----
  const std::vector<Mat>& weyl_reps() const;  // rational, first rep = identity
  uint64_t weyl_order_expected() const;

  // ---- coset data ----
  // transversal of (T G^{l'})^F in G^F, and the cached inverses
  const std::vector<Mat>& dl_transversal() const;
  const std::vector<Mat>& dl_transversal_inv() const;
  // level-1 coset representatives of T_1^F in G_1^F
  const std::vector<Mat>& coset_reps_1() const;

  // ---- root data ----
  struct RootLine {
    int i, j;                 // split positions, i != j
    std::vector<Mat> norm_image;  // subgroup of (T^{r-1})^F, deduped
  };
  const std::vector<RootLine>& root_lines() const;
  // root subgroup point C (1 + z E_ij) C^{-1} at the ambient level
  Mat root_point(int i, int j, const RElem& z) const;
  // coroot point C diag(..z..z^{-1}..) C^{-1}
  Mat coroot_point(int i, int j, const RElem& z) const;

  // ---- eigenvalue data for s in T_1^F ----
  struct SemisimpleData {
    int phi_s_plus;     // # positive roots alpha with alpha(s) = 1
    int rk_centralizer; // F_q-rank of the connected centralizer
  };
  SemisimpleData semisimple_data(const std::vector<RElem>& t1_coords) const;
  bool is_regular_semisimple(const std::vector<RElem>& t1_coords) const;

  // abelian structure of each torus block's unit group (cached)
  const AbelianStructure<RingUnitGroup>& block_unit_structure(int i) const;
  // T_1^F as a list of coordinate tuples (Teichmuller units), with the
  // per-block Teichmuller generators
  const std::vector<std::vector<RElem>>& t1_list() const;
  const std::vector<RElem>& t1_generators() const;  // one per block

  const Mat& conjugator() const { return conj_; }

 private:
  void build_torus();
  void build_level1_bases() const;
  const std::vector<std::vector<uint64_t>>& lie_solver(int level) const;

  std::shared_ptr<RingTower> tower_;
  int n_, r_, l_, lp_, A_;
  uint64_t guard_;
  std::vector<int> partition_;
  std::vector<int> block_start_;
  const Ring* amb_;
  Mat conj_, conj_inv_;  // diagonalizer of the block torus

  mutable std::mutex mu_;
  mutable std::vector<Mat> lieT1_, comp1_;
  mutable std::vector<std::vector<uint64_t>> decomp1_inv_;  // F_p matrix inverse
  mutable std::map<int, std::vector<std::vector<uint64_t>>> lie_solver_;  // per level
  mutable std::vector<Mat> weyl_;
  mutable std::vector<Mat> transversal_;
  mutable std::vector<Mat> transversal_inv_;
  mutable std::vector<Mat> cosets1_;
  mutable std::vector<RootLine> root_lines_;
  mutable std::vector<std::vector<RElem>> t1_list_;
  mutable std::vector<RElem> t1_gens_;
  mutable std::map<int, std::unique_ptr<AbelianStructure<RingUnitGroup>>> block_structs_;
  mutable std::map<int, std::unique_ptr<RingUnitGroup>> block_groups_;
  mutable std::mutex comp_mu_;
  mutable std::map<std::vector<uint64_t>, std::vector<RElem>> tcomp_cache_;
  mutable std::map<std::vector<uint64_t>, std::vector<uint32_t>> vcoord_cache_;
};

}  // namespace dlr
