#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dlr/groups.hpp"

namespace dlr {

// Primitive additive character of the chain ring the element lives in,
// evaluated through the absolute trace: conductor p^level in mixed
// characteristic, p in equal characteristic (top digit of the trace).
CycloNum psi_eval(const RElem& y);
// the level-1 character of F_q from a tower
CycloNum fixed_psi(const RingTower& tower, const RElem& residue_elem);

// Character of T^F in per-block exponent coordinates.
struct TorusChar {
  const GL* gl = nullptr;
  std::vector<std::vector<uint32_t>> exps;

  CycloNum eval_coords(const std::vector<RElem>& coords) const;
  CycloNum eval_point(const Mat& t) const;
  // conductor and value exponent: the value is zeta_N^k
  uint32_t conductor() const;
  uint64_t exponent_coords(const std::vector<RElem>& coords, uint32_t N) const;
  bool is_one_at(const std::vector<RElem>& coords) const;
  bool is_trivial() const;
  std::string key() const;
};

uint64_t theta_count(const GL& gl);
TorusChar theta_from_index(const GL& gl, uint64_t index);
void for_all_theta(const GL& gl, const std::function<void(const TorusChar&)>& f);

// inflation of theta to (TG^l)^F through the torus component
CycloNum theta_tilde(const TorusChar& theta, const Mat& g);

// the element beta of Lie(T)(O_{l'}) dual to theta-tilde on (G^l)^F
struct Beta {
  std::vector<RElem> blocks;          // in ring(l', a_i)
  std::vector<RElem> residue_blocks;  // in ring(1, a_i)
  Mat avatar;                         // block-linear matrix at level l'
};
Beta beta_of_theta(const TorusChar& theta);
// level-1 residue only (fast path used in sweeps)
std::vector<RElem> beta_residue(const TorusChar& theta);
// eigenvalues of the residue are pairwise distinct
bool residue_is_regular(const GL& gl, const std::vector<RElem>& residue_blocks);

struct GenericityReport {
  bool regular_normmap = false;
  bool regular_beta = false;
  bool general_position = false;
  bool stabilizer_condition = false;
  bool strongly_generic = false;
  int witness_root = -1;   // root line on which theta is trivial
  int witness_weyl = -1;   // nontrivial Weyl rep fixing theta
  std::vector<RElem> beta_res;
  std::string beta_charpoly;  // char poly of the residue, report key
};

// Classifier with per-instance caches (norm-image coordinates, centralizer
// counts per beta residue).
class GenericityClassifier {
 public:
  explicit GenericityClassifier(const GL& gl);

  bool is_regular_normmap(const TorusChar& theta, int* witness = nullptr) const;
  bool is_regular_beta(const TorusChar& theta) const;
  bool is_general_position(const TorusChar& theta, int* witness = nullptr) const;
  bool stabilizer_condition(const TorusChar& theta) const;
  GenericityReport classify(const TorusChar& theta) const;

 private:
  uint64_t centralizer_order(const Mat& avatar1) const;

  const GL* gl_;
  // per root line: per element, the torus coords (for fast theta evals)
  std::vector<std::vector<std::vector<RElem>>> norm_coords_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<uint64_t>, uint64_t> centralizer_cache_;
};

// ^w theta, as a character in exponent coordinates
TorusChar w_twist(const TorusChar& theta, const Mat& w);
bool theta_fixed_by(const TorusChar& theta, const Mat& w);

struct DensityRow {
  int m;
  uint64_t theta_total;
  uint64_t theta_regular;
  uint64_t beta_total;
  uint64_t beta_regular;
  Rat theta_fraction;
  Rat beta_fraction;
};
// rebuilds the tower with q -> q^m and counts regular characters directly,
// next to the independent residue count
std::vector<DensityRow> density_experiment(const RingSpec& base, int n,
                                           const std::vector<int>& partition, int r,
                                           int m_max, uint64_t guard = (1u << 24));

}  // namespace dlr
