#pragma once

#include "dlr/heisenberg.hpp"

namespace dlr {

struct SteinbergData {
  int phi_s_plus = 0;
  int rk_G1 = 0;
  int rk_T1 = 0;
  int rk_centralizer = 0;
  int st_sign = 1;          // (-1)^{rk_G1 + rk_centralizer}
  int64_t st_value_mag = 1; // q^{phi_s_plus}
};
SteinbergData steinberg_data(const GL& gl, const std::vector<RElem>& t1_coords);

// The algebraised character: the sign e_theta(1)^r together with the
// genuine character induced from the canonical extension.
struct AlgebraisedDL {
  const GL* gl = nullptr;
  TorusChar theta;
  ExtendedRep rhohat;
  int sign = 1;  // e_theta(1)^r

  CycloNum chi(const Mat& g) const;  // induced character, transversal rule
  int64_t chi_dim() const;           // degree from the construction
  int64_t expected_dim() const;      // |G_1^F/T_1^F|_{p'} q^{(r-1) #Phi^+}
};

AlgebraisedDL build_dl(const TorusChar& theta, const GenericityClassifier& cls);

// degree: constructed value against the closed form (and chi(1))
bool dim_check(const AlgebraisedDL& dl);

// sign * chi(s) = sum over W(T)^F of (^w theta)(s) at regular semisimple s
bool rss_character_check(const AlgebraisedDL& dl, const std::vector<RElem>& s_coords);

// <chi, chi>_{G^F} by the Mackey double-coset rule
Rat mackey_inner_product(const AlgebraisedDL& dl);

struct OrbitDescriptor {
  std::vector<std::vector<uint64_t>> support_keys;  // level-1 matrices, sorted
  int64_t multiplicity = 0;
  bool single_orbit = false;
  bool semisimple = false;
  bool regular = false;
  bool matches_beta_orbit = false;
  bool multiplicities_constant = false;
};
OrbitDescriptor omega(const AlgebraisedDL& dl);

struct HillCount {
  uint64_t theta_matching = 0;  // regular theta with the requested orbit
  uint64_t distinct_chi = 0;
  uint64_t expected = 0;  // |T^F| at level r-1
};
// count distinct induced characters over the orbit of the given residue
HillCount hill_count(const GL& gl, const GenericityClassifier& cls,
                     const std::vector<RElem>& orbit_residue);

// characteristic polynomial of a rational level-1 matrix, coefficients in
// F_q, lowest degree first, monic
std::vector<RElem> char_poly_1(const GL& gl, const Mat& y1);
std::vector<RElem> min_poly_1(const GL& gl, const Mat& y1);
bool poly_squarefree_1(const GL& gl, const std::vector<RElem>& poly);

}  // namespace dlr
