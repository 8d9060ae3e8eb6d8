#pragma once

#include "dlr/cmat.hpp"
#include "dlr/tchar.hpp"

namespace dlr {

// The commutator pairing on V = (T^1 G^{l'})^F / (T^1 G^l)^F, an F_p-space
// with basis lifts 1 + pi^{l'} [x_i] over the off-torus directions.
struct SymplecticSpace {
  const GL* gl = nullptr;
  int dim = 0;  // 2 e #Phi^+ for odd r
  std::vector<Mat> basis_lifts;
  std::vector<std::vector<uint32_t>> pairing;  // dim x dim over F_p
};

SymplecticSpace build_symplectic(const TorusChar& theta, const GenericityClassifier& cls);

// coordinates of h in V (the off-torus directions mod the kernel)
std::vector<uint32_t> v_coords(const GL& gl, const Mat& h);

// greedy isotropic completion; returns a basis of a maximal isotropic
// subspace as F_p coordinate vectors
std::vector<std::vector<uint32_t>> find_lagrangian(const SymplecticSpace& V);
// the exhaustive subspace search oracle lives in the test support library

// Monomial model of the Heisenberg lift: the unique irreducible of
// (T^1 G^{l'})^F over the inflated character, of dimension q^{#Phi^+}.
struct HeisenbergRep {
  const GL* gl = nullptr;
  TorusChar theta;
  SymplecticSpace space;
  std::vector<std::vector<uint32_t>> lagr;    // Lagrangian basis vectors
  std::vector<std::vector<uint32_t>> compl_u; // transversal directions
  std::vector<CycloNum> chi_gen;              // character values on the Lagrangian lifts
  int dim = 0;

  // change of basis: V-coordinates -> (L | U) coordinates
  std::vector<std::vector<uint32_t>> lu_inverse;
  // lifts of the Lagrangian and transversal basis vectors; the sections of
  // the coset spaces are ordered power products of these
  std::vector<Mat> lagr_lifts;
  std::vector<Mat> compl_lifts;

  // group-element lifts of arbitrary V vectors (fixed generator order)
  Mat lift_vector(const std::vector<uint32_t>& v) const;
  Mat section_L(const std::vector<uint32_t>& wl) const;
  Mat section_U(const std::vector<uint32_t>& u) const;
  // the extended linear character on the Lagrangian preimage
  CycloNum chi(const Mat& k_l) const;
  // monomial matrix at any h in (T^1 G^{l'})^F
  CMat matrix(const Mat& h) const;
  // trace, via the cached class matrices
  CycloNum trace(const Mat& h) const;
  // exact <tr, tr> over (T^1 G^{l'})^F computed by V-classes
  Rat self_inner_product() const;

  // cached monomial matrices rho(lift(v)) for every v in V
  std::vector<CMat> class_mats;
  std::vector<uint64_t> v_index_mul;  // mixed-radix helpers
  size_t v_index(const std::vector<uint32_t>& v) const;
};

HeisenbergRep build_rho(const TorusChar& theta, const GenericityClassifier& cls,
                        const std::vector<std::vector<uint32_t>>* lagrangian_override = nullptr);

// Extension of the Heisenberg lift to (T G^{l'})^F with the torus-trace
// normalization; for even r this degenerates to the inflated character.
struct ExtendedRep {
  const GL* gl = nullptr;
  TorusChar theta;
  bool even_path = false;
  HeisenbergRep rho;                // odd r only
  std::vector<CMat> gen_mats;       // normalized intertwiners, one per block
  std::vector<uint32_t> lambda_exp; // correction character, per block generator
  int dim = 1;

  // trace of the extension at any element of (TG^{l'})^F
  CycloNum trace(const Mat& g) const;
  // full matrix at any element (dim x dim; 1 x 1 on the even path)
  CMat matrix(const Mat& g) const;
  // closed-form torus trace: (-1)^{rk G_1 + rk C(s)} q^{#Phi_s^+} theta(s)
  CycloNum torus_target(const std::vector<RElem>& t1_coords) const;
  // trace of the uncorrected extension on the torus part
  CycloNum raw_torus_trace(const std::vector<RElem>& t1_coords) const;
  CycloNum lambda_value(const std::vector<RElem>& t1_coords) const;
  // matrix of the A-part for a Teichmuller tuple (cached)
  const CMat& a_matrix(const std::vector<RElem>& t1_coords) const;

  // <tr, tr> over (TG^{l'})^F, exact, via V-classes within each A-coset
  Rat self_inner_product() const;

  mutable std::map<std::vector<uint64_t>, CMat> a_cache;
  mutable std::vector<std::vector<CMat>> gen_pows;
};

// builds the canonical extension: intertwiners, finite-order normalization,
// then the torus-trace correction character
ExtendedRep build_extended(const TorusChar& theta, const GenericityClassifier& cls);
// the uncorrected extension (any normalized one); exposed for the
// extension-independence checks
ExtendedRep build_extended_raw(const TorusChar& theta, const GenericityClassifier& cls);
void apply_canonical_correction(ExtendedRep* rep);

}  // namespace dlr
