#pragma once

#include "dlr/dlchar.hpp"
#include "dlr/heisenberg.hpp"

// Independent brute-force implementations used to cross-check the optimized
// paths. Everything here is definitional and deliberately slow.
namespace dlr::oracles {

// induced character of theta-tilde from (T^1 G^l)^F to (T^1 G^{l'})^F by the
// full-group averaging formula
CycloNum induced_full_sum(const TorusChar& theta, const Mat& h);

// all Lagrangian subspaces of the pairing, by exhaustive subspace search
std::vector<std::vector<std::vector<uint32_t>>> all_lagrangians(const SymplecticSpace& V);

// <f, f>_{G^F} by full-group summation
Rat full_group_inner_product(const GL& gl, const std::function<CycloNum(const Mat&)>& f);

// brute-force order of the stabilizer of theta-tilde on (G^l)^F inside G^F
uint64_t stabilizer_order_bruteforce(const TorusChar& theta);

// conjugate x into the Teichmuller complement by searching (T^1 G^{l'})^F;
// fills the torus coordinates of the hit
bool conjugate_into_complement(const GL& gl, const Mat& x, std::vector<RElem>* coords);

// multiplicative order of a group element
uint64_t element_order(const GL& gl, const Mat& x, uint64_t bound);

}  // namespace dlr::oracles
