#pragma once

#include "herald/fock/state.hpp"

namespace herald::fitness {

// Quantum Fisher information for single-mode phase encoding exp(-i n theta).
//
// Pure probe:  F = 4 Var(n) = 4 (<n^2> - <n>^2).
// Throws std::invalid_argument if |psi| is not normalized to 1e-6.
double qfi_pure(const fock::KetState& psi);

// Mixed probe: with rho = V diag(q) V^dag and M = V^dag diag(n) V,
//   F = sum_i 4 q_i (sum_j |M_ij|^2 - M_ii^2)
//       - sum_{i != j} 8 q_i q_j / (q_i + q_j) |M_ij|^2,
// both sums over eigenvalues kept above eig_cutoff * max_i q_i (pairs are
// also skipped when q_i + q_j falls below the same cutoff).  Equivalent to
// the standard spectral form 2 sum_{ij} (q_i - q_j)^2 / (q_i + q_j) |n_ij|^2.
// Throws std::invalid_argument if rho is not a density matrix (Hermitian,
// unit trace, PSD up to tolerance).
double qfi_mixed(const fock::MixedState& rho, double eig_cutoff = 1e-12);

// Photon-normalized figure of merit F / <n>.  Returns -infinity when the
// mean photon number is below nbar_floor (an empty probe carries no phase
// information, so its ratio is meaningless rather than large).
double qfi_scaled(const fock::KetState& psi, double nbar_floor = 1e-6);
double qfi_scaled(const fock::MixedState& rho, double nbar_floor = 1e-6);

}  // namespace herald::fitness
