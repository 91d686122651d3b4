#pragma once

#include "herald/fock/expm.hpp"
#include "herald/fock/ops.hpp"

namespace herald::toolbox {

using fock::Complex;
using fock::ExpmOptions;
using fock::KetState;
using fock::SparseOperator;
using fock::Truncation;

// Generators, in the local space of their mode signature.  The evolution is
// exp(generator); any scale is already folded in.
//   displacement:     alpha adag - conj(alpha) a
//   squeeze:          (conj(zeta) a^2 - zeta adag^2) / 2
//   two-mode squeeze: conj(zeta) a_i a_j - zeta adag_i adag_j
//   phase:            i phi n
//   beam splitter:    theta (a_i adag_j - adag_i a_j), theta = acos(sqrt(T))
SparseOperator gen_displacement(Complex alpha, int mode, Truncation t);
SparseOperator gen_squeeze(Complex zeta, int mode, Truncation t);
SparseOperator gen_two_mode_squeeze(Complex zeta, int mode_i, int mode_j,
                                    Truncation t);
SparseOperator gen_phase(double phi, int mode, Truncation t);
SparseOperator gen_beamsplitter(double transmission, int mode_i, int mode_j,
                                Truncation t);

// In-place evolutions via expm_action on the embedded generator.
void apply_displacement(KetState& psi, int mode, Complex alpha,
                        const ExpmOptions& opt = {});
void apply_squeeze(KetState& psi, int mode, Complex zeta,
                   const ExpmOptions& opt = {});
void apply_two_mode_squeeze(KetState& psi, int mode_i, int mode_j,
                            Complex zeta, const ExpmOptions& opt = {});
void apply_phase(KetState& psi, int mode, double phi,
                 const ExpmOptions& opt = {});
void apply_beamsplitter(KetState& psi, int mode_i, int mode_j,
                        double transmission, const ExpmOptions& opt = {});

}  // namespace herald::toolbox
