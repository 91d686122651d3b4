#pragma once

#include "herald/fitness/bmse.hpp"
#include "herald/fock/state.hpp"

namespace herald::fitness {

// Classical-strategy reference probes at a given mean photon number, used to
// normalize the performance of heralded states.
enum class ReferenceKind {
  CoherentVacuumBS,  // coherent |sqrt(nbar)> mixed with vacuum on a 50:50 BS
  TwoSqueezedVac,    // squeezed vacuum in each arm, sinh^2 r = nbar / 2
};

// Two-mode reference state carrying `nbar` photons in total, laid out on the
// same pair of arms the estimation scheme uses.  For CoherentVacuumBS the
// returned ket is the post-splitter state (each arm coherent with nbar/2);
// for TwoSqueezedVac it is the product of two equally squeezed vacua.
fock::KetState reference_states(ReferenceKind kind, double nbar,
                                int truncation);

// Single-arm probe of the same family and mean photon number, suitable for
// bmse_fixed_povm (which duplicates it onto two arms internally).
fock::KetState reference_probe(ReferenceKind kind, double nbar,
                               int truncation);

// Phase-estimation benchmark F / nbar of single-mode squeezed vacuum with
// mean photon number nbar, evaluated numerically in the truncated basis.
// Converges to the closed form 8 (1 + nbar) as the truncation grows
// (Var(n) = 2 nbar (nbar + 1) for squeezed vacuum).
double squeezed_vacuum_qfi_baseline(double nbar, int truncation = 200);

// The same benchmark behind a pure-loss channel of strength gamma: the
// pre-loss squeezing is chosen so the SURVIVING state still carries nbar
// photons, and F comes from the mixed-state formula.  gamma = 0 recovers
// the pure baseline.
double lossy_squeezed_vacuum_qfi_baseline(double nbar, double gamma,
                                          int truncation = 120);

}  // namespace herald::fitness
