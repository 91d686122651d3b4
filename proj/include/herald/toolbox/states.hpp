#pragma once

#include "herald/fock/expm.hpp"
#include "herald/fock/state.hpp"

namespace herald::toolbox {

using fock::Complex;
using fock::ExpmOptions;
using fock::KetState;
using fock::Truncation;

// A constructed input state plus the probability mass the truncation could
// not represent: for closed-form constructions this is the exact tail mass
// removed before renormalization, for exponential constructions it is the
// occupancy of the top two retained levels (truncated anti-Hermitian
// generators evolve unitarily, so boundary occupancy is the honest pressure
// signal).
struct PreparedState {
  KetState state;
  double leakage = 0.0;
};

PreparedState make_fock(int n, Truncation t);
PreparedState make_coherent(Complex alpha, Truncation t);
PreparedState make_squeezed_vac(Complex zeta, Truncation t,
                                const ExpmOptions& opt = {});
// Two-mode squeezed vacuum on a fresh two-mode register.
PreparedState make_tmsv(Complex zeta, Truncation t,
                        const ExpmOptions& opt = {});

}  // namespace herald::toolbox
