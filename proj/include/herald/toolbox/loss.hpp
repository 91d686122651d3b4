#pragma once

#include "herald/fock/state.hpp"

namespace herald::toolbox {

using fock::KetState;
using fock::MixedState;
using fock::Truncation;

// Pure-loss channel of strength gamma (fraction of photons lost) on a
// single-mode state, via the Kraus set
//   K_k = sum_n sqrt(C(n,k)) sqrt((1-gamma)^(n-k) gamma^k) |n-k><n|.
// The set is exactly trace preserving on the truncated space.
MixedState apply_loss(const KetState& psi, double gamma);
MixedState apply_loss(const MixedState& rho, double gamma);

}  // namespace herald::toolbox
