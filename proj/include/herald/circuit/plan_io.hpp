#pragma once

#include <string>

#include "herald/circuit/plan.hpp"

namespace herald::circuit {

// Text form of a plan, e.g.
//
//   # two-mode squeezed-vacuum circuit
//   psi_in: zeta_1 = 1.39 e^{i2.50}, zeta_2 = 0.34 e^{i5.64}
//   O_1: D_2(alpha = 2.49 e^{i5.92})
//   O_2: D_1(alpha = 1.66 e^{i6.11})
//   O_3: U_12(T = 0.30)
//   POVM_1: |n = 10><n = 10|
//
// Input entries cover modes left to right (`0` is vacuum, `n = 5` a Fock
// state, `alpha = ...` coherent, `zeta = ...` squeezed vacuum, a two-digit
// subscript like `zeta_12 = ...` its two-mode variant).  Operator subscripts
// are 1-based wiring; `I` is the identity and `---` an empty slot.  POVM
// lines carry the measured mode as a subscript (without it, modes 1, 2, ...
// are assigned in order, leaving the last mode as the output): photon
// counting `|n = K><n = K|`,
// `bucket(no_click | click)`, `multiplex(c = C, d = D)`,
// `homodyne(x = X, lambda = L)`, or `I` to trace the mode out.
ExperimentPlan parse_plan(const std::string& text);

ExperimentPlan load_plan(const std::string& path);

std::string plan_to_text(const ExperimentPlan& plan);

}  // namespace herald::circuit
