#pragma once

#include <complex>
#include <string>
#include <vector>

#include "herald/toolbox/elements.hpp"

namespace herald::circuit {

using Complex = std::complex<double>;

// One input state covering one mode (or two adjacent modes for the
// two-mode squeezed vacuum).
struct InputState {
  toolbox::StateKind kind = toolbox::StateKind::Fock;
  std::vector<int> modes;  // ascending, size = arity(kind)
  int fock_n = 0;          // Fock only
  Complex amp = 0.0;       // alpha (coherent) or zeta (squeezed kinds)
};

// One operator application.
struct PlanOp {
  toolbox::OpKind kind = toolbox::OpKind::Identity;
  std::vector<int> modes;  // size = arity(kind); order matters
  Complex amp = 0.0;       // alpha (displacement) or zeta (squeeze kinds)
  double value = 0.0;      // phi (phase shift) or T (beam splitter)
};

// One heralding measurement outcome on one mode.
struct Herald {
  toolbox::MeasKind kind = toolbox::MeasKind::Pnrd;
  int mode = 0;
  int outcome = 0;     // photons (pnrd), click flag (bucket), clicks (multiplex)
  double x = 0.0;      // homodyne quadrature value
  double lambda = 0.0; // homodyne phase
  bool trivial = false;  // E = I: trace the mode out unconditionally
};

struct ExperimentPlan {
  int n_modes = 2;
  std::vector<InputState> inputs;
  std::vector<PlanOp> ops;
  std::vector<Herald> heralds;
  int multiplex_detectors = 16;  // d for multiplex heralds

  // The single unmeasured mode.
  int output_mode() const;

  // Throws ConfigError naming the offending element when the plan is not
  // well formed (mode coverage, wiring ranges, duplicate heralds, ...).
  void validate() const;
};

}  // namespace herald::circuit
