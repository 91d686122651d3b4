#pragma once

#include "herald/fock/ops.hpp"

namespace herald::fock {

struct ExpmOptions {
  double tol = 1e-13;     // per-step relative increment target
  double theta = 2.0;     // max ||h A||_1 per scaling step
  int max_terms = 60;     // Taylor budget per step
  int dense_cutoff = 64;  // below this dimension use a dense copy of A
};

// y = exp(scale * A) b without forming exp(A).  Scaling + truncated Taylor:
// the step count keeps ||h A||_1 <= theta, each step sums terms until two
// consecutive increments fall below tol * ||y||.  Throws ExpmNonConvergence
// when the term budget is exhausted.  Works for any generator (no normality
// assumed); unitarity is not enforced here.
Vector expm_action(const Sparse& a, Complex scale, const Vector& b,
                   const ExpmOptions& opt = {});

}  // namespace herald::fock
