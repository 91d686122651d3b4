#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "herald/fock/state.hpp"

namespace herald::fock {

using Sparse = Eigen::SparseMatrix<Complex>;

// Operator over an ordered subset of modes.  `mat` lives in the local space
// indexed by the listed modes (modes[0] most significant), dimension
// levels^modes.size(); embed() lifts it to the full n-mode space.
struct SparseOperator {
  Sparse mat;
  std::vector<int> modes;
  Truncation truncation{0};
};

// ---- Single-mode ladder operators (dimension t.levels()) ----

// a |n> = sqrt(n) |n-1>
Sparse annihilation(Truncation t);
// adag |n> = sqrt(n+1) |n+1>  (top row truncated away)
Sparse creation(Truncation t);
Sparse number_op(Truncation t);
Sparse identity_op(Truncation t);

// ---- Embedding ----

// Lift a local operator to the full space of n_modes; identity on the rest.
// Handles any mode signature, including reversed pairs like (1,0).
Sparse embed(const SparseOperator& op, int n_modes);

// Apply an embedded operator: psi <- embed(op) * psi (materializes the
// embedded operator once).
Vector apply_embedded(const SparseOperator& op, const KetState& psi);

}  // namespace herald::fock
