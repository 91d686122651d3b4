#pragma once

#include <optional>
#include <string>
#include <vector>

#include "herald/fock/ops.hpp"

namespace herald::fock {

// One POVM element on a single measured mode.  Every element is either
// diagonal in the Fock basis (weights per level, all in [0,1]) or rank one
// (E = |v><v|, v not necessarily normalized); these two shapes cover photon
// counting, bucket, multiplexed and homodyne detection exactly, and any
// Hermitian element can be split into rank-one parts by the caller.
struct PovmElement {
  std::string label;
  RealVector diag;  // size levels() when diagonal, else 0
  Vector rank1;     // size levels() when rank one, else 0

  bool is_diagonal() const { return diag.size() > 0; }
  bool is_rank1() const { return rank1.size() > 0; }

  // True for |n><n| style elements: a single unit weight.
  bool is_fock_projector() const;
  int fock_level() const;  // valid when is_fock_projector()

  Sparse matrix() const;  // materialization, for completeness checks
};

struct HeraldOutcome {
  bool is_pure = true;
  KetState ket;     // valid when is_pure
  MixedState rho;   // valid when !is_pure
  double probability = 0.0;
};

// Condition a pure state on one POVM outcome on `measured_mode` and drop that
// mode.  probability = <psi| E (x) I |psi>; throws HeraldImpossible below
// `probability_floor`.  Output is pure for rank-one and Fock-projector
// elements, mixed otherwise.
HeraldOutcome herald_project(const KetState& psi, const PovmElement& elem,
                             int measured_mode, double probability_floor);

// Condition on several diagonal elements at once (distinct measured modes,
// everything else as above).  Exactly one mode must remain unmeasured; the
// result lives on that mode.  Equals sequential conditioning since diagonal
// elements on distinct modes commute.
HeraldOutcome herald_project_diag_joint(
    const KetState& psi,
    const std::vector<std::pair<int, const PovmElement*>>& elems,
    double probability_floor);

}  // namespace herald::fock
