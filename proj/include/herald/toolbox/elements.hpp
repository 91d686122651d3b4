#pragma once

#include <string>
#include <vector>

namespace herald::toolbox {

enum class StateKind { Fock, Coherent, SqueezedVac, TwoModeSqueezedVac };
enum class OpKind {
  Identity,
  Displacement,
  Squeeze,
  TwoModeSqueeze,
  PhaseShift,
  BeamSplitter
};
enum class MeasKind { Pnrd, Bucket, Multiplex, Homodyne };

// Modes touched.
int arity(StateKind k);
int arity(OpKind k);

// Continuous parameters consumed from a genome slot.
int real_param_count(StateKind k);
int real_param_count(OpKind k);
int real_param_count(MeasKind k);

// Fock input size is the only integer element parameter.
bool uses_int_param(StateKind k);

std::string name(StateKind k);
std::string name(OpKind k);
std::string name(MeasKind k);

StateKind parse_state_kind(const std::string& s);
OpKind parse_op_kind(const std::string& s);
MeasKind parse_meas_kind(const std::string& s);

// Search-space parameter limits (builders themselves accept any finite
// parameters; these only box the genome).
struct ToolboxBounds {
  double alpha_max = 5.0;       // coherent inputs and displacement operators
  double zeta_state_max = 1.4;  // squeezed-vacuum inputs (single & two mode)
  double zeta_op_max = 1.4;     // squeezing operators
  int fock_max = 5;
  int pnrd_max = 10;            // largest resolvable heralded photon number
  int multiplex_detectors = 16;
  int multiplex_click_max = 6;
  double homodyne_x_max = 2.0;
  double homodyne_bin = 0.1;    // quadrature bin width of one outcome
};

struct ToolboxSpec {
  std::vector<StateKind> states;
  std::vector<OpKind> ops;
  std::vector<MeasKind> measurements;
  ToolboxBounds bounds;

  // Kinds valid for a slot that must cover exactly one remaining mode.
  std::vector<StateKind> single_mode_states() const;

  // Largest herald outcome value across enabled measurement kinds.
  int max_outcome() const;

  // Presets mirroring the shipped benchmark configurations.  All include the
  // identity; homodyne heralding stays opt-in (enable it by listing it).
  static ToolboxSpec full();      // everything, PNRD up to n=10
  static ToolboxSpec tool1();     // full minus squeezing operators, PNRD 10
  static ToolboxSpec tool2();     // full minus squeezing operators, PNRD 6
  static ToolboxSpec no_pnrd();   // bucket + multiplex(16) up to 6 clicks
  static ToolboxSpec lossy();     // no squeezing ops, tighter parameter caps
};

}  // namespace herald::toolbox
