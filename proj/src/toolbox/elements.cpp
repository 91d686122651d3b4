#include "herald/toolbox/elements.hpp"

#include <algorithm>
#include <stdexcept>

namespace herald::toolbox {

int arity(StateKind k) {
  return k == StateKind::TwoModeSqueezedVac ? 2 : 1;
}

int arity(OpKind k) {
  switch (k) {
    case OpKind::TwoModeSqueeze:
    case OpKind::BeamSplitter:
      return 2;
    default:
      return 1;
  }
}

int real_param_count(StateKind k) {
  switch (k) {
    case StateKind::Fock:
      return 0;
    default:
      return 2;  // magnitude + phase
  }
}

int real_param_count(OpKind k) {
  switch (k) {
    case OpKind::Identity:
      return 0;
    case OpKind::PhaseShift:
    case OpKind::BeamSplitter:
      return 1;
    default:
      return 2;
  }
}

int real_param_count(MeasKind k) {
  return k == MeasKind::Homodyne ? 2 : 0;
}

bool uses_int_param(StateKind k) { return k == StateKind::Fock; }

std::string name(StateKind k) {
  switch (k) {
    case StateKind::Fock: return "fock";
    case StateKind::Coherent: return "coherent";
    case StateKind::SqueezedVac: return "sv";
    case StateKind::TwoModeSqueezedVac: return "tmsv";
  }
  throw std::logic_error("name(StateKind)");
}

std::string name(OpKind k) {
  switch (k) {
    case OpKind::Identity: return "identity";
    case OpKind::Displacement: return "displacement";
    case OpKind::Squeeze: return "squeeze";
    case OpKind::TwoModeSqueeze: return "two_mode_squeeze";
    case OpKind::PhaseShift: return "phase";
    case OpKind::BeamSplitter: return "beamsplitter";
  }
  throw std::logic_error("name(OpKind)");
}

std::string name(MeasKind k) {
  switch (k) {
    case MeasKind::Pnrd: return "pnrd";
    case MeasKind::Bucket: return "bucket";
    case MeasKind::Multiplex: return "multiplex";
    case MeasKind::Homodyne: return "homodyne";
  }
  throw std::logic_error("name(MeasKind)");
}

namespace {

template <typename Kind>
Kind parse_kind(const std::string& s, const std::vector<Kind>& all,
                const char* what) {
  for (Kind k : all)
    if (name(k) == s) return k;
  throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace

StateKind parse_state_kind(const std::string& s) {
  return parse_kind<StateKind>(s,
                               {StateKind::Fock, StateKind::Coherent,
                                StateKind::SqueezedVac,
                                StateKind::TwoModeSqueezedVac},
                               "state kind");
}

OpKind parse_op_kind(const std::string& s) {
  return parse_kind<OpKind>(
      s,
      {OpKind::Identity, OpKind::Displacement, OpKind::Squeeze,
       OpKind::TwoModeSqueeze, OpKind::PhaseShift, OpKind::BeamSplitter},
      "operation kind");
}

MeasKind parse_meas_kind(const std::string& s) {
  return parse_kind<MeasKind>(s,
                              {MeasKind::Pnrd, MeasKind::Bucket,
                               MeasKind::Multiplex, MeasKind::Homodyne},
                              "measurement kind");
}

std::vector<StateKind> ToolboxSpec::single_mode_states() const {
  std::vector<StateKind> out;
  for (StateKind k : states)
    if (arity(k) == 1) out.push_back(k);
  return out;
}

int ToolboxSpec::max_outcome() const {
  int m = 0;
  for (MeasKind k : measurements) {
    switch (k) {
      case MeasKind::Pnrd: m = std::max(m, bounds.pnrd_max); break;
      case MeasKind::Bucket: m = std::max(m, 1); break;
      case MeasKind::Multiplex:
        m = std::max(m, std::min(bounds.multiplex_click_max,
                                 bounds.multiplex_detectors));
        break;
      case MeasKind::Homodyne: break;  // continuous outcome, no integer gene
    }
  }
  return m;
}

ToolboxSpec ToolboxSpec::full() {
  ToolboxSpec s;
  s.states = {StateKind::Fock, StateKind::Coherent, StateKind::SqueezedVac,
              StateKind::TwoModeSqueezedVac};
  s.ops = {OpKind::Identity,       OpKind::Displacement, OpKind::Squeeze,
           OpKind::TwoModeSqueeze, OpKind::PhaseShift,   OpKind::BeamSplitter};
  s.measurements = {MeasKind::Pnrd, MeasKind::Bucket, MeasKind::Multiplex};
  return s;
}

ToolboxSpec ToolboxSpec::tool1() {
  ToolboxSpec s = full();
  std::erase(s.ops, OpKind::Squeeze);
  std::erase(s.ops, OpKind::TwoModeSqueeze);
  s.bounds.pnrd_max = 10;
  return s;
}

ToolboxSpec ToolboxSpec::tool2() {
  ToolboxSpec s = tool1();
  s.bounds.pnrd_max = 6;
  return s;
}

ToolboxSpec ToolboxSpec::no_pnrd() {
  ToolboxSpec s = tool1();
  s.measurements = {MeasKind::Bucket, MeasKind::Multiplex};
  s.bounds.multiplex_detectors = 16;
  s.bounds.multiplex_click_max = 6;
  return s;
}

ToolboxSpec ToolboxSpec::lossy() {
  ToolboxSpec s = tool1();
  s.bounds.fock_max = 4;
  s.bounds.zeta_state_max = 1.0;
  s.bounds.pnrd_max = 6;
  return s;
}

}  // namespace herald::toolbox
