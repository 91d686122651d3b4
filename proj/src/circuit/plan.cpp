#include "herald/circuit/plan.hpp"

#include <algorithm>
#include <cmath>

#include "herald/errors.hpp"

namespace herald::circuit {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

void check_modes(const std::vector<int>& modes, int n_modes, int want,
                 const std::string& where) {
  if (static_cast<int>(modes.size()) != want)
    bad(where + ": expected " + std::to_string(want) + " mode(s), got " +
        std::to_string(modes.size()));
  for (int m : modes)
    if (m < 0 || m >= n_modes)
      bad(where + ": mode " + std::to_string(m + 1) + " out of range 1.." +
          std::to_string(n_modes));
  if (want == 2 && modes[0] == modes[1])
    bad(where + ": the two modes must be distinct");
}

}  // namespace

int ExperimentPlan::output_mode() const {
  std::vector<bool> measured(n_modes, false);
  for (const Herald& h : heralds)
    if (h.mode >= 0 && h.mode < n_modes) measured[h.mode] = true;
  for (int m = 0; m < n_modes; ++m)
    if (!measured[m]) return m;
  return -1;
}

void ExperimentPlan::validate() const {
  if (n_modes < 1) bad("plan: need at least one mode");

  std::vector<int> covered(n_modes, 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const InputState& in = inputs[i];
    const std::string where = "input " + std::to_string(i + 1);
    check_modes(in.modes, n_modes, toolbox::arity(in.kind), where);
    for (int m : in.modes) covered[m]++;
    if (in.kind == toolbox::StateKind::Fock && in.fock_n < 0)
      bad(where + ": negative photon number");
    if (!std::isfinite(in.amp.real()) || !std::isfinite(in.amp.imag()))
      bad(where + ": non-finite parameter");
    if (in.modes.size() == 2 && in.modes[1] != in.modes[0] + 1)
      bad(where + ": a two-mode input must cover adjacent modes");
  }
  for (int m = 0; m < n_modes; ++m)
    if (covered[m] != 1)
      bad("plan: mode " + std::to_string(m + 1) + " covered " +
          std::to_string(covered[m]) + " times by the input block");

  for (std::size_t i = 0; i < ops.size(); ++i) {
    const PlanOp& op = ops[i];
    const std::string where = "op " + std::to_string(i + 1);
    check_modes(op.modes, n_modes, toolbox::arity(op.kind), where);
    if (!std::isfinite(op.amp.real()) || !std::isfinite(op.amp.imag()) ||
        !std::isfinite(op.value))
      bad(where + ": non-finite parameter");
    if (op.kind == toolbox::OpKind::BeamSplitter &&
        (op.value < 0.0 || op.value > 1.0))
      bad(where + ": beam splitter transmission must lie in [0,1]");
  }

  if (static_cast<int>(heralds.size()) != n_modes - 1)
    bad("plan: " + std::to_string(n_modes) + " modes need " +
        std::to_string(n_modes - 1) + " heralds, got " +
        std::to_string(heralds.size()));
  std::vector<int> seen(n_modes, 0);
  for (std::size_t i = 0; i < heralds.size(); ++i) {
    const Herald& h = heralds[i];
    const std::string where = "herald " + std::to_string(i + 1);
    if (h.mode < 0 || h.mode >= n_modes)
      bad(where + ": mode " + std::to_string(h.mode + 1) + " out of range");
    seen[h.mode]++;
    if (seen[h.mode] > 1)
      bad(where + ": mode " + std::to_string(h.mode + 1) +
          " measured more than once");
    if (!h.trivial && h.kind != toolbox::MeasKind::Homodyne && h.outcome < 0)
      bad(where + ": negative outcome");
    if (h.kind == toolbox::MeasKind::Bucket && h.outcome > 1)
      bad(where + ": bucket outcome must be 0 (no click) or 1 (click)");
    if (!std::isfinite(h.x) || !std::isfinite(h.lambda))
      bad(where + ": non-finite parameter");
  }
  if (multiplex_detectors < 1) bad("plan: multiplex detector count must be >= 1");
  for (const Herald& h : heralds)
    if (!h.trivial && h.kind == toolbox::MeasKind::Multiplex &&
        h.outcome > multiplex_detectors)
      bad("plan: multiplex clicks exceed the detector count");
}

}  // namespace herald::circuit
