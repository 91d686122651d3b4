#include "herald/circuit/simulate.hpp"

#include <algorithm>
#include <optional>

#include "herald/errors.hpp"
#include "herald/fock/project.hpp"
#include "herald/toolbox/loss.hpp"
#include "herald/toolbox/povm.hpp"
#include "herald/toolbox/states.hpp"
#include "herald/toolbox/unitaries.hpp"

namespace herald::circuit {

using fock::KetState;
using fock::MixedState;
using fock::PovmElement;
using fock::Truncation;

namespace {

// Detector loss applies to the click detectors; homodyne heralds stay ideal
// (inefficiency there is not part of the loss model).
PovmElement build_element(const Herald& h, int detectors, Truncation t,
                          const SimOptions& opt) {
  if (h.trivial) {
    PovmElement e;
    e.label = "I";
    e.diag = fock::RealVector::Ones(t.levels());
    return e;
  }
  switch (h.kind) {
    case toolbox::MeasKind::Pnrd:
      return toolbox::pnrd_element(h.outcome, opt.loss.gamma_det, t);
    case toolbox::MeasKind::Bucket:
      return toolbox::bucket_element(h.outcome, opt.loss.gamma_det, t);
    case toolbox::MeasKind::Multiplex:
      return toolbox::multiplex_element(h.outcome, detectors,
                                        opt.loss.gamma_det, t);
    case toolbox::MeasKind::Homodyne:
      return toolbox::homodyne_element(h.x, h.lambda, opt.homodyne_bin, t);
  }
  throw ConfigError("unreachable measurement kind");
}

}  // namespace

MixedState SimulationResult::as_mixed() const {
  return pure ? fock::to_mixed(output_ket) : output_rho;
}

fock::RealVector SimulationResult::distribution() const {
  return pure ? fock::number_distribution(output_ket, 0)
              : fock::number_distribution(output_rho, 0);
}

double SimulationResult::purity() const {
  return pure ? 1.0 : fock::purity(output_rho);
}

SimulationResult simulate(const ExperimentPlan& plan, Truncation t,
                          const SimOptions& opt) {
  plan.validate();

  // Representability: outcomes and Fock inputs beyond the cutoff cannot be
  // expressed at this truncation (they can at a larger one).
  for (const InputState& in : plan.inputs)
    if (in.kind == toolbox::StateKind::Fock && in.fock_n > t.cutoff)
      throw TruncationInsufficient(
          "Fock input n=" + std::to_string(in.fock_n) +
              " not representable at cutoff " + std::to_string(t.cutoff),
          0.0, t.cutoff);
  for (const Herald& h : plan.heralds) {
    if (h.trivial) continue;
    const bool counts_photons = h.kind == toolbox::MeasKind::Pnrd ||
                                h.kind == toolbox::MeasKind::Multiplex;
    if (counts_photons && h.outcome > t.cutoff)
      throw TruncationInsufficient(
          "herald outcome " + std::to_string(h.outcome) +
              " not representable at cutoff " + std::to_string(t.cutoff),
          0.0, t.cutoff);
  }

  // Input block, in mode order (earlier modes are more significant digits).
  double input_leak = 0.0;
  std::optional<KetState> psi;
  for (const InputState& in : plan.inputs) {
    toolbox::PreparedState ps;
    switch (in.kind) {
      case toolbox::StateKind::Fock:
        ps = toolbox::make_fock(in.fock_n, t);
        break;
      case toolbox::StateKind::Coherent:
        ps = toolbox::make_coherent(in.amp, t);
        break;
      case toolbox::StateKind::SqueezedVac:
        ps = toolbox::make_squeezed_vac(in.amp, t);
        break;
      case toolbox::StateKind::TwoModeSqueezedVac:
        ps = toolbox::make_tmsv(in.amp, t);
        break;
    }
    input_leak += ps.leakage;
    psi = psi ? fock::tensor(*psi, ps.state) : std::move(ps.state);
  }

  for (const PlanOp& op : plan.ops) {
    switch (op.kind) {
      case toolbox::OpKind::Identity:
        break;
      case toolbox::OpKind::Displacement:
        toolbox::apply_displacement(*psi, op.modes[0], op.amp);
        break;
      case toolbox::OpKind::Squeeze:
        toolbox::apply_squeeze(*psi, op.modes[0], op.amp);
        break;
      case toolbox::OpKind::TwoModeSqueeze:
        toolbox::apply_two_mode_squeeze(*psi, op.modes[0], op.modes[1],
                                        op.amp);
        break;
      case toolbox::OpKind::PhaseShift:
        toolbox::apply_phase(*psi, op.modes[0], op.value);
        break;
      case toolbox::OpKind::BeamSplitter:
        toolbox::apply_beamsplitter(*psi, op.modes[0], op.modes[1], op.value);
        break;
    }
  }

  SimulationResult res;
  res.truncation_used = t.cutoff;
  res.leakage = input_leak + fock::top_band_mass(*psi);

  // Heralds.  Projector and rank-one outcomes keep the state pure and are
  // applied one mode at a time; everything else is diagonal and is reduced
  // jointly.  All elements commute (distinct modes), so order is free.
  struct Pending {
    int orig_mode;
    PovmElement elem;
  };
  std::vector<Pending> pure_path, diag_path;
  for (const Herald& h : plan.heralds) {
    Pending p{h.mode, build_element(h, plan.multiplex_detectors, t, opt)};
    if (h.kind == toolbox::MeasKind::Homodyne) res.density_scaled = true;
    if (p.elem.is_rank1() || p.elem.is_fock_projector())
      pure_path.push_back(std::move(p));
    else
      diag_path.push_back(std::move(p));
  }
  std::sort(pure_path.begin(), pure_path.end(),
            [](const Pending& a, const Pending& b) {
              return a.orig_mode > b.orig_mode;
            });

  std::vector<int> live(plan.n_modes);
  for (int m = 0; m < plan.n_modes; ++m) live[m] = m;

  double prob = 1.0;
  for (const Pending& p : pure_path) {
    const auto it = std::find(live.begin(), live.end(), p.orig_mode);
    const int local = static_cast<int>(it - live.begin());
    fock::HeraldOutcome out =
        fock::herald_project(*psi, p.elem, local, opt.probability_floor);
    prob *= out.probability;
    psi = std::move(out.ket);
    live.erase(it);
  }

  if (diag_path.empty()) {
    res.pure = true;
    res.output_ket = std::move(*psi);
  } else {
    std::vector<std::pair<int, const PovmElement*>> pairs;
    for (const Pending& p : diag_path) {
      const auto it = std::find(live.begin(), live.end(), p.orig_mode);
      pairs.emplace_back(static_cast<int>(it - live.begin()), &p.elem);
    }
    fock::HeraldOutcome out =
        fock::herald_project_diag_joint(*psi, pairs, opt.probability_floor);
    prob *= out.probability;
    if (out.is_pure) {
      res.pure = true;
      res.output_ket = std::move(out.ket);
    } else {
      res.pure = false;
      res.output_rho = std::move(out.rho);
    }
  }
  if (prob < opt.probability_floor)
    throw HeraldImpossible("joint herald probability " + std::to_string(prob) +
                               " below the floor",
                           prob);
  res.herald_probability = prob;

  if (opt.loss.gamma_out > 0.0) {
    res.output_rho = res.pure
                         ? toolbox::apply_loss(res.output_ket, opt.loss.gamma_out)
                         : toolbox::apply_loss(res.output_rho, opt.loss.gamma_out);
    res.pure = false;
  }

  res.mean_photons = res.pure ? fock::mean_photon_number(res.output_ket)
                              : fock::mean_photon_number(res.output_rho);
  return res;
}

SimulationResult simulate_adaptive(const ExperimentPlan& plan,
                                   const AdaptiveOptions& adapt,
                                   const SimOptions& opt,
                                   const FitnessProbe& probe) {
  if (adapt.t_start > adapt.t_max || adapt.t_step < 1)
    throw ConfigError("adaptive truncation schedule is empty");

  std::optional<SimulationResult> prev;
  double prev_probe = 0.0;
  std::exception_ptr last_error;

  for (int cut = adapt.t_start; cut <= adapt.t_max; cut += adapt.t_step) {
    SimulationResult r;
    try {
      r = simulate(plan, Truncation{cut}, opt);
    } catch (const TruncationInsufficient&) {
      last_error = std::current_exception();
      prev.reset();
      continue;
    } catch (const HeraldImpossible&) {
      last_error = std::current_exception();
      prev.reset();
      continue;
    }
    const double pv = probe ? probe(r) : r.herald_probability;
    if (prev) {
      const double dn = std::abs(r.mean_photons - prev->mean_photons) /
                        std::max(r.mean_photons, 1.0);
      const double df =
          std::abs(pv - prev_probe) / std::max(std::abs(pv), 1.0);
      if (dn <= adapt.rel_tol && df <= adapt.rel_tol &&
          r.leakage <= opt.leak_threshold) {
        r.converged = true;
        return r;
      }
    }
    prev = std::move(r);
    prev_probe = pv;
  }
  if (!prev) {
    if (last_error) std::rethrow_exception(last_error);
    throw ConfigError("adaptive truncation schedule is empty");
  }
  prev->converged = false;
  return *prev;
}

}  // namespace herald::circuit
