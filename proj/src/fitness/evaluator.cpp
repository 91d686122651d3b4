#include "herald/fitness/evaluator.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "herald/fitness/qfi.hpp"

namespace herald::fitness {

void FitnessSpec::validate() const {
  if (!(prior.width > 0.0))
    throw std::invalid_argument("fitness: prior width must be positive");
  if (mu < 1) throw std::invalid_argument("fitness: mu must be >= 1");
  if (!(nbar_cap > 0.0))
    throw std::invalid_argument("fitness: nbar_cap must be positive");
}

Evaluator::Evaluator(FitnessSpec spec, circuit::SimOptions sim)
    : spec_(std::move(spec)), sim_(sim) {
  spec_.validate();
}

Evaluation Evaluator::score(const circuit::SimulationResult& result) const {
  Evaluation ev;
  ev.herald_probability = result.herald_probability;
  ev.nbar = result.mean_photons;
  ev.truncation = result.truncation_used;

  if (!result.converged) {
    ev.note = "truncation did not converge";
    return ev;
  }
  if (result.mean_photons > spec_.nbar_cap) {
    ev.note = "mean photon number above cap";
    return ev;
  }

  try {
    double objective = 0.0;
    switch (spec_.kind) {
      case FitnessKind::PureQfiScaled: {
        if (!result.pure) {
          ev.note = "pure-state fitness requested on a mixed output";
          return ev;
        }
        objective = qfi_scaled(result.output_ket, spec_.nbar_floor);
        break;
      }
      case FitnessKind::MixedQfiScaled: {
        objective = qfi_scaled(result.as_mixed(), spec_.nbar_floor);
        break;
      }
      case FitnessKind::BmseFixedPovm:
      case FitnessKind::BmseSingleShotOptimal: {
        if (!result.pure) {
          ev.note = "Bayesian fitness needs a pure output state";
          return ev;
        }
        const BmseResult r =
            spec_.kind == FitnessKind::BmseFixedPovm
                ? bmse_fixed_povm(result.output_ket, spec_.mu, spec_.prior,
                                  spec_.bmse)
                : bmse_single_shot_optimal(result.output_ket, spec_.prior,
                                           spec_.bmse);
        ev.bmse = r;
        objective = r.bmse;
        break;
      }
    }
    if (std::isnan(objective)) {
      ev.note = "fitness evaluated to NaN";
      return ev;
    }
    if (std::isinf(objective)) {
      ev.note = "mean photon number below floor";
      return ev;
    }
    ev.objective = objective;
    ev.fitness = spec_.sense() == Sense::Maximize ? objective : -objective;
    ev.failed = false;
  } catch (const std::exception& err) {
    ev.note = err.what();
  }
  return ev;
}

Evaluation Evaluator::evaluate(const circuit::ExperimentPlan& plan,
                               fock::Truncation t) const {
  try {
    return score(circuit::simulate(plan, t, sim_));
  } catch (const std::exception& err) {
    Evaluation ev;
    ev.note = err.what();
    ev.truncation = t.cutoff;
    return ev;
  }
}

Evaluation Evaluator::evaluate_adaptive(
    const circuit::ExperimentPlan& plan,
    const circuit::AdaptiveOptions& adaptive) const {
  circuit::FitnessProbe probe;
  if (spec_.kind == FitnessKind::PureQfiScaled ||
      spec_.kind == FitnessKind::MixedQfiScaled) {
    probe = [this](const circuit::SimulationResult& r) {
      const Evaluation e = score(r);
      // NaN never satisfies the relative-change test, so failed probes keep
      // the truncation climbing until t_max.
      return e.failed ? std::numeric_limits<double>::quiet_NaN()
                      : e.objective;
    };
  }
  try {
    return score(circuit::simulate_adaptive(plan, adaptive, sim_, probe));
  } catch (const std::exception& err) {
    Evaluation ev;
    ev.note = err.what();
    return ev;
  }
}

}  // namespace herald::fitness
