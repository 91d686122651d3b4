#pragma once

#include <limits>
#include <optional>
#include <string>

#include "herald/circuit/plan.hpp"
#include "herald/circuit/simulate.hpp"
#include "herald/fitness/bmse.hpp"

namespace herald::fitness {

enum class FitnessKind {
  PureQfiScaled,          // F / nbar of the pure heralded output
  MixedQfiScaled,         // F / nbar of the (possibly lossy) output
  BmseFixedPovm,          // Bayesian MSE of the photon-counting scheme
  BmseSingleShotOptimal,  // Bayesian MSE of the optimal single-shot POVM
};

enum class Sense { Maximize, Minimize };

struct FitnessSpec {
  FitnessKind kind = FitnessKind::PureQfiScaled;
  int mu = 1;                 // scheme repetitions (BMSE kinds)
  PriorSpec prior;            // phase prior (BMSE kinds)
  double nbar_cap = 1.0;      // mean-photon ceiling on the output state
  double nbar_floor = 1e-6;   // below this the scaled QFI is undefined
  BmseOptions bmse;

  Sense sense() const {
    return (kind == FitnessKind::PureQfiScaled ||
            kind == FitnessKind::MixedQfiScaled)
               ? Sense::Maximize
               : Sense::Minimize;
  }
  // Throws std::invalid_argument when width <= 0, mu < 1, or nbar_cap <= 0.
  void validate() const;
};

// Outcome of scoring one simulated circuit.  `fitness` is always on a
// maximized scale (BMSE kinds negate the objective) so selection and elitism
// can compare values uniformly; `objective` keeps the raw figure of merit.
// Failures carry the worst-case sentinel -infinity and a diagnostic note.
struct Evaluation {
  double fitness = -std::numeric_limits<double>::infinity();
  double objective = 0.0;
  bool failed = true;
  std::string note;
  double herald_probability = 0.0;
  double nbar = 0.0;
  int truncation = 0;
  std::optional<BmseResult> bmse;
};

// Applies a FitnessSpec to simulation results.  Simulation errors
// (HeraldImpossible, TruncationInsufficient) and constraint violations
// (nbar above cap or below floor, mixed output where purity is required)
// become failed Evaluations rather than exceptions, so a search over random
// genomes never aborts.
class Evaluator {
 public:
  Evaluator(FitnessSpec spec, circuit::SimOptions sim = {});

  const FitnessSpec& spec() const { return spec_; }

  // Scores an already-simulated result.
  Evaluation score(const circuit::SimulationResult& result) const;

  // Simulates at fixed truncation, then scores.
  Evaluation evaluate(const circuit::ExperimentPlan& plan,
                      fock::Truncation t) const;

  // Simulates with adaptive truncation (the fitness value itself drives the
  // convergence probe for QFI kinds; BMSE kinds converge on the herald
  // probability to keep the probe cheap), then scores.
  Evaluation evaluate_adaptive(const circuit::ExperimentPlan& plan,
                               const circuit::AdaptiveOptions& adaptive = {})
      const;

 private:
  FitnessSpec spec_;
  circuit::SimOptions sim_;
};

}  // namespace herald::fitness
