#pragma once

#include <functional>

#include "herald/circuit/plan.hpp"
#include "herald/fock/state.hpp"

namespace herald::circuit {

// Detector inefficiency folds into the heralding POVMs; output loss acts on
// the surviving mode after heralding.
struct LossModel {
  double gamma_det = 0.0;
  double gamma_out = 0.0;
};

struct SimOptions {
  LossModel loss;
  double homodyne_bin = 0.1;        // quadrature width of one homodyne outcome
  double probability_floor = 1e-12; // below this, heralding throws
  double leak_threshold = 1e-6;     // adaptive loop demands leakage below this
};

struct SimulationResult {
  bool pure = true;
  fock::KetState output_ket;    // single mode, valid when pure
  fock::MixedState output_rho;  // valid when !pure
  double herald_probability = 1.0;
  bool density_scaled = false;  // true when homodyne bins enter the probability
  double mean_photons = 0.0;
  int truncation_used = 0;
  double leakage = 0.0;
  bool converged = true;

  fock::MixedState as_mixed() const;
  fock::RealVector distribution() const;  // photon-number probabilities
  double purity() const;
};

// Runs the full pipeline at a fixed truncation: build inputs, apply the
// operator list, condition on every herald (lossy POVMs when gamma_det > 0),
// then apply output loss.  Deterministic.  Throws HeraldImpossible when the
// joint herald probability falls below the floor and TruncationInsufficient
// when a herald outcome or Fock input cannot be represented at this cutoff.
SimulationResult simulate(const ExperimentPlan& plan, fock::Truncation t,
                          const SimOptions& opt = {});

// Probe evaluated on each candidate result to drive convergence (a fitness
// function, typically); when empty, the herald probability is used.
using FitnessProbe = std::function<double(const SimulationResult&)>;

struct AdaptiveOptions {
  int t_start = 20;
  int t_step = 10;
  int t_max = 170;
  double rel_tol = 1e-3;  // on mean photons and on the probe value
};

// Re-simulates at growing cutoffs until mean photon number and probe value
// both settle within rel_tol and leakage drops below the threshold; returns
// the first converged result (converged = true) or the t_max result with
// converged = false.
SimulationResult simulate_adaptive(const ExperimentPlan& plan,
                                   const AdaptiveOptions& adapt,
                                   const SimOptions& opt = {},
                                   const FitnessProbe& probe = {});

}  // namespace herald::circuit
