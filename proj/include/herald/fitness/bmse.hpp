#pragma once

#include <cstdint>
#include <optional>

#include "herald/fitness/quadrature.hpp"
#include "herald/fock/state.hpp"

namespace herald::fitness {

// Uniform prior p(theta) = 1/width on [center - width/2, center + width/2].
struct PriorSpec {
  static constexpr double kPi = 3.14159265358979323846;

  double center = 0.0;
  double width = kPi / 12.0;

  double variance() const { return width * width / 12.0; }
  double lo() const { return center - 0.5 * width; }
  double hi() const { return center + 0.5 * width; }
};

struct BmseOptions {
  int grid_nodes = 61;        // initial Gauss-Legendre panel for the prior
  double grid_tol = 1e-6;     // doubling stops when the BMSE moves less
  double outcome_tail = 1e-8; // per-shot outcomes kept until 1 - this remains
  double enum_cap = 1e7;      // exact mode only if (#outcomes)^mu fits below
  std::int64_t mc_sequences = 100000;  // Monte Carlo sample count
  std::uint64_t mc_seed = 0x9e3779b97f4a7c15ull;
  bool optimize_phase = true;  // tune the inter-arm phase correction
  double fixed_phase = 0.0;    // correction used when optimize_phase is off
  double eig_cutoff = 1e-12;   // spectral floor for the single-shot bound
  bool keep_grid = false;     // attach the posterior grid to the result
};

// Posterior table over the prior support: row m of `posteriors` holds
// p(theta_k | M_m) at the theta nodes; each row integrates to 1 under the
// quadrature weights, which themselves sum to the prior width.
struct PosteriorGrid {
  fock::RealVector nodes;
  fock::RealVector weights;
  fock::RealVector outcome_probabilities;  // p(M_m), summing to 1
  Eigen::MatrixXd posteriors;
};

struct BmseResult {
  double bmse = 0.0;            // expected posterior variance E_M Var(theta|M)
  double prior_variance = 0.0;  // width^2 / 12, the no-measurement baseline
  int grid_nodes = 0;           // prior grid size actually used
  bool monte_carlo = false;     // true when outcome sequences were sampled
  double mc_stderr = 0.0;       // standard error of the MC estimate (else 0)
  std::int64_t outcomes_kept = 0;  // outcome tuples (exact) or samples (MC)
  double phase_correction = 0.0;   // optimized inter-arm phase, radians
  double saturation_defect = 0.0;  // single-shot only: gap of the optimal POVM
  std::optional<PosteriorGrid> grid;  // present when options.keep_grid
};

// Bayesian mean-square error of the interferometric estimation scheme:
// two copies of |psi> enter a differential phase encoding
// exp(-i (n_1 - n_2) theta / 2), a fixed phase correction on the second arm,
// and a balanced beam splitter; both arms are photon-counted and the
// experiment repeats mu times.  BMSE = sum_M p(M) Var(theta | M) under the
// uniform prior.  The probe must be a normalized single-mode ket.
BmseResult bmse_fixed_povm(const fock::KetState& probe, int mu,
                           const PriorSpec& prior = {},
                           const BmseOptions& options = {});

// Single-shot minimum BMSE over ALL quantum measurements on one copy of the
// encoded probe: bound = E[theta^2] - Tr(rho_bar S) with rho, rho_bar the
// prior-averaged moments and S the optimal Hermitian estimator solving
// S rho + rho S = 2 rho_bar.  The result's saturation_defect reports how far
// the projective measurement onto S's eigenbasis sits above the bound.
BmseResult bmse_single_shot_optimal(const fock::KetState& probe,
                                    const PriorSpec& prior = {},
                                    const BmseOptions& options = {});

// Relative improvement (eps_ref - eps) / eps_ref of a candidate error eps
// over a reference error eps_ref.  Throws std::invalid_argument when
// eps_ref <= 0.
double improvement_factor(double eps_ref, double eps);

// Test hook: balanced (50:50) beam splitter on modes (i, j) of |psi|,
// implemented per total-photon sector; must agree with the generic
// toolbox beam-splitter route.
fock::KetState apply_balanced_splitter(const fock::KetState& psi, int mode_i,
                                       int mode_j);

}  // namespace herald::fitness
