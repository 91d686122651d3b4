#pragma once

#include <Eigen/Dense>
#include <complex>

#include "herald/fock/truncation.hpp"

namespace herald::fock {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Pure state over n_modes truncated oscillators, amplitudes indexed per
// BasisIndexer (mode 0 most significant digit).
struct KetState {
  Vector amplitudes;
  int n_modes = 1;
  Truncation truncation{0};

  BasisIndexer indexer() const { return {n_modes, truncation}; }
  std::int64_t dim() const { return amplitudes.size(); }

  double norm() const { return amplitudes.norm(); }

  // Rescales to unit norm; returns the pre-normalization deficit 1 - |psi|^2
  // (negative when the state over-shot, e.g. a non-unitary construction).
  double normalize();
};

// Density matrix, same basis conventions as KetState.
struct MixedState {
  Matrix rho;
  int n_modes = 1;
  Truncation truncation{0};

  BasisIndexer indexer() const { return {n_modes, truncation}; }
  std::int64_t dim() const { return rho.rows(); }

  double trace_real() const { return rho.trace().real(); }
};

KetState make_vacuum(int n_modes, Truncation t);
MixedState to_mixed(const KetState& psi);

// Tensor product; a's modes become the leading (most significant) digits.
KetState tensor(const KetState& a, const KetState& b);

// Total mean photon number; throws std::invalid_argument when the state is
// not normalized to 1e-6.
double mean_photon_number(const KetState& psi);
double mean_photon_number(const MixedState& rho);

// Single-mode mean.
double mean_photon_number(const KetState& psi, int mode);

// <n^2> over all modes jointly: expectation of (sum_m n_m)^2.
double mean_photon_number_sq(const KetState& psi);
double mean_photon_number_sq(const MixedState& rho);

// Marginal photon-number distribution of one mode (unit sum for a normalized
// state).
RealVector number_distribution(const KetState& psi, int mode);
RealVector number_distribution(const MixedState& rho, int mode);

// Probability mass with any mode occupying one of the top `band` retained
// levels; a truncation-pressure indicator (0 when the cutoff is ample).
double top_band_mass(const KetState& psi, int band = 2);
double top_band_mass(const MixedState& rho, int band = 2);

// Tr rho^2.
double purity(const MixedState& rho);

// Reduce a pure state to the density matrix of `keep_mode`.
MixedState partial_trace_to_mode(const KetState& psi, int keep_mode);

}  // namespace herald::fock
