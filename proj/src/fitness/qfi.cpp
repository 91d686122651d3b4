#include "herald/fitness/qfi.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace herald::fitness {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Diagonal of the total number operator in the packed basis.
fock::RealVector total_number_diag(const fock::BasisIndexer& ix) {
  fock::RealVector n(ix.dim());
  for (std::int64_t i = 0; i < ix.dim(); ++i) {
    int total = 0;
    for (int m = 0; m < ix.n_modes; ++m) total += ix.digit(i, m);
    n[i] = total;
  }
  return n;
}

}  // namespace

double qfi_pure(const fock::KetState& psi) {
  const double nbar = fock::mean_photon_number(psi);  // validates norm
  const double nsq = fock::mean_photon_number_sq(psi);
  return std::max(0.0, 4.0 * (nsq - nbar * nbar));
}

double qfi_mixed(const fock::MixedState& rho, double eig_cutoff) {
  const int dim = static_cast<int>(rho.dim());
  if (dim == 0) throw std::invalid_argument("qfi_mixed: empty state");
  const double scale = std::max(1.0, rho.rho.norm());
  if ((rho.rho - rho.rho.adjoint()).norm() > 1e-8 * scale)
    throw std::invalid_argument("qfi_mixed: state is not Hermitian");
  if (std::abs(rho.trace_real() - 1.0) > 1e-6)
    throw std::invalid_argument("qfi_mixed: state trace is not 1");

  Eigen::SelfAdjointEigenSolver<fock::Matrix> es(
      fock::Matrix(0.5 * (rho.rho + rho.rho.adjoint())));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("qfi_mixed: eigendecomposition failed");
  const fock::RealVector& q = es.eigenvalues();
  if (q.minCoeff() < -1e-8)
    throw std::invalid_argument("qfi_mixed: state is not positive");
  const double qmax = q.maxCoeff();

  const fock::RealVector nvec = total_number_diag(rho.indexer());
  const fock::Matrix m =
      es.eigenvectors().adjoint() * nvec.asDiagonal() * es.eigenvectors();

  std::vector<int> kept;
  for (int i = 0; i < dim; ++i)
    if (q[i] > eig_cutoff * qmax) kept.push_back(i);

  // F = sum_i q_i F_i - sum_{i != j} 8 q_i q_j / (q_i + q_j) |m_ij|^2 with
  // F_i = 4 (<v_i|n^2|v_i> - m_ii^2); the full row of m supplies <n^2>.
  double f = 0.0;
  for (int i : kept) {
    const double nsq_i = m.row(i).squaredNorm();
    const double diag = m(i, i).real();
    f += 4.0 * q[i] * (nsq_i - diag * diag);
  }
  for (int i : kept)
    for (int j : kept) {
      if (i == j) continue;
      const double denom = q[i] + q[j];
      if (denom < eig_cutoff) continue;
      f -= 8.0 * q[i] * q[j] / denom * std::norm(m(i, j));
    }
  return std::max(0.0, f);
}

double qfi_scaled(const fock::KetState& psi, double nbar_floor) {
  const double nbar = fock::mean_photon_number(psi);
  if (nbar < nbar_floor) return kNegInf;
  return qfi_pure(psi) / nbar;
}

double qfi_scaled(const fock::MixedState& rho, double nbar_floor) {
  const double nbar = fock::mean_photon_number(rho);
  if (nbar < nbar_floor) return kNegInf;
  return qfi_mixed(rho) / nbar;
}

}  // namespace herald::fitness
