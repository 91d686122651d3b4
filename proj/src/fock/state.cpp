#include "herald/fock/state.hpp"

#include <cmath>
#include <stdexcept>

namespace herald::fock {

double KetState::normalize() {
  const double n2 = amplitudes.squaredNorm();
  if (n2 <= 0.0)
    throw std::invalid_argument("KetState::normalize: zero state");
  amplitudes /= std::sqrt(n2);
  return 1.0 - n2;
}

KetState make_vacuum(int n_modes, Truncation t) {
  KetState psi;
  psi.n_modes = n_modes;
  psi.truncation = t;
  psi.amplitudes = Vector::Zero(BasisIndexer(n_modes, t).dim());
  psi.amplitudes[0] = 1.0;
  return psi;
}

MixedState to_mixed(const KetState& psi) {
  MixedState rho;
  rho.n_modes = psi.n_modes;
  rho.truncation = psi.truncation;
  rho.rho = psi.amplitudes * psi.amplitudes.adjoint();
  return rho;
}

KetState tensor(const KetState& a, const KetState& b) {
  if (a.truncation != b.truncation)
    throw std::invalid_argument("tensor: mismatched truncations");
  KetState out;
  out.n_modes = a.n_modes + b.n_modes;
  out.truncation = a.truncation;
  out.amplitudes = Vector::Zero(a.dim() * b.dim());
  for (std::int64_t i = 0; i < a.dim(); ++i) {
    if (a.amplitudes[i] == Complex(0)) continue;
    out.amplitudes.segment(i * b.dim(), b.dim()) =
        a.amplitudes[i] * b.amplitudes;
  }
  return out;
}

namespace {

void check_normalized(double norm, const char* who) {
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(who) +
                                ": state not normalized");
}

}  // namespace

double mean_photon_number(const KetState& psi) {
  check_normalized(psi.norm(), "mean_photon_number");
  const BasisIndexer ix = psi.indexer();
  std::vector<int> digits(psi.n_modes);
  double acc = 0.0;
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    const double p = std::norm(psi.amplitudes[i]);
    if (p == 0.0) continue;
    ix.unpack(i, digits);
    int n = 0;
    for (int d : digits) n += d;
    acc += p * n;
  }
  return acc;
}

double mean_photon_number(const MixedState& rho) {
  check_normalized(std::sqrt(std::abs(rho.trace_real())),
                   "mean_photon_number");
  const BasisIndexer ix = rho.indexer();
  std::vector<int> digits(rho.n_modes);
  double acc = 0.0;
  for (std::int64_t i = 0; i < rho.dim(); ++i) {
    ix.unpack(i, digits);
    int n = 0;
    for (int d : digits) n += d;
    acc += rho.rho(i, i).real() * n;
  }
  return acc;
}

double mean_photon_number(const KetState& psi, int mode) {
  check_normalized(psi.norm(), "mean_photon_number");
  const BasisIndexer ix = psi.indexer();
  double acc = 0.0;
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    const double p = std::norm(psi.amplitudes[i]);
    if (p == 0.0) continue;
    acc += p * ix.digit(i, mode);
  }
  return acc;
}

double mean_photon_number_sq(const KetState& psi) {
  check_normalized(psi.norm(), "mean_photon_number_sq");
  const BasisIndexer ix = psi.indexer();
  std::vector<int> digits(psi.n_modes);
  double acc = 0.0;
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    const double p = std::norm(psi.amplitudes[i]);
    if (p == 0.0) continue;
    ix.unpack(i, digits);
    double n = 0;
    for (int d : digits) n += d;
    acc += p * n * n;
  }
  return acc;
}

double mean_photon_number_sq(const MixedState& rho) {
  check_normalized(std::sqrt(std::abs(rho.trace_real())),
                   "mean_photon_number_sq");
  const BasisIndexer ix = rho.indexer();
  std::vector<int> digits(rho.n_modes);
  double acc = 0.0;
  for (std::int64_t i = 0; i < rho.dim(); ++i) {
    ix.unpack(i, digits);
    double n = 0;
    for (int d : digits) n += d;
    acc += rho.rho(i, i).real() * n * n;
  }
  return acc;
}

RealVector number_distribution(const KetState& psi, int mode) {
  const BasisIndexer ix = psi.indexer();
  RealVector pmf = RealVector::Zero(ix.levels);
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    const double p = std::norm(psi.amplitudes[i]);
    if (p == 0.0) continue;
    pmf[ix.digit(i, mode)] += p;
  }
  return pmf;
}

RealVector number_distribution(const MixedState& rho, int mode) {
  const BasisIndexer ix = rho.indexer();
  RealVector pmf = RealVector::Zero(ix.levels);
  for (std::int64_t i = 0; i < rho.dim(); ++i)
    pmf[ix.digit(i, mode)] += rho.rho(i, i).real();
  return pmf;
}

namespace {

template <typename DiagFn>
double top_band_mass_impl(int n_modes, const BasisIndexer& ix,
                          std::int64_t dim, int band, DiagFn p_of) {
  const int lo = std::max(0, ix.levels - band);
  double acc = 0.0;
  for (std::int64_t i = 0; i < dim; ++i) {
    const double p = p_of(i);
    if (p == 0.0) continue;
    for (int m = 0; m < n_modes; ++m) {
      if (ix.digit(i, m) >= lo) {
        acc += p;
        break;
      }
    }
  }
  return acc;
}

}  // namespace

double top_band_mass(const KetState& psi, int band) {
  return top_band_mass_impl(
      psi.n_modes, psi.indexer(), psi.dim(), band,
      [&](std::int64_t i) { return std::norm(psi.amplitudes[i]); });
}

double top_band_mass(const MixedState& rho, int band) {
  return top_band_mass_impl(
      rho.n_modes, rho.indexer(), rho.dim(), band,
      [&](std::int64_t i) { return std::abs(rho.rho(i, i).real()); });
}

double purity(const MixedState& rho) {
  return (rho.rho * rho.rho).trace().real();
}

MixedState partial_trace_to_mode(const KetState& psi, int keep_mode) {
  const BasisIndexer ix = psi.indexer();
  const int d = ix.levels;
  if (keep_mode < 0 || keep_mode >= psi.n_modes)
    throw std::out_of_range("partial_trace_to_mode: bad mode");

  MixedState out;
  out.n_modes = 1;
  out.truncation = psi.truncation;
  out.rho = Matrix::Zero(d, d);

  // Group basis states by the digits of all other modes; each group
  // contributes an outer product of its kept-mode slice.
  const std::int64_t stride = pow_i64(d, psi.n_modes - 1 - keep_mode);
  const std::int64_t rest = psi.dim() / d;
  Vector slice(d);
  for (std::int64_t g = 0; g < rest; ++g) {
    // Rebuild the full index with kept digit k inserted at keep_mode.
    const std::int64_t high = g / stride;
    const std::int64_t low = g % stride;
    for (int k = 0; k < d; ++k)
      slice[k] = psi.amplitudes[(high * d + k) * stride + low];
    out.rho.noalias() += slice * slice.adjoint();
  }
  return out;
}

}  // namespace herald::fock
