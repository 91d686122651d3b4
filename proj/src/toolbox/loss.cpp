#include "herald/toolbox/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace herald::toolbox {

using fock::Complex;
using fock::Matrix;
using fock::Vector;

namespace {

void check_gamma(double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("apply_loss: gamma outside [0,1]");
}

// Kraus amplitude <n-k| K_k |n> = sqrt(C(n,k) (1-gamma)^(n-k) gamma^k).
double kraus_amp(int n, int k, double gamma) {
  const double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n - k + 1.0);
  double logp = logc;
  if (n - k > 0) logp += (n - k) * std::log1p(-gamma);
  if (k > 0) logp += k * std::log(gamma);
  return std::exp(0.5 * logp);
}

}  // namespace

MixedState apply_loss(const KetState& psi, double gamma) {
  check_gamma(gamma);
  if (psi.n_modes != 1)
    throw std::invalid_argument("apply_loss: single-mode states only");
  const int d = psi.truncation.levels();
  MixedState out;
  out.n_modes = 1;
  out.truncation = psi.truncation;
  if (gamma == 0.0) {
    out.rho = psi.amplitudes * psi.amplitudes.adjoint();
    return out;
  }
  out.rho = Matrix::Zero(d, d);
  Vector v(d);
  for (int k = 0; k < d; ++k) {
    v.setZero();
    for (int n = k; n < d; ++n)
      v[n - k] = kraus_amp(n, k, gamma) * psi.amplitudes[n];
    if (v.isZero(0.0)) continue;
    out.rho.noalias() += v * v.adjoint();
  }
  return out;
}

MixedState apply_loss(const MixedState& rho, double gamma) {
  check_gamma(gamma);
  if (rho.n_modes != 1)
    throw std::invalid_argument("apply_loss: single-mode states only");
  const int d = rho.truncation.levels();
  MixedState out;
  out.n_modes = 1;
  out.truncation = rho.truncation;
  if (gamma == 0.0) {
    out.rho = rho.rho;
    return out;
  }
  out.rho = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    // K_k rho K_k^dag shifts both indices down by k.
    for (int r = k; r < d; ++r) {
      const double ar = kraus_amp(r, k, gamma);
      for (int c = k; c < d; ++c)
        out.rho(r - k, c - k) += ar * kraus_amp(c, k, gamma) * rho.rho(r, c);
    }
  }
  return out;
}

}  // namespace herald::toolbox
