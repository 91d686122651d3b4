#include "herald/toolbox/states.hpp"

#include <cmath>
#include <stdexcept>

#include "herald/toolbox/unitaries.hpp"

namespace herald::toolbox {

PreparedState make_fock(int n, Truncation t) {
  if (n < 0 || n > t.cutoff)
    throw std::invalid_argument("make_fock: level outside truncation");
  PreparedState out;
  out.state = fock::make_vacuum(1, t);
  out.state.amplitudes[0] = 0.0;
  out.state.amplitudes[n] = 1.0;
  out.leakage = 0.0;
  return out;
}

PreparedState make_coherent(Complex alpha, Truncation t) {
  // c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by the stable recurrence
  // c_n = c_{n-1} alpha / sqrt(n).
  PreparedState out;
  out.state = fock::make_vacuum(1, t);
  auto& c = out.state.amplitudes;
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= t.cutoff; ++n)
    c[n] = c[n - 1] * alpha / std::sqrt(double(n));
  const double kept = c.squaredNorm();
  out.leakage = 1.0 - kept;
  c /= std::sqrt(kept);
  return out;
}

PreparedState make_squeezed_vac(Complex zeta, Truncation t,
                                const ExpmOptions& opt) {
  PreparedState out;
  out.state = fock::make_vacuum(1, t);
  SparseOperator g = gen_squeeze(zeta, 0, t);
  out.state.amplitudes = fock::expm_action(g.mat, 1.0, out.state.amplitudes,
                                           opt);
  // The truncated generator is anti-Hermitian, so the norm is exact; report
  // boundary occupancy instead.
  out.leakage = fock::top_band_mass(out.state);
  return out;
}

PreparedState make_tmsv(Complex zeta, Truncation t, const ExpmOptions& opt) {
  PreparedState out;
  out.state = fock::make_vacuum(2, t);
  SparseOperator g = gen_two_mode_squeeze(zeta, 0, 1, t);
  out.state.amplitudes =
      fock::expm_action(fock::embed(g, 2), 1.0, out.state.amplitudes, opt);
  out.leakage = fock::top_band_mass(out.state);
  return out;
}

}  // namespace herald::toolbox
