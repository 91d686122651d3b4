#include "herald/toolbox/unitaries.hpp"

#include <cmath>
#include <stdexcept>

#include "herald/fock/expm.hpp"

namespace herald::toolbox {

using fock::annihilation;
using fock::creation;
using fock::number_op;
using fock::Sparse;

namespace {

// Local two-mode kron with the first factor on the most significant digit.
Sparse kron2(const Sparse& a, const Sparse& b) {
  const int da = static_cast<int>(a.rows());
  const int db = static_cast<int>(b.rows());
  std::vector<Eigen::Triplet<fock::Complex>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int oa = 0; oa < a.outerSize(); ++oa)
    for (Sparse::InnerIterator ia(a, oa); ia; ++ia)
      for (int ob = 0; ob < b.outerSize(); ++ob)
        for (Sparse::InnerIterator ib(b, ob); ib; ++ib)
          trips.emplace_back(ia.row() * db + ib.row(),
                             ia.col() * db + ib.col(),
                             ia.value() * ib.value());
  Sparse out(da * db, da * db);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

void check_pair(int i, int j, const char* who) {
  if (i == j) throw std::invalid_argument(std::string(who) + ": i == j");
}

void evolve(KetState& psi, const SparseOperator& gen, const ExpmOptions& opt) {
  // Skip the embedding when the generator already covers every mode in
  // natural order.
  bool natural = psi.n_modes == static_cast<int>(gen.modes.size());
  for (int m = 0; natural && m < psi.n_modes; ++m)
    natural = gen.modes[m] == m;
  if (natural) {
    psi.amplitudes = fock::expm_action(gen.mat, 1.0, psi.amplitudes, opt);
  } else {
    const fock::Sparse full = fock::embed(gen, psi.n_modes);
    psi.amplitudes = fock::expm_action(full, 1.0, psi.amplitudes, opt);
  }
}

}  // namespace

SparseOperator gen_displacement(Complex alpha, int mode, Truncation t) {
  Sparse g = Sparse(alpha * creation(t)) -
             Sparse(std::conj(alpha) * annihilation(t));
  return {std::move(g), {mode}, t};
}

SparseOperator gen_squeeze(Complex zeta, int mode, Truncation t) {
  Sparse a = annihilation(t), ad = creation(t);
  Sparse g = Sparse(0.5 * std::conj(zeta) * Sparse(a * a)) -
             Sparse(0.5 * zeta * Sparse(ad * ad));
  return {std::move(g), {mode}, t};
}

SparseOperator gen_two_mode_squeeze(Complex zeta, int mode_i, int mode_j,
                                    Truncation t) {
  check_pair(mode_i, mode_j, "gen_two_mode_squeeze");
  Sparse a = annihilation(t), ad = creation(t);
  Sparse g = Sparse(std::conj(zeta) * kron2(a, a)) -
             Sparse(zeta * kron2(ad, ad));
  return {std::move(g), {mode_i, mode_j}, t};
}

SparseOperator gen_phase(double phi, int mode, Truncation t) {
  Sparse g = Sparse(Complex(0.0, phi) * number_op(t));
  return {std::move(g), {mode}, t};
}

SparseOperator gen_beamsplitter(double transmission, int mode_i, int mode_j,
                                Truncation t) {
  check_pair(mode_i, mode_j, "gen_beamsplitter");
  if (transmission < 0.0 || transmission > 1.0)
    throw std::invalid_argument("gen_beamsplitter: transmission outside [0,1]");
  const double theta = std::acos(std::sqrt(transmission));
  Sparse a = annihilation(t), ad = creation(t);
  Sparse g = Sparse(theta * kron2(a, ad)) - Sparse(theta * kron2(ad, a));
  return {std::move(g), {mode_i, mode_j}, t};
}

void apply_displacement(KetState& psi, int mode, Complex alpha,
                        const ExpmOptions& opt) {
  evolve(psi, gen_displacement(alpha, mode, psi.truncation), opt);
}

void apply_squeeze(KetState& psi, int mode, Complex zeta,
                   const ExpmOptions& opt) {
  evolve(psi, gen_squeeze(zeta, mode, psi.truncation), opt);
}

void apply_two_mode_squeeze(KetState& psi, int mode_i, int mode_j, Complex zeta,
                            const ExpmOptions& opt) {
  evolve(psi, gen_two_mode_squeeze(zeta, mode_i, mode_j, psi.truncation), opt);
}

void apply_phase(KetState& psi, int mode, double phi, const ExpmOptions& opt) {
  evolve(psi, gen_phase(phi, mode, psi.truncation), opt);
}

void apply_beamsplitter(KetState& psi, int mode_i, int mode_j,
                        double transmission, const ExpmOptions& opt) {
  evolve(psi, gen_beamsplitter(transmission, mode_i, mode_j, psi.truncation),
         opt);
}

}  // namespace herald::toolbox
