#pragma once

#include <random>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "herald/fock/expm.hpp"
#include "herald/fock/state.hpp"

namespace testutil {

using herald::fock::Complex;
using herald::fock::Matrix;
using herald::fock::Sparse;
using herald::fock::Vector;

// Independent oracle: Pade-based dense exponential (the library path is
// scaling + truncated Taylor, so the routes share no code).
inline Vector dense_expm_apply(const Sparse& a, Complex scale,
                               const Vector& b) {
  Matrix m = Matrix(a) * scale;
  return m.exp() * b;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline Complex random_unit(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(g), u(g)};
}

// Random sparse matrix with ~density fraction of nonzeros.
inline Sparse random_sparse(int dim, double density, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Triplet<Complex>> t;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (u(g) < density) t.emplace_back(r, c, random_unit(g));
  Sparse s(dim, dim);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

inline Sparse anti_hermitian(const Sparse& s) {
  Sparse adj = Sparse(s.adjoint());
  return Sparse(0.5 * (s - adj));
}

inline Vector random_ket(Eigen::Index dim, std::mt19937_64& g) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = random_unit(g);
  v.normalize();
  return v;
}

inline herald::fock::KetState random_state(int n_modes,
                                           herald::fock::Truncation t,
                                           std::mt19937_64& g) {
  herald::fock::KetState psi;
  psi.n_modes = n_modes;
  psi.truncation = t;
  psi.amplitudes =
      random_ket(herald::fock::BasisIndexer(n_modes, t).dim(), g);
  return psi;
}

}  // namespace testutil
