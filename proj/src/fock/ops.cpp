#include "herald/fock/ops.hpp"

#include <cmath>
#include <stdexcept>

namespace herald::fock {

Sparse annihilation(Truncation t) {
  const int d = t.levels();
  Sparse a(d, d);
  a.reserve(Eigen::VectorXi::Constant(d, 1));
  // a |n> = sqrt(n) |n-1>  ->  a_{n-1,n} = sqrt(n)
  for (int n = 1; n < d; ++n) a.insert(n - 1, n) = std::sqrt(double(n));
  a.makeCompressed();
  return a;
}

Sparse creation(Truncation t) {
  const int d = t.levels();
  Sparse a(d, d);
  a.reserve(Eigen::VectorXi::Constant(d, 1));
  for (int n = 0; n + 1 < d; ++n) a.insert(n + 1, n) = std::sqrt(double(n + 1));
  a.makeCompressed();
  return a;
}

Sparse number_op(Truncation t) {
  const int d = t.levels();
  Sparse n(d, d);
  n.reserve(Eigen::VectorXi::Constant(d, 1));
  for (int k = 1; k < d; ++k) n.insert(k, k) = double(k);
  n.makeCompressed();
  return n;
}

Sparse identity_op(Truncation t) {
  const int d = t.levels();
  Sparse i(d, d);
  i.setIdentity();
  return i;
}

Sparse embed(const SparseOperator& op, int n_modes) {
  const int d = op.truncation.levels();
  const int k = static_cast<int>(op.modes.size());
  for (int m : op.modes)
    if (m < 0 || m >= n_modes)
      throw std::out_of_range("embed: mode outside register");

  const BasisIndexer full(n_modes, op.truncation);
  const BasisIndexer local(k, op.truncation);
  if (op.mat.rows() != local.dim())
    throw std::invalid_argument("embed: operator/mode-signature mismatch");

  // Modes not acted on, in ascending order.
  std::vector<int> rest;
  for (int m = 0; m < n_modes; ++m)
    if (std::find(op.modes.begin(), op.modes.end(), m) == op.modes.end())
      rest.push_back(m);
  const std::int64_t n_rest = pow_i64(d, static_cast<int>(rest.size()));

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(op.mat.nonZeros() * n_rest));

  std::vector<int> row_local(k), col_local(k), digits(n_modes);
  for (int outer = 0; outer < op.mat.outerSize(); ++outer) {
    for (Sparse::InnerIterator it(op.mat, outer); it; ++it) {
      local.unpack(it.row(), row_local);
      local.unpack(it.col(), col_local);
      for (std::int64_t r = 0; r < n_rest; ++r) {
        // Spectator digits, common to row and column.
        std::int64_t rr = r;
        for (int j = static_cast<int>(rest.size()) - 1; j >= 0; --j) {
          digits[rest[j]] = static_cast<int>(rr % d);
          rr /= d;
        }
        for (int j = 0; j < k; ++j) digits[op.modes[j]] = row_local[j];
        const std::int64_t row = full.pack(digits);
        for (int j = 0; j < k; ++j) digits[op.modes[j]] = col_local[j];
        const std::int64_t col = full.pack(digits);
        trips.emplace_back(row, col, it.value());
      }
    }
  }

  Sparse out(full.dim(), full.dim());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

Vector apply_embedded(const SparseOperator& op, const KetState& psi) {
  if (op.truncation != psi.truncation)
    throw std::invalid_argument("apply_embedded: truncation mismatch");
  return embed(op, psi.n_modes) * psi.amplitudes;
}

}  // namespace herald::fock
