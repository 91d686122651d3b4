#include "herald/fock/expm.hpp"

#include <cmath>

#include "herald/errors.hpp"

namespace herald::fock {

namespace {

double one_norm(const Sparse& a) {
  double best = 0.0;
  for (int outer = 0; outer < a.outerSize(); ++outer) {
    double col = 0.0;
    for (Sparse::InnerIterator it(a, outer); it; ++it)
      col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

// One scaling step of the truncated Taylor series, y <- exp(h M) y.
// Terminates on two consecutive increments below tol * ||y|| (guards
// generators whose odd/even terms alternate in size).
template <typename Mat>
void taylor_step(const Mat& m, Complex h, Vector& y, const ExpmOptions& opt) {
  Vector term = y;
  Vector acc = y;
  double prev_rel = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= opt.max_terms; ++j) {
    term = (m * term).eval();
    term *= h / double(j);
    acc += term;
    const double rel = term.norm() / std::max(acc.norm(), 1e-300);
    if (rel <= opt.tol && prev_rel <= opt.tol) {
      y.swap(acc);
      return;
    }
    prev_rel = rel;
  }
  throw ExpmNonConvergence("expm_action: Taylor budget exhausted", prev_rel);
}

}  // namespace

Vector expm_action(const Sparse& a, Complex scale, const Vector& b,
                   const ExpmOptions& opt) {
  if (a.rows() != b.size())
    throw std::invalid_argument("expm_action: dimension mismatch");
  const double weight = std::abs(scale) * one_norm(a);
  if (weight == 0.0) return b;

  const int steps = std::max(1, int(std::ceil(weight / opt.theta)));
  const Complex h = scale / double(steps);

  Vector y = b;
  if (a.rows() < opt.dense_cutoff) {
    const Matrix dense(a);
    for (int s = 0; s < steps; ++s) taylor_step(dense, h, y, opt);
  } else {
    for (int s = 0; s < steps; ++s) taylor_step(a, h, y, opt);
  }
  return y;
}

}  // namespace herald::fock
