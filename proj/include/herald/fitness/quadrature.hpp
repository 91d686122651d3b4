#pragma once

#include "herald/fock/state.hpp"

namespace herald::fitness {

// Nodes and weights of an integration rule on [a, b]; sum of weights = b - a.
struct QuadratureRule {
  fock::RealVector nodes;
  fock::RealVector weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre rule with n nodes mapped onto [a, b]; exact for polynomials
// of degree <= 2n - 1.
QuadratureRule gauss_legendre(int n, double a, double b);

}  // namespace herald::fitness
