#pragma once

#include "herald/fock/expm.hpp"
#include "herald/fock/project.hpp"

namespace herald::toolbox {

using fock::ExpmOptions;
using fock::PovmElement;
using fock::Truncation;

// Photon counting with detector loss gamma:
//   E_n = sum_{k >= n} C(k,n) (1-gamma)^n gamma^(k-n) |k><k|
// gamma = 0 reduces to the ideal projector |n><n|.
PovmElement pnrd_element(int n, double gamma, Truncation t);

// Bucket (on/off) detector: E_off = sum_n gamma^n |n><n|, E_on = I - E_off.
// outcome 0 = no click, 1 = click.
PovmElement bucket_element(int outcome, double gamma, Truncation t);

// Multiplexed detection: the mode is split over `detectors` bucket detectors
// and `clicks` of them fire.  Ideal weights
//   w_r(c) = d!/(d-r)! * S(c,r) / d^c
// (S = Stirling second kind); detector loss folds each |c><c| into the lossy
// photon-counting element E_c.
PovmElement multiplex_element(int clicks, int detectors, double gamma,
                              Truncation t);

// Homodyne outcome binned around quadrature value x at angle lambda:
// E = bin * |x_lambda><x_lambda| with the delta-normalized projector
//   |x_lambda> = pi^(-1/4) exp(-x^2/2) exp(sqrt2 x e^{i lambda} adag
//                                          - e^{2 i lambda} adag^2 / 2)|0>.
PovmElement homodyne_element(double x, double lambda, double bin, Truncation t,
                             const ExpmOptions& opt = {});

// Full outcome family of one detector kind (completeness: elements sum to the
// identity for pnrd/bucket/multiplex at any truncation and any gamma).
std::vector<PovmElement> pnrd_family(double gamma, Truncation t);
std::vector<PovmElement> bucket_family(double gamma, Truncation t);
std::vector<PovmElement> multiplex_family(int detectors, double gamma,
                                          Truncation t);

}  // namespace herald::toolbox
