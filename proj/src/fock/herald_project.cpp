#include "herald/fock/project.hpp"

#include <cmath>

#include "herald/errors.hpp"

namespace herald::fock {

bool PovmElement::is_fock_projector() const {
  if (!is_diagonal()) return false;
  int ones = 0;
  for (Eigen::Index k = 0; k < diag.size(); ++k) {
    if (diag[k] == 1.0)
      ++ones;
    else if (diag[k] != 0.0)
      return false;
  }
  return ones == 1;
}

int PovmElement::fock_level() const {
  for (Eigen::Index k = 0; k < diag.size(); ++k)
    if (diag[k] == 1.0) return static_cast<int>(k);
  throw std::logic_error("PovmElement::fock_level: not a Fock projector");
}

Sparse PovmElement::matrix() const {
  if (is_diagonal()) {
    const int d = static_cast<int>(diag.size());
    Sparse m(d, d);
    for (int k = 0; k < d; ++k)
      if (diag[k] != 0.0) m.insert(k, k) = diag[k];
    m.makeCompressed();
    return m;
  }
  const int d = static_cast<int>(rank1.size());
  Sparse m(d, d);
  for (int r = 0; r < d; ++r) {
    if (rank1[r] == Complex(0)) continue;
    for (int c = 0; c < d; ++c) {
      if (rank1[c] == Complex(0)) continue;
      m.insert(r, c) = rank1[r] * std::conj(rank1[c]);
    }
  }
  m.makeCompressed();
  return m;
}

namespace {

// Amplitudes of psi with `mode` pinned to level k, other modes in order.
Vector pinned_slice(const KetState& psi, int mode, int k) {
  const BasisIndexer ix = psi.indexer();
  const int d = ix.levels;
  const std::int64_t stride = pow_i64(d, psi.n_modes - 1 - mode);
  const std::int64_t rest = psi.dim() / d;
  Vector v(rest);
  for (std::int64_t g = 0; g < rest; ++g) {
    const std::int64_t high = g / stride;
    const std::int64_t low = g % stride;
    v[g] = psi.amplitudes[(high * d + k) * stride + low];
  }
  return v;
}

HeraldOutcome pure_outcome(Vector v, int n_modes, Truncation t,
                           double floor, const std::string& label) {
  const double p = v.squaredNorm();
  if (p < floor)
    throw HeraldImpossible("herald outcome '" + label +
                           "' below probability floor", p);
  HeraldOutcome out;
  out.is_pure = true;
  out.probability = p;
  out.ket.n_modes = n_modes;
  out.ket.truncation = t;
  out.ket.amplitudes = v / std::sqrt(p);
  return out;
}

}  // namespace

HeraldOutcome herald_project(const KetState& psi, const PovmElement& elem,
                             int measured_mode, double probability_floor) {
  if (psi.n_modes < 2)
    throw std::invalid_argument("herald_project: nothing left to keep");
  if (measured_mode < 0 || measured_mode >= psi.n_modes)
    throw std::out_of_range("herald_project: bad mode");
  const int d = psi.truncation.levels();

  if (elem.is_rank1()) {
    if (elem.rank1.size() != d)
      throw std::invalid_argument("herald_project: element dimension");
    Vector v = Vector::Zero(psi.dim() / d);
    for (int k = 0; k < d; ++k) {
      if (elem.rank1[k] == Complex(0)) continue;
      v += std::conj(elem.rank1[k]) * pinned_slice(psi, measured_mode, k);
    }
    return pure_outcome(std::move(v), psi.n_modes - 1, psi.truncation,
                        probability_floor, elem.label);
  }

  if (elem.diag.size() != d)
    throw std::invalid_argument("herald_project: element dimension");

  if (elem.is_fock_projector()) {
    return pure_outcome(pinned_slice(psi, measured_mode, elem.fock_level()),
                        psi.n_modes - 1, psi.truncation, probability_floor,
                        elem.label);
  }

  // General diagonal element: classical mixture of pinned slices.
  const std::int64_t rest = psi.dim() / d;
  Matrix rho = Matrix::Zero(rest, rest);
  double p = 0.0;
  for (int k = 0; k < d; ++k) {
    const double w = elem.diag[k];
    if (w == 0.0) continue;
    const Vector v = pinned_slice(psi, measured_mode, k);
    const double vn = v.squaredNorm();
    if (vn == 0.0) continue;
    p += w * vn;
    rho.noalias() += w * (v * v.adjoint());
  }
  if (p < probability_floor)
    throw HeraldImpossible("herald outcome '" + elem.label +
                           "' below probability floor", p);
  HeraldOutcome out;
  out.is_pure = false;
  out.probability = p;
  out.rho.n_modes = psi.n_modes - 1;
  out.rho.truncation = psi.truncation;
  out.rho.rho = rho / p;
  return out;
}

HeraldOutcome herald_project_diag_joint(
    const KetState& psi,
    const std::vector<std::pair<int, const PovmElement*>>& elems,
    double probability_floor) {
  const int n = psi.n_modes;
  if (static_cast<int>(elems.size()) != n - 1)
    throw std::invalid_argument(
        "herald_project_diag_joint: exactly one mode must survive");
  const int d = psi.truncation.levels();

  std::vector<bool> measured(n, false);
  for (auto& [m, e] : elems) {
    if (m < 0 || m >= n || measured[m])
      throw std::invalid_argument("herald_project_diag_joint: bad modes");
    if (!e->is_diagonal())
      throw std::invalid_argument(
          "herald_project_diag_joint: diagonal elements only");
    measured[m] = true;
  }
  int out_mode = -1;
  for (int m = 0; m < n; ++m)
    if (!measured[m]) out_mode = m;

  // Support of each measured mode's weights, in mode order.
  struct Axis {
    int mode;
    std::vector<int> levels;
    const RealVector* w;
  };
  std::vector<Axis> axes;
  std::string labels;
  for (auto& [m, e] : elems) {
    Axis ax{m, {}, &e->diag};
    for (int k = 0; k < d; ++k)
      if (e->diag[k] != 0.0) ax.levels.push_back(k);
    if (ax.levels.empty())
      throw HeraldImpossible("herald outcome '" + e->label + "' empty", 0.0);
    labels += (labels.empty() ? "" : ",") + e->label;
    axes.push_back(std::move(ax));
  }

  const bool all_projective = [&] {
    for (auto& [m, e] : elems)
      if (!e->is_fock_projector()) return false;
    return true;
  }();

  const BasisIndexer ix = psi.indexer();
  std::vector<int> digits(n);
  std::vector<std::size_t> pos(axes.size(), 0);

  Matrix rho;
  if (!all_projective) rho = Matrix::Zero(d, d);
  Vector v(d);
  Vector pure;
  double p = 0.0;

  // Odometer over the measured-mode supports.
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const int k = axes[a].levels[pos[a]];
      digits[axes[a].mode] = k;
      w *= (*axes[a].w)[k];
    }
    for (int k = 0; k < d; ++k) {
      digits[out_mode] = k;
      v[k] = psi.amplitudes[ix.pack(digits)];
    }
    const double vn = v.squaredNorm();
    if (vn > 0.0) {
      p += w * vn;
      if (all_projective)
        pure = v;
      else
        rho.noalias() += w * (v * v.adjoint());
    }

    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++pos[a] < axes[a].levels.size()) break;
      pos[a] = 0;
    }
    if (a == axes.size()) break;
  }

  if (p < probability_floor)
    throw HeraldImpossible("herald outcomes '" + labels +
                           "' below probability floor", p);

  HeraldOutcome out;
  out.probability = p;
  if (all_projective) {
    out.is_pure = true;
    out.ket.n_modes = 1;
    out.ket.truncation = psi.truncation;
    out.ket.amplitudes = pure / std::sqrt(p);
  } else {
    out.is_pure = false;
    out.rho.n_modes = 1;
    out.rho.truncation = psi.truncation;
    out.rho.rho = rho / p;
  }
  return out;
}

}  // namespace herald::fock
