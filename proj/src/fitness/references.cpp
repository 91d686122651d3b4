#include "herald/fitness/references.hpp"

#include <cmath>
#include <stdexcept>

#include "herald/fitness/qfi.hpp"
#include "herald/toolbox/loss.hpp"
#include "herald/toolbox/states.hpp"

namespace herald::fitness {

fock::KetState reference_probe(ReferenceKind kind, double nbar,
                               int truncation) {
  if (!(nbar > 0.0))
    throw std::invalid_argument("reference probe needs nbar > 0");
  const fock::Truncation t{truncation};
  switch (kind) {
    case ReferenceKind::CoherentVacuumBS:
      // |alpha> on a 50:50 splitter with vacuum leaves each arm coherent
      // with |alpha|^2 / 2 photons; one arm carries nbar / 2.
      return toolbox::make_coherent(std::sqrt(nbar / 2.0), t).state;
    case ReferenceKind::TwoSqueezedVac: {
      const double r = std::asinh(std::sqrt(nbar / 2.0));  // sinh^2 r per arm
      return toolbox::make_squeezed_vac(r, t).state;
    }
  }
  throw std::logic_error("reference_probe: unknown kind");
}

fock::KetState reference_states(ReferenceKind kind, double nbar,
                                int truncation) {
  const fock::KetState arm = reference_probe(kind, nbar, truncation);
  return fock::tensor(arm, arm);
}

double squeezed_vacuum_qfi_baseline(double nbar, int truncation) {
  if (!(nbar > 0.0))
    throw std::invalid_argument("baseline needs nbar > 0");
  const double r = std::asinh(std::sqrt(nbar));  // sinh^2 r = nbar
  fock::KetState sv =
      toolbox::make_squeezed_vac(r, fock::Truncation{truncation}).state;
  return qfi_scaled(sv);
}

double lossy_squeezed_vacuum_qfi_baseline(double nbar, double gamma,
                                          int truncation) {
  if (!(nbar > 0.0))
    throw std::invalid_argument("baseline needs nbar > 0");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("baseline needs gamma in [0, 1)");
  // Survival scales the mean linearly, so squeeze to nbar / (1 - gamma).
  const double r = std::asinh(std::sqrt(nbar / (1.0 - gamma)));
  fock::KetState sv =
      toolbox::make_squeezed_vac(r, fock::Truncation{truncation}).state;
  return qfi_scaled(toolbox::apply_loss(sv, gamma));
}

}  // namespace herald::fitness
