#include "herald/circuit/genome.hpp"

#include <cmath>
#include <random>

#include "herald/errors.hpp"

namespace herald::circuit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int checked_index(const std::vector<int>& v, int gene) {
  return v[static_cast<std::size_t>(gene)];
}

// Smallest in-bounds gene value selecting `want` from the contextual list
// `valid` (bound is the size of the full category).
template <typename Kind>
int gene_for_kind(const std::vector<Kind>& valid, Kind want,
                  const char* what) {
  for (std::size_t i = 0; i < valid.size(); ++i)
    if (valid[i] == want) return static_cast<int>(i);
  throw ConfigError(std::string("plan uses a ") + what +
                    " the toolbox does not offer: " + name(want));
}

double wrap_unit_phase(double arg) {
  double frac = arg / kTwoPi;
  frac -= std::floor(frac);
  return frac;
}

void encode_polar(Complex amp, double mag_max, double* r0, double* r1,
                  const char* what) {
  const double mag = std::abs(amp);
  if (mag > mag_max * (1.0 + 1e-12))
    throw ConfigError(std::string(what) + " magnitude " + std::to_string(mag) +
                      " exceeds the toolbox bound " + std::to_string(mag_max));
  *r0 = std::min(mag / mag_max, 1.0);
  *r1 = mag == 0.0 ? 0.0 : wrap_unit_phase(std::arg(amp));
}

}  // namespace

std::pair<int, int> wiring_pair(int index, int n_modes) {
  const int i = index / (n_modes - 1);
  const int r = index % (n_modes - 1);
  return {i, r + (r >= i ? 1 : 0)};
}

int wiring_index(int i, int j, int n_modes) {
  return i * (n_modes - 1) + j - (j > i ? 1 : 0);
}

GenomeLayout genome_layout(const toolbox::ToolboxSpec& toolbox, int n_modes,
                           int m_ops) {
  if (n_modes < 2) throw ConfigError("genome layout needs at least 2 modes");
  if (m_ops < 1) throw ConfigError("genome layout needs at least 1 op slot");
  if (toolbox.states.empty() || toolbox.ops.empty() ||
      toolbox.measurements.empty())
    throw ConfigError("toolbox has an empty element category");
  if (toolbox.single_mode_states().empty())
    throw ConfigError("toolbox needs at least one single-mode input state");

  GenomeLayout lay;
  lay.toolbox = toolbox;
  lay.n_modes = n_modes;
  lay.m_ops = m_ops;

  auto add_slot = [&lay](std::vector<GenomeLayout::Slot>& where, int kind_bound,
                         int aux_bound) {
    GenomeLayout::Slot s;
    s.kind_gene = lay.n_int;
    lay.int_bounds.push_back(kind_bound);
    s.aux_gene = lay.n_int + 1;
    lay.int_bounds.push_back(aux_bound);
    lay.n_int += 2;
    s.real0 = lay.n_real;
    lay.n_real += 2;
    where.push_back(s);
  };

  const auto& b = toolbox.bounds;
  for (int i = 0; i < n_modes; ++i)
    add_slot(lay.inputs, static_cast<int>(toolbox.states.size()),
             b.fock_max + 1);
  for (int i = 0; i < m_ops; ++i)
    add_slot(lay.ops, static_cast<int>(toolbox.ops.size()),
             std::max(n_modes, n_modes * (n_modes - 1)));
  for (int i = 0; i + 1 < n_modes; ++i)
    add_slot(lay.heralds, static_cast<int>(toolbox.measurements.size()),
             toolbox.max_outcome() + 1);
  return lay;
}

ExperimentPlan decode(const GenomeLayout& layout, const Genome& genome) {
  if (static_cast<int>(genome.int_genes.size()) != layout.n_int ||
      static_cast<int>(genome.real_genes.size()) != layout.n_real)
    throw ConfigError(
        "genome size mismatch: expected " + std::to_string(layout.n_int) +
        " integer and " + std::to_string(layout.n_real) + " real genes, got " +
        std::to_string(genome.int_genes.size()) + " and " +
        std::to_string(genome.real_genes.size()));
  for (int i = 0; i < layout.n_int; ++i) {
    const int g = genome.int_genes[i];
    if (g < 0 || g >= layout.int_bounds[i])
      throw ConfigError("integer gene " + std::to_string(i) + " = " +
                        std::to_string(g) + " outside [0, " +
                        std::to_string(layout.int_bounds[i]) + ")");
  }
  for (int i = 0; i < layout.n_real; ++i) {
    const double g = genome.real_genes[i];
    if (!(g >= 0.0 && g <= 1.0))
      throw ConfigError("real gene " + std::to_string(i) + " = " +
                        std::to_string(g) + " outside [0, 1]");
  }

  const toolbox::ToolboxSpec& tb = layout.toolbox;
  const toolbox::ToolboxBounds& b = tb.bounds;
  ExperimentPlan plan;
  plan.n_modes = layout.n_modes;
  plan.multiplex_detectors = b.multiplex_detectors;

  const std::vector<toolbox::StateKind> singles = tb.single_mode_states();
  int mode = 0;
  int slot = 0;
  while (mode < layout.n_modes) {
    const GenomeLayout::Slot& s = layout.inputs[slot];
    const bool pair_fits = mode + 1 < layout.n_modes;
    const auto& valid = pair_fits ? tb.states : singles;
    const int kg = checked_index(genome.int_genes, s.kind_gene);
    InputState in;
    in.kind = valid[kg % valid.size()];
    const double r0 = genome.real_genes[s.real0];
    const double r1 = genome.real_genes[s.real0 + 1];
    switch (in.kind) {
      case toolbox::StateKind::Fock:
        in.fock_n =
            checked_index(genome.int_genes, s.aux_gene) % (b.fock_max + 1);
        break;
      case toolbox::StateKind::Coherent:
        in.amp = std::polar(r0 * b.alpha_max, kTwoPi * r1);
        break;
      case toolbox::StateKind::SqueezedVac:
      case toolbox::StateKind::TwoModeSqueezedVac:
        in.amp = std::polar(r0 * b.zeta_state_max, kTwoPi * r1);
        break;
    }
    in.modes = {mode};
    if (toolbox::arity(in.kind) == 2) in.modes.push_back(mode + 1);
    plan.inputs.push_back(std::move(in));
    mode += toolbox::arity(plan.inputs.back().kind);
    slot += 1;
  }

  for (const GenomeLayout::Slot& s : layout.ops) {
    const int kg = checked_index(genome.int_genes, s.kind_gene);
    const int wg = checked_index(genome.int_genes, s.aux_gene);
    const double r0 = genome.real_genes[s.real0];
    const double r1 = genome.real_genes[s.real0 + 1];
    PlanOp op;
    op.kind = tb.ops[kg % tb.ops.size()];
    if (toolbox::arity(op.kind) == 1) {
      op.modes = {wg % layout.n_modes};
    } else {
      auto [i, j] =
          wiring_pair(wg % (layout.n_modes * (layout.n_modes - 1)),
                      layout.n_modes);
      op.modes = {i, j};
    }
    switch (op.kind) {
      case toolbox::OpKind::Identity:
        op.modes = {0};
        break;
      case toolbox::OpKind::Displacement:
        op.amp = std::polar(r0 * b.alpha_max, kTwoPi * r1);
        break;
      case toolbox::OpKind::Squeeze:
      case toolbox::OpKind::TwoModeSqueeze:
        op.amp = std::polar(r0 * b.zeta_op_max, kTwoPi * r1);
        break;
      case toolbox::OpKind::PhaseShift:
        op.value = kTwoPi * r0;
        break;
      case toolbox::OpKind::BeamSplitter:
        op.value = r0;
        break;
    }
    plan.ops.push_back(std::move(op));
  }

  for (std::size_t k = 0; k < layout.heralds.size(); ++k) {
    const GenomeLayout::Slot& s = layout.heralds[k];
    const int kg = checked_index(genome.int_genes, s.kind_gene);
    const int og = checked_index(genome.int_genes, s.aux_gene);
    const double r0 = genome.real_genes[s.real0];
    const double r1 = genome.real_genes[s.real0 + 1];
    Herald h;
    h.kind = tb.measurements[kg % tb.measurements.size()];
    h.mode = static_cast<int>(k);
    switch (h.kind) {
      case toolbox::MeasKind::Pnrd:
        h.outcome = og % (b.pnrd_max + 1);
        break;
      case toolbox::MeasKind::Bucket:
        h.outcome = og % 2;
        break;
      case toolbox::MeasKind::Multiplex:
        h.outcome = og % (b.multiplex_click_max + 1);
        break;
      case toolbox::MeasKind::Homodyne:
        h.x = (2.0 * r0 - 1.0) * b.homodyne_x_max;
        h.lambda = kTwoPi * r1;
        break;
    }
    plan.heralds.push_back(h);
  }

  plan.validate();
  return plan;
}

Genome encode(const GenomeLayout& layout, const ExperimentPlan& plan) {
  plan.validate();
  if (plan.n_modes != layout.n_modes)
    throw ConfigError("plan has " + std::to_string(plan.n_modes) +
                      " modes, layout expects " +
                      std::to_string(layout.n_modes));
  if (static_cast<int>(plan.ops.size()) > layout.m_ops)
    throw ConfigError("plan has more ops than the layout's " +
                      std::to_string(layout.m_ops) + " slots");

  const toolbox::ToolboxSpec& tb = layout.toolbox;
  const toolbox::ToolboxBounds& b = tb.bounds;
  Genome g;
  g.int_genes.assign(layout.n_int, 0);
  g.real_genes.assign(layout.n_real, 0.0);

  const std::vector<toolbox::StateKind> singles = tb.single_mode_states();
  for (std::size_t i = 0; i < plan.inputs.size(); ++i) {
    const InputState& in = plan.inputs[i];
    const GenomeLayout::Slot& s = layout.inputs[i];
    const bool pair_fits = in.modes[0] + 1 < layout.n_modes;
    const auto& valid = pair_fits ? tb.states : singles;
    g.int_genes[s.kind_gene] = gene_for_kind(valid, in.kind, "state");
    switch (in.kind) {
      case toolbox::StateKind::Fock:
        if (in.fock_n > b.fock_max)
          throw ConfigError("Fock input exceeds the toolbox bound n <= " +
                            std::to_string(b.fock_max));
        g.int_genes[s.aux_gene] = in.fock_n;
        break;
      case toolbox::StateKind::Coherent:
        encode_polar(in.amp, b.alpha_max, &g.real_genes[s.real0],
                     &g.real_genes[s.real0 + 1], "coherent input");
        break;
      case toolbox::StateKind::SqueezedVac:
      case toolbox::StateKind::TwoModeSqueezedVac:
        encode_polar(in.amp, b.zeta_state_max, &g.real_genes[s.real0],
                     &g.real_genes[s.real0 + 1], "squeezed input");
        break;
    }
  }

  for (std::size_t i = 0; i < plan.ops.size(); ++i) {
    const PlanOp& op = plan.ops[i];
    const GenomeLayout::Slot& s = layout.ops[i];
    g.int_genes[s.kind_gene] = gene_for_kind(tb.ops, op.kind, "operator");
    if (op.kind == toolbox::OpKind::Identity) {
      g.int_genes[s.aux_gene] = 0;
    } else if (toolbox::arity(op.kind) == 1) {
      g.int_genes[s.aux_gene] = op.modes[0];
    } else {
      g.int_genes[s.aux_gene] =
          wiring_index(op.modes[0], op.modes[1], layout.n_modes);
    }
    switch (op.kind) {
      case toolbox::OpKind::Identity:
        break;
      case toolbox::OpKind::Displacement:
        encode_polar(op.amp, b.alpha_max, &g.real_genes[s.real0],
                     &g.real_genes[s.real0 + 1], "displacement");
        break;
      case toolbox::OpKind::Squeeze:
      case toolbox::OpKind::TwoModeSqueeze:
        encode_polar(op.amp, b.zeta_op_max, &g.real_genes[s.real0],
                     &g.real_genes[s.real0 + 1], "squeeze operator");
        break;
      case toolbox::OpKind::PhaseShift:
        g.real_genes[s.real0] = wrap_unit_phase(op.value);
        break;
      case toolbox::OpKind::BeamSplitter:
        g.real_genes[s.real0] = op.value;
        break;
    }
  }
  // Remaining op slots decode to the identity only if the toolbox lists it
  // first; pad with explicit identity genes instead.
  for (std::size_t i = plan.ops.size();
       i < static_cast<std::size_t>(layout.m_ops); ++i) {
    g.int_genes[layout.ops[i].kind_gene] =
        gene_for_kind(tb.ops, toolbox::OpKind::Identity, "operator");
  }

  for (std::size_t k = 0; k < plan.heralds.size(); ++k) {
    const Herald& h = plan.heralds[k];
    if (h.mode != static_cast<int>(k))
      throw ConfigError(
          "only plans heralding the first n-1 modes in order are encodable");
    if (h.trivial)
      throw ConfigError("trivial heralds (E = I) have no genome encoding");
    const GenomeLayout::Slot& s = layout.heralds[k];
    g.int_genes[s.kind_gene] =
        gene_for_kind(tb.measurements, h.kind, "measurement");
    switch (h.kind) {
      case toolbox::MeasKind::Pnrd:
        if (h.outcome > b.pnrd_max)
          throw ConfigError("heralded photon number exceeds the toolbox bound");
        g.int_genes[s.aux_gene] = h.outcome;
        break;
      case toolbox::MeasKind::Bucket:
        g.int_genes[s.aux_gene] = h.outcome;
        break;
      case toolbox::MeasKind::Multiplex:
        if (h.outcome > b.multiplex_click_max)
          throw ConfigError("heralded click count exceeds the toolbox bound");
        g.int_genes[s.aux_gene] = h.outcome;
        break;
      case toolbox::MeasKind::Homodyne: {
        if (std::abs(h.x) > b.homodyne_x_max * (1.0 + 1e-12))
          throw ConfigError("homodyne outcome exceeds the toolbox bound");
        g.real_genes[s.real0] =
            std::clamp((h.x / b.homodyne_x_max + 1.0) / 2.0, 0.0, 1.0);
        g.real_genes[s.real0 + 1] = wrap_unit_phase(h.lambda);
        break;
      }
    }
  }
  return g;
}

Genome random_genome(const GenomeLayout& layout, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Genome g;
  g.int_genes.resize(layout.n_int);
  g.real_genes.resize(layout.n_real);
  for (int i = 0; i < layout.n_int; ++i) {
    std::uniform_int_distribution<int> d(0, layout.int_bounds[i] - 1);
    g.int_genes[i] = d(gen);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < layout.n_real; ++i) g.real_genes[i] = u(gen);
  return g;
}

}  // namespace herald::circuit
