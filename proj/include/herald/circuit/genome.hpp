#pragma once

#include <cstdint>
#include <vector>

#include "herald/circuit/plan.hpp"

namespace herald::circuit {

// Mixed integer / real chromosome.  Integer genes select element kinds,
// wirings and discrete outcomes; real genes live in [0,1] and are mapped
// onto each element's parameter ranges at decode time.
struct Genome {
  std::vector<int> int_genes;
  std::vector<double> real_genes;

  bool operator==(const Genome&) const = default;
};

// Fixed gene addressing for a given toolbox and circuit size.  Every slot
// reserves genes for the widest element of its category; genes a decoded
// kind does not consume are neutral (ignored), never invalid.
struct GenomeLayout {
  struct Slot {
    int kind_gene = -1;   // index into int_genes
    int aux_gene = -1;    // Fock n (inputs), wiring (ops), outcome (heralds)
    int real0 = -1;       // first of two reserved real genes
  };

  toolbox::ToolboxSpec toolbox;
  int n_modes = 2;
  int m_ops = 1;

  std::vector<Slot> inputs;   // n_modes slots (trailing ones unused when a
                              // two-mode state covers two modes)
  std::vector<Slot> ops;      // m_ops slots
  std::vector<Slot> heralds;  // n_modes - 1 slots; slot k measures mode k,
                              // the last mode carries the output

  std::vector<int> int_bounds;  // exclusive upper bound per integer gene
  int n_int = 0;
  int n_real = 0;

  bool operator==(const GenomeLayout&) const = default;
};

// Deterministic layout construction; throws ConfigError when a toolbox
// category is empty or the circuit size is degenerate.
GenomeLayout genome_layout(const toolbox::ToolboxSpec& toolbox, int n_modes,
                           int m_ops);

// Total decoding: every genome whose genes sit within the declared bounds
// maps to a valid plan (kind and wiring selectors wrap modulo the number of
// contextually valid choices).  Out-of-bounds genes throw ConfigError naming
// the gene index.
ExperimentPlan decode(const GenomeLayout& layout, const Genome& genome);

// Inverse of decode where representable: encode(plan) decodes back to an
// equal plan.  Unused genes are zeroed.  Throws ConfigError when the plan
// does not fit the layout (sizes, kinds outside the toolbox, parameters
// beyond the bounds, heralds not on modes 0..n-2 in order).
Genome encode(const GenomeLayout& layout, const ExperimentPlan& plan);

// Uniformly random in-bounds genome.
Genome random_genome(const GenomeLayout& layout, std::uint64_t seed);

// Enumerates ordered mode pairs for two-mode wiring genes.
std::pair<int, int> wiring_pair(int index, int n_modes);
int wiring_index(int i, int j, int n_modes);

}  // namespace herald::circuit
