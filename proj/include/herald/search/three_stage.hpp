#pragma once

#include <optional>
#include <string>
#include <vector>

#include "herald/search/ga.hpp"
#include "herald/toolbox/elements.hpp"

namespace herald::search {

// What to search over and how to score it.
struct SearchProblem {
  toolbox::ToolboxSpec toolbox;
  int n_modes = 2;  // modes 0..n-2 are heralded, the last carries the output
  int m_ops = 3;    // operator slots in the circuit
  fitness::FitnessSpec fitness;
  circuit::SimOptions sim;
};

// Final deliverable of a run.  Deliberately free of configuration echoes and
// timestamps so that two runs walking the same path report identically.
struct RunReport {
  int format_version = 1;
  double best_fitness = -std::numeric_limits<double>::infinity();
  circuit::Genome best_genome;
  circuit::ExperimentPlan best_plan;
  fitness::Evaluation best_eval;
  std::vector<double> number_distribution;  // output photon-number probabilities
  std::vector<GenerationRecord> trace;      // per-round bests across stages
  std::int64_t evaluator_calls = 0;         // every genome evaluation counted
};

// Per-generation snapshot carrying everything a restart needs.
struct Checkpoint {
  int format_version = 1;
  std::uint64_t seed = 0;
  int stage = 0;                        // stage the population belongs to
  int generation = 0;                   // rounds completed within that stage
  std::int64_t evaluator_calls = 0;
  std::vector<GenerationRecord> trace;  // full run trace so far
  std::vector<Individual> population;   // evaluated, fitness non-increasing
};

// Writes checkpoint_s<stage>_g<generation>.json atomically (temp file +
// rename), creating the directory if needed.
void save_checkpoint(const std::string& dir, const Checkpoint& checkpoint);

// Loads the snapshot with the largest (stage, generation); empty when the
// directory holds none.  Throws ConfigError on malformed files.
std::optional<Checkpoint> load_latest_checkpoint(const std::string& dir);

// Scores one genome for the given stage: stages 1 and 2 decode and simulate
// at their fixed truncations, stage 3 with adaptive truncation.  Decode or
// simulation failures come back as failed Evaluations, never exceptions.
GenomeEvaluator make_stage_evaluator(const SearchProblem& problem,
                                     const GaConfig& config, int stage_index);

// The full pipeline: a large random sample scored coarsely (stage 1), its
// best individuals refined by a mid-size GA (stage 2), and the survivors
// polished under adaptive truncation (stage 3); each stage seeds the next
// with its top individuals.  Deterministic for a fixed seed regardless of
// worker count.  Writes per-generation checkpoints when checkpoint_dir is
// set; with resume = true, continues from the latest one and finishes with
// the same report an uninterrupted run would produce.
RunReport run_three_stage(const SearchProblem& problem, const GaConfig& config);

}  // namespace herald::search
