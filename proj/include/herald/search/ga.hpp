#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "herald/circuit/genome.hpp"
#include "herald/circuit/simulate.hpp"
#include "herald/fitness/evaluator.hpp"
#include "herald/search/rng.hpp"

namespace herald::search {

enum class CrossoverKind { Scattered, SinglePoint, TwoPoint };
enum class MutationKind { PowerMutation, PowerSelection };

// Hyperparameters of the three-stage genetic search.  Stage 1 is a single
// evaluation round over a large random sample at a coarse truncation; stage 2
// iterates at an intermediate truncation; stage 3 iterates with adaptive
// truncation.  Each stage seeds the next with its best individuals.
struct GaConfig {
  int stage1_population = 10000;
  int stage2_population = 1000;
  int stage3_population = 200;
  int stage1_generations = 1;   // evaluation rounds, initial round included
  int stage2_generations = 10;
  int stage3_generations = 40;
  int stage1_truncation = 30;   // Fock cutoff for stage-1 scoring
  int stage2_truncation = 80;   // Fock cutoff for stage-2 scoring
  circuit::AdaptiveOptions stage3_adaptive;  // stage-3 convergence schedule

  CrossoverKind crossover = CrossoverKind::Scattered;
  double crossover_fraction = 0.3;  // share of children bred by crossover
  int tournament_size = 8;
  int elite_count = 10;
  MutationKind mutation = MutationKind::PowerMutation;
  double power = 10.0;  // perturbation exponent; larger => smaller steps
  double rate = 0.2;    // per-gene mutation gate (PowerSelection only)

  int stall_generations = 15;  // stop a stage when the best fitness improves
  double stall_tol = 1e-6;     // by no more than this over that many rounds

  std::uint64_t seed = 0;
  int workers = 1;             // concurrent fitness evaluations
  std::string checkpoint_dir;  // per-generation snapshots when non-empty
  bool resume = false;         // continue from the latest snapshot

  // Throws ConfigError on non-positive populations or generations,
  // populations smaller than elite_count + 2, fractions outside [0,1],
  // tournament_size < 1, power < 1, rate outside (0,1], or workers < 1.
  void validate() const;
};

// One member of a population.  `eval.fitness` is -infinity until evaluated;
// failed evaluations keep that sentinel so selection simply ranks them last.
struct Individual {
  circuit::Genome genome;
  fitness::Evaluation eval;
  bool evaluated = false;

  double fitness() const {
    return evaluated ? eval.fitness
                     : -std::numeric_limits<double>::infinity();
  }
};

// Scores one genome.  Implementations must not throw; failures are reported
// as failed Evaluations (run_stage_ga additionally converts any escaped
// exception into one, so a stage never aborts mid-population).
using GenomeEvaluator = std::function<fitness::Evaluation(const circuit::Genome&)>;

// Best-of-round trace entry.  `evaluator_calls` counts genome evaluations
// cumulatively from the start of the run.
struct GenerationRecord {
  int stage = 0;
  int generation = 0;  // 1-based round within the stage
  double best_fitness = -std::numeric_limits<double>::infinity();
  double mean_fitness = -std::numeric_limits<double>::infinity();
  circuit::Genome best_genome;
  std::int64_t evaluator_calls = 0;
};

struct StageSpec {
  int index = 1;        // stage label; also keys the RNG streams
  int generations = 1;  // evaluation-round budget, initial round included
};

struct StageOutcome {
  std::vector<Individual> population;     // fitness non-increasing
  std::vector<GenerationRecord> history;  // one record per completed round
  std::int64_t evaluator_calls = 0;       // cumulative, includes calls_before
};

// Uniformly random in-bounds population; genome i draws from the
// (stage, generation 1, slot i, Sampling) stream.
std::vector<Individual> random_population(const circuit::GenomeLayout& layout,
                                          int count, std::uint64_t master_seed,
                                          int stage_index);

// Best of k individuals drawn without replacement (ties break toward the
// lower index).  Throws ConfigError when the population is empty or k is not
// in [1, population size].
int tournament_select(const std::vector<Individual>& population, int k,
                      std::mt19937_64& rng);

// Recombines the combined gene vector (integer genes first, then reals);
// every child gene comes verbatim from one parent, so bounds are preserved.
// Throws ConfigError when the parents' gene counts differ.
circuit::Genome crossover(const circuit::Genome& a, const circuit::Genome& b,
                          CrossoverKind kind, std::mt19937_64& rng);

// Perturbs every gene: with u ~ U(0,1), s = u^power and t the gene's
// normalized position in [lo, hi], the gene moves to x - s*(x - lo) when
// t < r ~ U(0,1) and to x + s*(hi - x) otherwise.  Integer genes perturb the
// real relaxation, then round (exact halves toward lo) and clamp.
circuit::Genome mutate_power(const circuit::Genome& g,
                             const circuit::GenomeLayout& layout, double power,
                             std::mt19937_64& rng);

// Same perturbation law, but each gene mutates only with probability `rate`.
circuit::Genome mutate_power_selection(const circuit::Genome& g,
                                       const circuit::GenomeLayout& layout,
                                       double power, double rate,
                                       std::mt19937_64& rng);

// Called after every completed round with the sorted population, the stage
// history so far, and the cumulative evaluator-call count.
using RoundHook = std::function<void(const std::vector<Individual>&,
                                     const std::vector<GenerationRecord>&,
                                     std::int64_t)>;

// Mid-stage restart state: the rounds already completed and their records
// (needed so the stall window spans a checkpoint boundary unchanged).
struct StageResume {
  int completed_rounds = 0;
  std::vector<GenerationRecord> history;
};

// Runs one GA stage: evaluate, record, then breed the next round from elites,
// crossover children, and mutated children until the round budget or the
// stall rule (best fitness gaining no more than stall_tol, relative, over
// stall_generations rounds) stops it.  Round 1 re-evaluates every individual
// (stages score at different truncations); later rounds evaluate only fresh
// children, so elites keep their cached Evaluation.  Reproduction draws only
// from streams keyed by (stage, round, slot), so results are identical for
// any worker count, and a resumed stage replays an uninterrupted one.
// Returns the full stage history (resumed rounds included).
StageOutcome run_stage_ga(std::vector<Individual> population,
                          const circuit::GenomeLayout& layout,
                          const StageSpec& stage, const GaConfig& config,
                          const GenomeEvaluator& evaluate,
                          std::int64_t calls_before = 0,
                          StageResume resume = {},
                          const RoundHook& on_round = {});

}  // namespace herald::search
