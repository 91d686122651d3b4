#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <vector>

#include "herald/errors.hpp"
#include "herald/search/ga.hpp"
#include "herald/search/rng.hpp"
#include "herald/search/three_stage.hpp"

using namespace herald;
using namespace herald::search;

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool in_bounds(const circuit::Genome& g, const circuit::GenomeLayout& layout) {
  if (static_cast<int>(g.int_genes.size()) != layout.n_int) return false;
  if (static_cast<int>(g.real_genes.size()) != layout.n_real) return false;
  for (int i = 0; i < layout.n_int; ++i) {
    if (g.int_genes[i] < 0 || g.int_genes[i] >= layout.int_bounds[i]) {
      return false;
    }
  }
  for (double x : g.real_genes) {
    if (!(x >= 0.0 && x <= 1.0)) return false;
  }
  return true;
}

circuit::GenomeLayout tool1_layout() {
  return circuit::genome_layout(toolbox::ToolboxSpec::tool1(), 2, 2);
}

// Cheap deterministic landscape for GA-mechanics tests: peaked at
// real genes = 0.37 and at integer genes = 0.
fitness::Evaluation synthetic_eval(const circuit::Genome& g) {
  double f = 0.0;
  for (double x : g.real_genes) f -= (x - 0.37) * (x - 0.37);
  for (int v : g.int_genes) f -= 0.01 * v;
  fitness::Evaluation e;
  e.fitness = f;
  e.objective = f;
  e.failed = false;
  e.truncation = 1;
  return e;
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic Q_KS form).  The
// distributions carry an atom (tiny steps round back to the start value), so
// tied blocks must be consumed on both sides before measuring the gap.
double ks_p_value(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] == v) ++ia;
    while (ib < b.size() && b[ib] == v) ++ib;
    d = std::max(d, std::abs(ia / na - ib / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    p += sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    sign = -sign;
  }
  return std::clamp(p, 0.0, 1.0);
}

std::vector<Individual> population_from(const std::vector<double>& fitnesses) {
  std::vector<Individual> pop;
  for (double f : fitnesses) {
    Individual ind;
    ind.eval.fitness = f;
    ind.eval.failed = false;
    ind.evaluated = true;
    pop.push_back(ind);
  }
  return pop;
}

GaConfig mini_config() {
  GaConfig cfg;
  cfg.stage1_population = 24;
  cfg.stage2_population = 12;
  cfg.stage3_population = 6;
  cfg.stage1_generations = 1;
  cfg.stage2_generations = 4;
  cfg.stage3_generations = 3;
  cfg.stage1_truncation = 16;
  cfg.stage2_truncation = 24;
  cfg.stage3_adaptive.t_start = 24;
  cfg.stage3_adaptive.t_step = 8;
  cfg.stage3_adaptive.t_max = 64;
  cfg.stage3_adaptive.rel_tol = 1e-2;
  cfg.tournament_size = 4;
  cfg.elite_count = 2;
  cfg.power = 10.0;
  cfg.seed = 20260814;
  return cfg;
}

SearchProblem mini_problem() {
  SearchProblem p;
  p.toolbox = toolbox::ToolboxSpec::tool1();
  p.n_modes = 2;
  p.m_ops = 2;
  p.fitness.kind = fitness::FitnessKind::PureQfiScaled;
  p.fitness.nbar_cap = 2.0;
  // Strongly squeezed candidates only push leakage below the production
  // default near cutoff 170; these mechanics tests stay small instead.
  p.sim.leak_threshold = 1e-3;
  return p;
}

bool reports_equal(const RunReport& a, const RunReport& b) {
  if (!same_bits(a.best_fitness, b.best_fitness)) return false;
  if (!(a.best_genome == b.best_genome)) return false;
  if (a.evaluator_calls != b.evaluator_calls) return false;
  if (a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const auto& ra = a.trace[i];
    const auto& rb = b.trace[i];
    if (ra.stage != rb.stage || ra.generation != rb.generation) return false;
    if (!same_bits(ra.best_fitness, rb.best_fitness)) return false;
    if (!same_bits(ra.mean_fitness, rb.mean_fitness)) return false;
    if (!(ra.best_genome == rb.best_genome)) return false;
    if (ra.evaluator_calls != rb.evaluator_calls) return false;
  }
  if (a.number_distribution.size() != b.number_distribution.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.number_distribution.size(); ++i) {
    if (!same_bits(a.number_distribution[i], b.number_distribution[i])) {
      return false;
    }
  }
  if (!same_bits(a.best_eval.fitness, b.best_eval.fitness)) return false;
  if (!same_bits(a.best_eval.objective, b.best_eval.objective)) return false;
  if (a.best_eval.failed != b.best_eval.failed) return false;
  if (a.best_eval.note != b.best_eval.note) return false;
  if (a.best_eval.truncation != b.best_eval.truncation) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

TEST_CASE("stream seeds separate by every coordinate") {
  const std::uint64_t base = stream_seed(7, 1, 1, 0, Stream::Sampling);
  CHECK(stream_seed(7, 1, 1, 0, Stream::Sampling) == base);  // pure function
  std::set<std::uint64_t> seen;
  for (int stage = 1; stage <= 3; ++stage) {
    for (int gen = 1; gen <= 4; ++gen) {
      for (int slot = 0; slot < 4; ++slot) {
        for (auto purpose : {Stream::Sampling, Stream::Tournament,
                             Stream::Crossover, Stream::Mutation}) {
          seen.insert(stream_seed(7, stage, gen, slot, purpose));
        }
      }
    }
  }
  CHECK(seen.size() == 3u * 4u * 4u * 4u);
  CHECK(stream_seed(8, 1, 1, 0, Stream::Sampling) != base);
}

// ---------------------------------------------------------------------------
// Random populations
// ---------------------------------------------------------------------------

TEST_CASE("random populations respect every gene bound") {
  const auto layout = tool1_layout();
  const auto pop = random_population(layout, 10000, 42, 1);
  REQUIRE(pop.size() == 10000);
  bool ok = true;
  bool any_unevaluated_fitness = true;
  for (const auto& ind : pop) {
    ok = ok && in_bounds(ind.genome, layout);
    any_unevaluated_fitness =
        any_unevaluated_fitness && !ind.evaluated &&
        std::isinf(ind.fitness()) && ind.fitness() < 0;
  }
  CHECK(ok);
  CHECK(any_unevaluated_fitness);

  // Distinct seeds give distinct samples; same seed repeats bitwise.
  const auto again = random_population(layout, 32, 42, 1);
  CHECK(again[7].genome == pop[7].genome);
  const auto other = random_population(layout, 32, 43, 1);
  bool all_same = true;
  for (int i = 0; i < 32; ++i) {
    all_same = all_same && other[i].genome == pop[i].genome;
  }
  CHECK_FALSE(all_same);
}

// ---------------------------------------------------------------------------
// Tournament selection
// ---------------------------------------------------------------------------

TEST_CASE("tournament over the whole population returns the global best") {
  const std::vector<double> fit = {0.3, -1.0, 2.5, 2.4, 0.0,
                                   1.7, -3.2, 2.2, 1.1, 0.9};
  const auto pop = population_from(fit);
  for (int trial = 0; trial < 100; ++trial) {
    auto rng = stream_rng(99, 1, 1, trial, Stream::Tournament);
    CHECK(tournament_select(pop, 10, rng) == 2);
  }
}

TEST_CASE("tournament of one is uniform") {
  const auto pop = population_from(std::vector<double>(10, 1.0));
  auto rng = stream_rng(4, 1, 1, 0, Stream::Tournament);
  std::vector<int> counts(10, 0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[tournament_select(pop, 1, rng)];
  double chi2 = 0.0;
  const double expected = n / 10.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 21.666);  // dof 9 at p = 0.01
}

TEST_CASE("tournament of eight matches the order statistics") {
  // Distinct fitnesses sorted descending: rank r wins iff it is drawn and no
  // better rank is, so P(r) = C(9 - r, 7) / C(10, 8) = {0.8, 8/45, 1/45, 0...}.
  std::vector<double> fit(10);
  for (int i = 0; i < 10; ++i) fit[i] = 10.0 - i;
  const auto pop = population_from(fit);
  auto rng = stream_rng(5, 1, 1, 0, Stream::Tournament);
  const int n = 50000;
  std::vector<int> counts(10, 0);
  for (int i = 0; i < n; ++i) ++counts[tournament_select(pop, 8, rng)];
  CHECK(std::abs(counts[0] / double(n) - 0.8) < 0.01);
  CHECK(std::abs(counts[1] / double(n) - 8.0 / 45.0) < 0.01);
  CHECK(std::abs(counts[2] / double(n) - 1.0 / 45.0) < 0.01);
  for (int r = 3; r < 10; ++r) CHECK(counts[r] == 0);  // without replacement
}

TEST_CASE("tournament rejects bad sizes") {
  const auto pop = population_from({1.0, 2.0});
  auto rng = stream_rng(1, 1, 1, 0, Stream::Tournament);
  CHECK_THROWS_AS(tournament_select({}, 1, rng), ConfigError);
  CHECK_THROWS_AS(tournament_select(pop, 0, rng), ConfigError);
  CHECK_THROWS_AS(tournament_select(pop, 3, rng), ConfigError);
}

// ---------------------------------------------------------------------------
// Crossover
// ---------------------------------------------------------------------------

namespace {

circuit::Genome parent_a() {
  return circuit::Genome{{0, 0, 0, 0, 0, 0, 0},
                         {0.0, 0.0, 0.0, 0.0, 0.0}};
}

circuit::Genome parent_b() {
  return circuit::Genome{{9, 8, 7, 6, 5, 4, 3},
                         {1.0, 0.9, 0.8, 0.7, 0.6}};
}

// Gene g of the combined vector (integers first, then reals) came from b?
bool gene_from_b(const circuit::Genome& child, int g) {
  if (g < 7) return child.int_genes[g] != 0;
  return child.real_genes[g - 7] != 0.0;
}

}  // namespace

TEST_CASE("crossover of identical parents is the identity") {
  const auto a = parent_a();
  for (auto kind : {CrossoverKind::Scattered, CrossoverKind::SinglePoint,
                    CrossoverKind::TwoPoint}) {
    auto rng = stream_rng(11, 1, 2, 0, Stream::Crossover);
    CHECK(crossover(a, a, kind, rng) == a);
  }
}

TEST_CASE("every scattered-crossover gene comes from a parent") {
  const auto a = parent_a();
  const auto b = parent_b();
  bool saw_a = false;
  bool saw_b = false;
  for (int trial = 0; trial < 200; ++trial) {
    auto rng = stream_rng(12, 1, 2, trial, Stream::Crossover);
    const auto child = crossover(a, b, CrossoverKind::Scattered, rng);
    for (int g = 0; g < 12; ++g) {
      const bool from_b = gene_from_b(child, g);
      if (g < 7) {
        CHECK((child.int_genes[g] == (from_b ? b.int_genes[g] : 0)));
      } else {
        CHECK((child.real_genes[g - 7] ==
               (from_b ? b.real_genes[g - 7] : 0.0)));
      }
      (from_b ? saw_b : saw_a) = true;
    }
  }
  CHECK(saw_a);
  CHECK(saw_b);
}

TEST_CASE("single-point crossover keeps a prefix of a and a suffix of b") {
  const auto a = parent_a();
  const auto b = parent_b();
  bool saw_copy_of_b = false;
  bool saw_copy_of_a = false;
  for (int trial = 0; trial < 300; ++trial) {
    auto rng = stream_rng(13, 1, 2, trial, Stream::Crossover);
    const auto child = crossover(a, b, CrossoverKind::SinglePoint, rng);
    int cut = 12;
    for (int g = 0; g < 12; ++g) {
      if (gene_from_b(child, g)) {
        cut = g;
        break;
      }
    }
    for (int g = 0; g < 12; ++g) CHECK(gene_from_b(child, g) == (g >= cut));
    if (cut == 0) saw_copy_of_b = true;   // cut 0 copies parent b whole
    if (cut == 12) saw_copy_of_a = true;  // cut L copies parent a whole
  }
  CHECK(saw_copy_of_b);
  CHECK(saw_copy_of_a);
}

TEST_CASE("two-point crossover takes one contiguous block from b") {
  const auto a = parent_a();
  const auto b = parent_b();
  for (int trial = 0; trial < 300; ++trial) {
    auto rng = stream_rng(14, 1, 2, trial, Stream::Crossover);
    const auto child = crossover(a, b, CrossoverKind::TwoPoint, rng);
    // The from-b mask must be 0..0 1..1 0..0 (possibly empty block).
    int flips = 0;
    for (int g = 1; g < 12; ++g) {
      if (gene_from_b(child, g) != gene_from_b(child, g - 1)) ++flips;
    }
    CHECK(flips <= 2);
    if (gene_from_b(child, 0)) CHECK(flips <= 1);  // block starts at gene 0
  }
}

TEST_CASE("crossover rejects mismatched parents") {
  auto a = parent_a();
  auto b = parent_b();
  b.int_genes.pop_back();
  auto rng = stream_rng(15, 1, 2, 0, Stream::Crossover);
  CHECK_THROWS_AS(crossover(a, b, CrossoverKind::Scattered, rng), ConfigError);
}

// ---------------------------------------------------------------------------
// Power mutation
// ---------------------------------------------------------------------------

TEST_CASE("mutation respects every gene bound") {
  const auto layout = tool1_layout();
  bool ok = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto g = circuit::random_genome(layout, 1000 + trial);
    auto rng = stream_rng(21, 2, 3, trial, Stream::Mutation);
    const auto m = (trial % 2 == 0)
                       ? mutate_power(g, layout, 3.0, rng)
                       : mutate_power_selection(g, layout, 3.0, 0.35, rng);
    ok = ok && in_bounds(m, layout);
  }
  CHECK(ok);
}

TEST_CASE("huge powers freeze the genome") {
  const auto layout = tool1_layout();
  // s = u^power: at power 1e6 every real step is below 1e-5 with overwhelming
  // probability, and integer genes cannot move at all after rounding.
  double max_real_step = 0.0;
  bool ints_frozen = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = circuit::random_genome(layout, 5000 + trial);
    auto rng = stream_rng(22, 2, 3, trial, Stream::Mutation);
    const auto m = mutate_power(g, layout, 1e6, rng);
    for (int i = 0; i < layout.n_real; ++i) {
      max_real_step =
          std::max(max_real_step, std::abs(m.real_genes[i] - g.real_genes[i]));
    }
    for (int i = 0; i < layout.n_int; ++i) {
      ints_frozen = ints_frozen && m.int_genes[i] == g.int_genes[i];
    }
  }
  CHECK(max_real_step <= 1e-5);
  CHECK(ints_frozen);

  // power = 1e308 underflows the step to exactly zero: a bitwise no-op.
  const auto g = circuit::random_genome(layout, 77);
  auto rng = stream_rng(23, 2, 3, 0, Stream::Mutation);
  CHECK(mutate_power(g, layout, 1e308, rng) == g);
}

TEST_CASE("selection at rate one matches plain power mutation") {
  // Same one-gene distribution under a two-sample KS test.
  circuit::GenomeLayout layout;
  layout.n_int = 0;
  layout.n_real = 1;
  circuit::Genome g{{}, {0.3}};
  const int n = 4000;
  std::vector<double> plain;
  std::vector<double> gated;
  for (int i = 0; i < n; ++i) {
    auto r1 = stream_rng(31, 1, 1, i, Stream::Mutation);
    auto r2 = stream_rng(32, 1, 1, i, Stream::Mutation);
    plain.push_back(mutate_power(g, layout, 10.0, r1).real_genes[0]);
    gated.push_back(
        mutate_power_selection(g, layout, 10.0, 1.0, r2).real_genes[0]);
  }
  CHECK(ks_p_value(plain, gated) > 0.01);

  // And a rate near zero rarely changes the gene.
  int changed = 0;
  for (int i = 0; i < n; ++i) {
    auto rng = stream_rng(33, 1, 1, i, Stream::Mutation);
    if (mutate_power_selection(g, layout, 10.0, 0.02, rng).real_genes[0] !=
        0.3) {
      ++changed;
    }
  }
  CHECK(changed < n / 10);
}

TEST_CASE("long alternating operator chains never leave the gene box") {
  const auto layout = tool1_layout();
  auto a = circuit::random_genome(layout, 1);
  auto b = circuit::random_genome(layout, 2);
  bool ok = true;
  for (int step = 0; step < 100000; ++step) {
    auto rng = stream_rng(41, 1, 1, step, Stream::Mutation);
    switch (step % 4) {
      case 0:
        a = crossover(a, b, CrossoverKind::Scattered, rng);
        break;
      case 1:
        b = mutate_power(b, layout, 2.0, rng);
        break;
      case 2:
        b = crossover(b, a, CrossoverKind::TwoPoint, rng);
        break;
      default:
        a = mutate_power_selection(a, layout, 1.5, 0.6, rng);
        break;
    }
    ok = ok && in_bounds(a, layout) && in_bounds(b, layout);
  }
  CHECK(ok);
}

// ---------------------------------------------------------------------------
// Config validation
// ---------------------------------------------------------------------------

TEST_CASE("config validation rejects out-of-range settings") {
  CHECK_NOTHROW(GaConfig{}.validate());
  auto expect_throw = [](auto&& tweak) {
    GaConfig cfg = mini_config();
    tweak(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  expect_throw([](GaConfig& c) { c.stage3_population = c.elite_count + 1; });
  expect_throw([](GaConfig& c) { c.stage2_population = c.stage1_population + 1; });
  expect_throw([](GaConfig& c) { c.stage2_generations = 0; });
  expect_throw([](GaConfig& c) { c.crossover_fraction = 1.5; });
  expect_throw([](GaConfig& c) { c.crossover_fraction = -0.1; });
  expect_throw([](GaConfig& c) { c.tournament_size = 0; });
  expect_throw([](GaConfig& c) { c.power = 0.5; });
  expect_throw([](GaConfig& c) { c.rate = 0.0; });
  expect_throw([](GaConfig& c) { c.rate = 1.5; });
  expect_throw([](GaConfig& c) { c.workers = 0; });
  expect_throw([](GaConfig& c) { c.stage1_truncation = 0; });
}

// ---------------------------------------------------------------------------
// Stage GA
// ---------------------------------------------------------------------------

TEST_CASE("elitism makes the stage best monotone") {
  const auto layout = tool1_layout();
  GaConfig cfg = mini_config();
  cfg.seed = 7;
  auto pop = random_population(layout, 30, cfg.seed, 2);
  const auto out = run_stage_ga(std::move(pop), layout, {2, 15}, cfg,
                                synthetic_eval);
  REQUIRE(!out.history.empty());
  for (std::size_t i = 1; i < out.history.size(); ++i) {
    CHECK(out.history[i].best_fitness >= out.history[i - 1].best_fitness);
  }
  // Output is sorted, fitness non-increasing.
  for (std::size_t i = 1; i < out.population.size(); ++i) {
    CHECK(out.population[i - 1].fitness() >= out.population[i].fitness());
  }
  // The search actually moved somewhere better than the initial sample.
  CHECK(out.history.back().best_fitness > out.history.front().best_fitness);
}

TEST_CASE("without crossover and with frozen mutation the population closes") {
  const auto layout = tool1_layout();
  GaConfig cfg = mini_config();
  cfg.seed = 8;
  cfg.crossover_fraction = 0.0;
  cfg.power = 1e308;  // bitwise no-op mutation
  cfg.elite_count = 3;
  const auto initial = random_population(layout, 12, cfg.seed, 2);
  std::set<std::vector<double>> initial_reals;
  for (const auto& ind : initial) initial_reals.insert(ind.genome.real_genes);

  const auto out =
      run_stage_ga(initial, layout, {2, 12}, cfg, synthetic_eval);
  std::set<std::vector<double>> final_reals;
  for (const auto& ind : out.population) {
    // Every survivor is a verbatim copy of an initial individual.
    CHECK(initial_reals.count(ind.genome.real_genes) == 1);
    final_reals.insert(ind.genome.real_genes);
  }
  CHECK(final_reals.size() <= initial_reals.size());
  // The best individual is exactly the best of the initial sample.
  double best_initial = -std::numeric_limits<double>::infinity();
  for (const auto& ind : initial) {
    best_initial = std::max(best_initial, synthetic_eval(ind.genome).fitness);
  }
  CHECK(out.history.back().best_fitness == best_initial);
}

TEST_CASE("stall rule stops a flat stage early") {
  const auto layout = tool1_layout();
  GaConfig cfg = mini_config();
  cfg.seed = 9;
  cfg.crossover_fraction = 0.0;
  cfg.power = 1e308;  // nothing can ever improve
  cfg.stall_generations = 3;
  const auto out = run_stage_ga(random_population(layout, 10, cfg.seed, 2),
                                layout, {2, 50}, cfg, synthetic_eval);
  CHECK(out.history.size() == 4);  // round 1 plus the three stalled rounds
}

TEST_CASE("failing evaluators leave sentinels instead of aborting") {
  const auto layout = tool1_layout();
  GaConfig cfg = mini_config();
  cfg.seed = 10;
  int calls = 0;
  auto flaky = [&calls](const circuit::Genome& g) -> fitness::Evaluation {
    if (++calls % 3 == 0) throw std::runtime_error("synthetic failure");
    return synthetic_eval(g);
  };
  const auto out = run_stage_ga(random_population(layout, 9, cfg.seed, 2),
                                layout, {2, 3}, cfg, flaky);
  REQUIRE(out.population.size() == 9);
  int failed = 0;
  for (const auto& ind : out.population) {
    REQUIRE(ind.evaluated);
    if (ind.eval.failed) {
      ++failed;
      CHECK(ind.eval.note == "synthetic failure");
      CHECK(std::isinf(ind.fitness()));
    }
  }
  CHECK(failed > 0);
  // Failures sort to the back.
  for (std::size_t i = 1; i < out.population.size(); ++i) {
    CHECK(!(out.population[i - 1].eval.failed &&
            !out.population[i].eval.failed));
  }
}

TEST_CASE("stage results are identical for one and four workers") {
  const auto layout = tool1_layout();
  const SearchProblem problem = mini_problem();
  GaConfig cfg = mini_config();
  cfg.seed = 11;
  const auto evaluate = make_stage_evaluator(problem, cfg, 1);

  StageOutcome runs[2];
  for (int w = 0; w < 2; ++w) {
    GaConfig c = cfg;
    c.workers = w == 0 ? 1 : 4;
    runs[w] = run_stage_ga(random_population(layout, 16, c.seed, 1), layout,
                           {1, 3}, c, evaluate);
  }
  REQUIRE(runs[0].history.size() == runs[1].history.size());
  for (std::size_t i = 0; i < runs[0].history.size(); ++i) {
    CHECK(same_bits(runs[0].history[i].best_fitness,
                    runs[1].history[i].best_fitness));
    CHECK(same_bits(runs[0].history[i].mean_fitness,
                    runs[1].history[i].mean_fitness));
    CHECK(runs[0].history[i].best_genome == runs[1].history[i].best_genome);
  }
  REQUIRE(runs[0].population.size() == runs[1].population.size());
  for (std::size_t i = 0; i < runs[0].population.size(); ++i) {
    CHECK(runs[0].population[i].genome == runs[1].population[i].genome);
    CHECK(same_bits(runs[0].population[i].fitness(),
                    runs[1].population[i].fitness()));
  }
}

// ---------------------------------------------------------------------------
// Degenerate toolbox: integer genes cannot matter
// ---------------------------------------------------------------------------

TEST_CASE("single-choice toolbox makes fitness independent of integer genes") {
  toolbox::ToolboxSpec tb;
  tb.states = {toolbox::StateKind::SqueezedVac};
  tb.ops = {toolbox::OpKind::Identity};
  tb.measurements = {toolbox::MeasKind::Pnrd};
  tb.bounds.pnrd_max = 0;  // the only herald outcome is n = 0

  SearchProblem problem;
  problem.toolbox = tb;
  problem.n_modes = 2;
  problem.m_ops = 2;
  problem.fitness.kind = fitness::FitnessKind::PureQfiScaled;
  problem.fitness.nbar_cap = 10.0;

  GaConfig cfg = mini_config();
  const auto layout = circuit::genome_layout(tb, 2, 2);
  const auto evaluate = make_stage_evaluator(problem, cfg, 2);

  auto base = circuit::random_genome(layout, 123);
  for (int i = 0; i < layout.n_real; ++i) {
    base.real_genes[i] = 0.35 + 0.04 * i;
  }
  const auto reference = evaluate(base);
  REQUIRE(!reference.failed);
  for (int trial = 0; trial < 40; ++trial) {
    auto variant = base;
    auto rng = stream_rng(51, 1, 1, trial, Stream::Sampling);
    for (int i = 0; i < layout.n_int; ++i) {
      variant.int_genes[i] =
          static_cast<int>(rng() % static_cast<std::uint64_t>(
                                       layout.int_bounds[i]));
    }
    const auto eval = evaluate(variant);
    REQUIRE(!eval.failed);
    CHECK(eval.fitness ==
          doctest::Approx(reference.fitness).epsilon(1e-10));
    CHECK(eval.herald_probability ==
          doctest::Approx(reference.herald_probability).epsilon(1e-10));
  }
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

TEST_CASE("checkpoints round-trip losslessly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "herald_cp_roundtrip";
  fs::remove_all(dir);

  Checkpoint cp;
  cp.seed = 0xdeadbeefcafe1234ull;
  cp.stage = 2;
  cp.generation = 3;
  cp.evaluator_calls = 4567;
  GenerationRecord rec;
  rec.stage = 2;
  rec.generation = 3;
  rec.best_fitness = 259.43781234567891;
  rec.mean_fitness = -std::numeric_limits<double>::infinity();
  rec.best_genome = circuit::Genome{{1, 2, 3}, {0.1234567890123456, 1.0}};
  rec.evaluator_calls = 4567;
  cp.trace.push_back(rec);

  Individual good;
  good.genome = rec.best_genome;
  good.eval.fitness = 1.5;
  good.eval.objective = 1.5;
  good.eval.failed = false;
  good.eval.herald_probability = 0.0119671;
  good.eval.nbar = 0.273453;
  good.eval.truncation = 170;
  fitness::BmseResult b;
  b.bmse = 5.564824605936e-3;
  b.prior_variance = 5.7115766210e-3;
  b.grid_nodes = 123;
  b.monte_carlo = true;
  b.mc_stderr = 3e-6;
  b.outcomes_kept = 100000;
  b.phase_correction = 1.4463289925;
  good.eval.bmse = b;
  good.evaluated = true;
  Individual bad;
  bad.genome = circuit::Genome{{0, 0, 0}, {0.5, 0.5}};
  bad.eval.note = "herald impossible";
  bad.evaluated = true;
  cp.population = {good, bad};

  save_checkpoint(dir.string(), cp);
  const auto loaded = load_latest_checkpoint(dir.string());
  REQUIRE(loaded.has_value());
  CHECK(loaded->seed == cp.seed);
  CHECK(loaded->stage == 2);
  CHECK(loaded->generation == 3);
  CHECK(loaded->evaluator_calls == 4567);
  REQUIRE(loaded->trace.size() == 1);
  CHECK(same_bits(loaded->trace[0].best_fitness, rec.best_fitness));
  CHECK(same_bits(loaded->trace[0].mean_fitness, rec.mean_fitness));
  CHECK(loaded->trace[0].best_genome == rec.best_genome);
  REQUIRE(loaded->population.size() == 2);
  CHECK(loaded->population[0].genome == good.genome);
  CHECK(same_bits(loaded->population[0].eval.fitness, 1.5));
  REQUIRE(loaded->population[0].eval.bmse.has_value());
  CHECK(same_bits(loaded->population[0].eval.bmse->bmse, b.bmse));
  CHECK(loaded->population[0].eval.bmse->outcomes_kept == 100000);
  CHECK(loaded->population[1].eval.failed);
  CHECK(std::isinf(loaded->population[1].eval.fitness));
  CHECK(loaded->population[1].eval.note == "herald impossible");

  // A later generation wins the "latest" scan.
  cp.generation = 4;
  cp.evaluator_calls = 5000;
  save_checkpoint(dir.string(), cp);
  cp.stage = 1;
  cp.generation = 9;
  save_checkpoint(dir.string(), cp);  // earlier stage, must not win
  const auto latest = load_latest_checkpoint(dir.string());
  REQUIRE(latest.has_value());
  CHECK(latest->stage == 2);
  CHECK(latest->generation == 4);

  CHECK(!load_latest_checkpoint((dir / "missing").string()).has_value());
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Three-stage pipeline
// ---------------------------------------------------------------------------

TEST_CASE("the three-stage run refines the random sample") {
  const SearchProblem problem = mini_problem();
  const GaConfig cfg = mini_config();
  const RunReport report = run_three_stage(problem, cfg);

  // Trace covers the three stages in order with 1-based round numbering.
  REQUIRE(!report.trace.empty());
  int prev_stage = 0;
  std::map<int, int> rounds;
  for (const auto& rec : report.trace) {
    CHECK(rec.stage >= prev_stage);
    prev_stage = rec.stage;
    CHECK(rec.generation == ++rounds[rec.stage]);
  }
  REQUIRE(rounds.count(1) == 1);
  REQUIRE(rounds.count(2) == 1);
  REQUIRE(rounds.count(3) == 1);
  CHECK(rounds[1] == 1);

  // Evaluation-count accounting: each stage pays population once, then
  // population - elite per extra round; the trace must match exactly.
  const int pops[3] = {cfg.stage1_population, cfg.stage2_population,
                       cfg.stage3_population};
  std::int64_t expected = 0;
  for (int s = 1; s <= 3; ++s) {
    const int pop = pops[s - 1];
    const int extra = pop - std::min(cfg.elite_count, pop);
    expected += pop + static_cast<std::int64_t>(rounds[s] - 1) * extra;
  }
  CHECK(report.evaluator_calls == expected);
  CHECK(report.trace.back().evaluator_calls == expected);

  // The polished best must beat (or match) the coarse random screen.
  const double stage1_best = report.trace.front().best_fitness;
  CHECK(report.best_fitness >= stage1_best);
  CHECK(!report.best_eval.failed);
  CHECK(report.best_fitness == doctest::Approx(report.best_eval.fitness));

  // The report carries a usable plan and a normalized photon distribution.
  CHECK(report.best_plan.n_modes == 2);
  REQUIRE(!report.number_distribution.empty());
  double mass = 0.0;
  for (double p : report.number_distribution) {
    CHECK(p >= -1e-12);
    mass += p;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

  // Best-of-run data is consistent with the final trace record.
  CHECK(same_bits(report.trace.back().best_fitness, report.best_fitness));
  CHECK(report.trace.back().best_genome == report.best_genome);
}

TEST_CASE("three-stage reports are identical for one and three workers") {
  const SearchProblem problem = mini_problem();
  GaConfig cfg = mini_config();
  cfg.stage1_population = 18;
  cfg.stage2_population = 10;
  cfg.stage3_population = 5;
  cfg.stage2_generations = 3;
  cfg.stage3_generations = 2;
  cfg.elite_count = 2;
  cfg.seed = 31;

  GaConfig parallel = cfg;
  parallel.workers = 3;
  const RunReport a = run_three_stage(problem, cfg);
  const RunReport b = run_three_stage(problem, parallel);
  CHECK(reports_equal(a, b));
}

TEST_CASE("a resumed run finishes exactly like an uninterrupted one") {
  namespace fs = std::filesystem;
  const SearchProblem problem = mini_problem();
  GaConfig cfg = mini_config();
  cfg.stage1_population = 18;
  cfg.stage2_population = 10;
  cfg.stage3_population = 5;
  cfg.stage2_generations = 3;
  cfg.stage3_generations = 3;
  cfg.elite_count = 2;
  cfg.seed = 47;

  const RunReport straight = run_three_stage(problem, cfg);

  const fs::path dir = fs::temp_directory_path() / "herald_cp_resume";
  fs::remove_all(dir);
  GaConfig with_cp = cfg;
  with_cp.checkpoint_dir = dir.string();
  const RunReport logged = run_three_stage(problem, with_cp);
  CHECK(reports_equal(straight, logged));

  // Crash simulation: drop every snapshot past a chosen point, resume, and
  // demand the identical report.  One cut lands mid-stage, one at a stage
  // boundary.
  struct Cut {
    int stage;
    int generation;
  };
  for (const Cut cut : {Cut{2, 2}, Cut{2, 3}, Cut{3, 1}}) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      int s = 0;
      int g = 0;
      const std::string name = entry.path().filename().string();
      if (std::sscanf(name.c_str(), "checkpoint_s%d_g%d.json", &s, &g) == 2) {
        if (s > cut.stage || (s == cut.stage && g > cut.generation)) {
          fs::remove(entry.path());
        }
      }
    }
    GaConfig resumed = with_cp;
    resumed.resume = true;
    const RunReport replay = run_three_stage(problem, resumed);
    CHECK(reports_equal(straight, replay));
  }

  // Resuming under a different seed is refused.
  GaConfig wrong_seed = with_cp;
  wrong_seed.resume = true;
  wrong_seed.seed = 48;
  CHECK_THROWS_AS(run_three_stage(problem, wrong_seed), ConfigError);
  fs::remove_all(dir);
}
