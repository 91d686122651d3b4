#include "herald/search/ga.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <thread>

#include "herald/errors.hpp"

namespace herald::search {

namespace {

double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uindex(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;  // 64-bit modulo bias is negligible for any population
}

// -infinity sort key; NaN (which score() never emits) would rank last too.
double sort_key(const Individual& ind) {
  const double f = ind.fitness();
  return std::isnan(f) ? -std::numeric_limits<double>::infinity() : f;
}

void sort_by_fitness(std::vector<Individual>& population) {
  std::stable_sort(population.begin(), population.end(),
                   [](const Individual& a, const Individual& b) {
                     return sort_key(a) > sort_key(b);
                   });
}

// Evaluates the marked individuals in index order across `workers` threads;
// each result lands at its own index, so scheduling cannot reorder anything.
std::int64_t evaluate_population(std::vector<Individual>& population,
                                 const GenomeEvaluator& evaluate, int workers,
                                 bool force) {
  std::vector<int> todo;
  todo.reserve(population.size());
  for (int i = 0; i < static_cast<int>(population.size()); ++i) {
    if (force || !population[i].evaluated) todo.push_back(i);
  }
  auto work = [&](int idx) {
    Individual& ind = population[idx];
    try {
      ind.eval = evaluate(ind.genome);
    } catch (const std::exception& e) {
      ind.eval = fitness::Evaluation{};
      ind.eval.note = e.what();
    } catch (...) {
      ind.eval = fitness::Evaluation{};
      ind.eval.note = "evaluation failed";
    }
    ind.evaluated = true;
  };
  const int n = static_cast<int>(todo.size());
  const int n_threads = std::min(workers, n);
  if (n_threads <= 1) {
    for (int idx : todo) work(idx);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (int j = next.fetch_add(1); j < n; j = next.fetch_add(1)) {
          work(todo[j]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return n;
}

// Deep-Thakur power perturbation on one gene over [lo, hi].
double perturb(double x, double lo, double hi, double power,
               std::mt19937_64& rng) {
  if (!(hi > lo)) return lo;  // single-valued range: nothing to vary
  const double u = u01(rng);
  const double r = u01(rng);
  const double s = std::pow(u, power);
  const double t = (x - lo) / (hi - lo);
  return t < r ? x - s * (x - lo) : x + s * (hi - x);
}

int round_half_down(double v) {
  return static_cast<int>(std::ceil(v - 0.5));
}

void check_genome(const circuit::Genome& g, const circuit::GenomeLayout& layout) {
  if (static_cast<int>(g.int_genes.size()) != layout.n_int ||
      static_cast<int>(g.real_genes.size()) != layout.n_real) {
    throw ConfigError("genome does not match the layout's gene counts");
  }
}

std::vector<Individual> breed(const std::vector<Individual>& sorted,
                              const circuit::GenomeLayout& layout,
                              const StageSpec& stage, int round,
                              const GaConfig& config) {
  const int pop_size = static_cast<int>(sorted.size());
  const int n_elite = std::min(config.elite_count, pop_size);
  const int n_children = pop_size - n_elite;
  const int n_cross = std::clamp(
      static_cast<int>(std::llround(config.crossover_fraction * n_children)),
      0, n_children);
  const int k = std::min(config.tournament_size, pop_size);

  std::vector<Individual> next;
  next.reserve(pop_size);
  for (int i = 0; i < n_elite; ++i) next.push_back(sorted[i]);

  for (int slot = 0; slot < n_children; ++slot) {
    auto t_rng = stream_rng(config.seed, stage.index, round, slot,
                            Stream::Tournament);
    Individual child;
    if (slot < n_cross) {
      auto c_rng = stream_rng(config.seed, stage.index, round, slot,
                              Stream::Crossover);
      const int ia = tournament_select(sorted, k, t_rng);
      const int ib = tournament_select(sorted, k, t_rng);
      child.genome = crossover(sorted[ia].genome, sorted[ib].genome,
                               config.crossover, c_rng);
    } else {
      auto m_rng = stream_rng(config.seed, stage.index, round, slot,
                              Stream::Mutation);
      const int ia = tournament_select(sorted, k, t_rng);
      child.genome =
          config.mutation == MutationKind::PowerMutation
              ? mutate_power(sorted[ia].genome, layout, config.power, m_rng)
              : mutate_power_selection(sorted[ia].genome, layout, config.power,
                                       config.rate, m_rng);
    }
    next.push_back(std::move(child));
  }
  return next;
}

}  // namespace

void GaConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  const int pops[] = {stage1_population, stage2_population, stage3_population};
  for (int p : pops) {
    if (p < elite_count + 2) {
      fail("every stage population must be at least elite_count + 2");
    }
  }
  if (stage2_population > stage1_population ||
      stage3_population > stage2_population) {
    fail("stage populations must be non-increasing (each stage seeds the next)");
  }
  if (stage1_generations < 1 || stage2_generations < 1 ||
      stage3_generations < 1) {
    fail("every stage needs at least one generation");
  }
  if (stage1_truncation < 1 || stage2_truncation < 1) {
    fail("stage truncations must be positive");
  }
  if (!(crossover_fraction >= 0.0 && crossover_fraction <= 1.0)) {
    fail("crossover_fraction must lie in [0, 1]");
  }
  if (tournament_size < 1) fail("tournament_size must be at least 1");
  if (elite_count < 0) fail("elite_count must be non-negative");
  if (!(power >= 1.0)) fail("mutation power must be at least 1");
  if (!(rate > 0.0 && rate <= 1.0)) fail("mutation rate must lie in (0, 1]");
  if (stall_generations < 0) fail("stall_generations must be non-negative");
  if (!(stall_tol >= 0.0)) fail("stall_tol must be non-negative");
  if (workers < 1) fail("workers must be at least 1");
}

std::vector<Individual> random_population(const circuit::GenomeLayout& layout,
                                          int count, std::uint64_t master_seed,
                                          int stage_index) {
  if (count < 1) throw ConfigError("population size must be positive");
  std::vector<Individual> population;
  population.reserve(count);
  for (int i = 0; i < count; ++i) {
    Individual ind;
    ind.genome = circuit::random_genome(
        layout, stream_seed(master_seed, stage_index, 1, i, Stream::Sampling));
    population.push_back(std::move(ind));
  }
  return population;
}

int tournament_select(const std::vector<Individual>& population, int k,
                      std::mt19937_64& rng) {
  const int n = static_cast<int>(population.size());
  if (n == 0) throw ConfigError("tournament over an empty population");
  if (k < 1 || k > n) {
    throw ConfigError("tournament size must lie in [1, population size]");
  }
  std::vector<std::uint8_t> used(n, 0);
  int best = -1;
  for (int drawn = 0; drawn < k; ++drawn) {
    int idx;
    do {
      idx = static_cast<int>(uindex(rng, n));
    } while (used[idx]);
    used[idx] = 1;
    if (best < 0 || sort_key(population[idx]) > sort_key(population[best]) ||
        (sort_key(population[idx]) == sort_key(population[best]) &&
         idx < best)) {
      best = idx;
    }
  }
  return best;
}

circuit::Genome crossover(const circuit::Genome& a, const circuit::Genome& b,
                          CrossoverKind kind, std::mt19937_64& rng) {
  if (a.int_genes.size() != b.int_genes.size() ||
      a.real_genes.size() != b.real_genes.size()) {
    throw ConfigError("crossover parents have different gene counts");
  }
  const int ni = static_cast<int>(a.int_genes.size());
  const int nr = static_cast<int>(a.real_genes.size());
  const int total = ni + nr;

  // Gene g of the combined vector (integers first, then reals).
  auto pick = [&](circuit::Genome& child, int g, const circuit::Genome& from) {
    if (g < ni) {
      child.int_genes[g] = from.int_genes[g];
    } else {
      child.real_genes[g - ni] = from.real_genes[g - ni];
    }
  };

  circuit::Genome child = a;
  switch (kind) {
    case CrossoverKind::Scattered:
      for (int g = 0; g < total; ++g) {
        if (u01(rng) < 0.5) pick(child, g, b);
      }
      break;
    case CrossoverKind::SinglePoint: {
      const int cut = static_cast<int>(uindex(rng, total + 1));
      for (int g = cut; g < total; ++g) pick(child, g, b);
      break;
    }
    case CrossoverKind::TwoPoint: {
      int c1 = static_cast<int>(uindex(rng, total + 1));
      int c2 = static_cast<int>(uindex(rng, total + 1));
      if (c1 > c2) std::swap(c1, c2);
      for (int g = c1; g < c2; ++g) pick(child, g, b);
      break;
    }
  }
  return child;
}

circuit::Genome mutate_power(const circuit::Genome& g,
                             const circuit::GenomeLayout& layout, double power,
                             std::mt19937_64& rng) {
  check_genome(g, layout);
  circuit::Genome out = g;
  for (int i = 0; i < layout.n_int; ++i) {
    const double hi = static_cast<double>(layout.int_bounds[i] - 1);
    const double v = perturb(out.int_genes[i], 0.0, hi, power, rng);
    out.int_genes[i] =
        std::clamp(round_half_down(v), 0, layout.int_bounds[i] - 1);
  }
  for (int i = 0; i < layout.n_real; ++i) {
    out.real_genes[i] =
        std::clamp(perturb(out.real_genes[i], 0.0, 1.0, power, rng), 0.0, 1.0);
  }
  return out;
}

circuit::Genome mutate_power_selection(const circuit::Genome& g,
                                       const circuit::GenomeLayout& layout,
                                       double power, double rate,
                                       std::mt19937_64& rng) {
  check_genome(g, layout);
  circuit::Genome out = g;
  for (int i = 0; i < layout.n_int; ++i) {
    if (u01(rng) > rate) continue;
    const double hi = static_cast<double>(layout.int_bounds[i] - 1);
    const double v = perturb(out.int_genes[i], 0.0, hi, power, rng);
    out.int_genes[i] =
        std::clamp(round_half_down(v), 0, layout.int_bounds[i] - 1);
  }
  for (int i = 0; i < layout.n_real; ++i) {
    if (u01(rng) > rate) continue;
    out.real_genes[i] =
        std::clamp(perturb(out.real_genes[i], 0.0, 1.0, power, rng), 0.0, 1.0);
  }
  return out;
}

StageOutcome run_stage_ga(std::vector<Individual> population,
                          const circuit::GenomeLayout& layout,
                          const StageSpec& stage, const GaConfig& config,
                          const GenomeEvaluator& evaluate,
                          std::int64_t calls_before, StageResume resume,
                          const RoundHook& on_round) {
  config.validate();
  if (population.empty()) throw ConfigError("stage population is empty");
  if (stage.generations < 1) throw ConfigError("stage needs >= 1 generation");
  for (const Individual& ind : population) check_genome(ind.genome, layout);

  StageOutcome out;
  out.evaluator_calls = calls_before;
  out.history = std::move(resume.history);
  if (resume.completed_rounds > 0) sort_by_fitness(population);

  // Stall rule: the best gained no more than stall_tol (relative) over the
  // last stall_generations rounds.  Checked before breeding so a resumed
  // stage stops exactly where the uninterrupted run would have.
  auto stalled = [&]() {
    if (config.stall_generations <= 0) return false;
    if (static_cast<int>(out.history.size()) <= config.stall_generations) {
      return false;
    }
    const double now = out.history.back().best_fitness;
    const double then =
        out.history[out.history.size() - 1 - config.stall_generations]
            .best_fitness;
    const bool improved =
        (std::isinf(then) && then < 0)
            ? now > then  // leaving the failure sentinel is progress
            : now - then > config.stall_tol * std::max(1.0, std::abs(then));
    return !improved;
  };

  for (int round = resume.completed_rounds + 1; round <= stage.generations;
       ++round) {
    if (stalled()) break;
    if (round > 1) population = breed(population, layout, stage, round, config);
    out.evaluator_calls += evaluate_population(
        population, evaluate, config.workers, /*force=*/round == 1);
    sort_by_fitness(population);

    GenerationRecord rec;
    rec.stage = stage.index;
    rec.generation = round;
    rec.best_fitness = population.front().fitness();
    double sum = 0.0;
    for (const Individual& ind : population) sum += ind.fitness();
    rec.mean_fitness = sum / static_cast<double>(population.size());
    rec.best_genome = population.front().genome;
    rec.evaluator_calls = out.evaluator_calls;
    out.history.push_back(rec);
    if (on_round) on_round(population, out.history, out.evaluator_calls);
  }

  sort_by_fitness(population);
  out.population = std::move(population);
  return out;
}

}  // namespace herald::search
