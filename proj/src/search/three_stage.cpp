#include "herald/search/three_stage.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <utility>

#include <json.hpp>

#include "herald/errors.hpp"

namespace herald::search {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Doubles serialize as JSON numbers (nlohmann's dtoa round-trips exactly);
// the non-finite sentinels, which JSON cannot carry, become strings.
json dump_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double load_double(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ConfigError("checkpoint: unrecognized numeric sentinel '" + s + "'");
  }
  return j.get<double>();
}

json dump_genome(const circuit::Genome& g) {
  return json{{"int_genes", g.int_genes}, {"real_genes", g.real_genes}};
}

circuit::Genome load_genome(const json& j) {
  circuit::Genome g;
  g.int_genes = j.at("int_genes").get<std::vector<int>>();
  g.real_genes = j.at("real_genes").get<std::vector<double>>();
  return g;
}

json dump_eval(const fitness::Evaluation& e) {
  json j{{"fitness", dump_double(e.fitness)},
         {"objective", dump_double(e.objective)},
         {"failed", e.failed},
         {"note", e.note},
         {"herald_probability", dump_double(e.herald_probability)},
         {"nbar", dump_double(e.nbar)},
         {"truncation", e.truncation}};
  if (e.bmse) {
    // The posterior grid is never kept during a search, so scalars suffice.
    const fitness::BmseResult& b = *e.bmse;
    j["bmse"] = json{{"bmse", dump_double(b.bmse)},
                     {"prior_variance", dump_double(b.prior_variance)},
                     {"grid_nodes", b.grid_nodes},
                     {"monte_carlo", b.monte_carlo},
                     {"mc_stderr", dump_double(b.mc_stderr)},
                     {"outcomes_kept", b.outcomes_kept},
                     {"phase_correction", dump_double(b.phase_correction)},
                     {"saturation_defect", dump_double(b.saturation_defect)}};
  }
  return j;
}

fitness::Evaluation load_eval(const json& j) {
  fitness::Evaluation e;
  e.fitness = load_double(j.at("fitness"));
  e.objective = load_double(j.at("objective"));
  e.failed = j.at("failed").get<bool>();
  e.note = j.at("note").get<std::string>();
  e.herald_probability = load_double(j.at("herald_probability"));
  e.nbar = load_double(j.at("nbar"));
  e.truncation = j.at("truncation").get<int>();
  if (j.contains("bmse")) {
    const json& jb = j.at("bmse");
    fitness::BmseResult b;
    b.bmse = load_double(jb.at("bmse"));
    b.prior_variance = load_double(jb.at("prior_variance"));
    b.grid_nodes = jb.at("grid_nodes").get<int>();
    b.monte_carlo = jb.at("monte_carlo").get<bool>();
    b.mc_stderr = load_double(jb.at("mc_stderr"));
    b.outcomes_kept = jb.at("outcomes_kept").get<std::int64_t>();
    b.phase_correction = load_double(jb.at("phase_correction"));
    b.saturation_defect = load_double(jb.at("saturation_defect"));
    e.bmse = std::move(b);
  }
  return e;
}

json dump_individual(const Individual& ind) {
  return json{{"genome", dump_genome(ind.genome)},
              {"eval", dump_eval(ind.eval)},
              {"evaluated", ind.evaluated}};
}

Individual load_individual(const json& j) {
  Individual ind;
  ind.genome = load_genome(j.at("genome"));
  ind.eval = load_eval(j.at("eval"));
  ind.evaluated = j.at("evaluated").get<bool>();
  return ind;
}

json dump_record(const GenerationRecord& r) {
  return json{{"stage", r.stage},
              {"generation", r.generation},
              {"best_fitness", dump_double(r.best_fitness)},
              {"mean_fitness", dump_double(r.mean_fitness)},
              {"best_genome", dump_genome(r.best_genome)},
              {"evaluator_calls", r.evaluator_calls}};
}

GenerationRecord load_record(const json& j) {
  GenerationRecord r;
  r.stage = j.at("stage").get<int>();
  r.generation = j.at("generation").get<int>();
  r.best_fitness = load_double(j.at("best_fitness"));
  r.mean_fitness = load_double(j.at("mean_fitness"));
  r.best_genome = load_genome(j.at("best_genome"));
  r.evaluator_calls = j.at("evaluator_calls").get<std::int64_t>();
  return r;
}

std::string checkpoint_name(int stage, int generation) {
  return "checkpoint_s" + std::to_string(stage) + "_g" +
         std::to_string(generation) + ".json";
}

}  // namespace

void save_checkpoint(const std::string& dir, const Checkpoint& checkpoint) {
  json j;
  j["format_version"] = checkpoint.format_version;
  j["seed"] = checkpoint.seed;
  j["stage"] = checkpoint.stage;
  j["generation"] = checkpoint.generation;
  j["evaluator_calls"] = checkpoint.evaluator_calls;
  json trace = json::array();
  for (const auto& rec : checkpoint.trace) trace.push_back(dump_record(rec));
  j["trace"] = std::move(trace);
  json population = json::array();
  for (const auto& ind : checkpoint.population) {
    population.push_back(dump_individual(ind));
  }
  j["population"] = std::move(population);

  fs::create_directories(dir);
  const fs::path target =
      fs::path(dir) / checkpoint_name(checkpoint.stage, checkpoint.generation);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint " + tmp.string());
    out << j.dump();
    if (!out) throw ConfigError("short write on checkpoint " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::optional<Checkpoint> load_latest_checkpoint(const std::string& dir) {
  if (!fs::is_directory(dir)) return std::nullopt;
  int best_stage = -1;
  int best_gen = -1;
  fs::path best_path;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    int stage = 0;
    int gen = 0;
    if (std::sscanf(name.c_str(), "checkpoint_s%d_g%d.json", &stage, &gen) !=
            2 ||
        name != checkpoint_name(stage, gen)) {
      continue;
    }
    if (stage > best_stage || (stage == best_stage && gen > best_gen)) {
      best_stage = stage;
      best_gen = gen;
      best_path = entry.path();
    }
  }
  if (best_stage < 0) return std::nullopt;

  json j;
  try {
    std::ifstream in(best_path);
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("malformed checkpoint " + best_path.string() + ": " +
                      e.what());
  }
  try {
    Checkpoint cp;
    cp.format_version = j.at("format_version").get<int>();
    if (cp.format_version != 1) {
      throw ConfigError("unsupported checkpoint format_version");
    }
    cp.seed = j.at("seed").get<std::uint64_t>();
    cp.stage = j.at("stage").get<int>();
    cp.generation = j.at("generation").get<int>();
    cp.evaluator_calls = j.at("evaluator_calls").get<std::int64_t>();
    for (const auto& jr : j.at("trace")) cp.trace.push_back(load_record(jr));
    for (const auto& ji : j.at("population")) {
      cp.population.push_back(load_individual(ji));
    }
    return cp;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("malformed checkpoint " + best_path.string() + ": " +
                      e.what());
  }
}

GenomeEvaluator make_stage_evaluator(const SearchProblem& problem,
                                     const GaConfig& config, int stage_index) {
  auto evaluator =
      std::make_shared<fitness::Evaluator>(problem.fitness, problem.sim);
  auto layout = std::make_shared<circuit::GenomeLayout>(
      circuit::genome_layout(problem.toolbox, problem.n_modes, problem.m_ops));
  auto guarded = [](auto&& body) -> fitness::Evaluation {
    try {
      return body();
    } catch (const std::exception& e) {
      fitness::Evaluation failed;
      failed.note = e.what();
      return failed;
    }
  };
  if (stage_index == 1 || stage_index == 2) {
    const fock::Truncation t{stage_index == 1 ? config.stage1_truncation
                                              : config.stage2_truncation};
    return [evaluator, layout, t, guarded](const circuit::Genome& g) {
      return guarded([&] {
        return evaluator->evaluate(circuit::decode(*layout, g), t);
      });
    };
  }
  const circuit::AdaptiveOptions adaptive = config.stage3_adaptive;
  return [evaluator, layout, adaptive, guarded](const circuit::Genome& g) {
    return guarded([&] {
      return evaluator->evaluate_adaptive(circuit::decode(*layout, g),
                                          adaptive);
    });
  };
}

RunReport run_three_stage(const SearchProblem& problem,
                          const GaConfig& config) {
  config.validate();
  problem.fitness.validate();
  const circuit::GenomeLayout layout =
      circuit::genome_layout(problem.toolbox, problem.n_modes, problem.m_ops);

  const StageSpec stage_specs[3] = {{1, config.stage1_generations},
                                    {2, config.stage2_generations},
                                    {3, config.stage3_generations}};
  const int stage_pops[3] = {config.stage1_population,
                             config.stage2_population,
                             config.stage3_population};

  int first_stage = 1;
  StageResume resume;
  std::vector<Individual> population;
  std::vector<GenerationRecord> trace;
  std::int64_t calls = 0;

  if (config.resume && !config.checkpoint_dir.empty()) {
    if (auto cp = load_latest_checkpoint(config.checkpoint_dir)) {
      if (cp->seed != config.seed) {
        throw ConfigError(
            "checkpoint seed does not match the configured seed");
      }
      first_stage = cp->stage;
      calls = cp->evaluator_calls;
      population = std::move(cp->population);
      resume.completed_rounds = cp->generation;
      for (auto& rec : cp->trace) {
        if (rec.stage < cp->stage) {
          trace.push_back(std::move(rec));
        } else if (rec.stage == cp->stage) {
          resume.history.push_back(std::move(rec));
        }
      }
    }
  }

  for (int s = first_stage; s <= 3; ++s) {
    const bool fresh_entry = resume.completed_rounds == 0;
    if (fresh_entry) {
      if (s == 1) {
        population = random_population(layout, stage_pops[0], config.seed, 1);
      } else if (static_cast<int>(population.size()) > stage_pops[s - 1]) {
        // The previous stage left its population sorted; keep the best.
        population.resize(stage_pops[s - 1]);
      }
    }

    RoundHook hook;
    if (!config.checkpoint_dir.empty()) {
      const std::vector<GenerationRecord> trace_before = trace;
      const std::string dir = config.checkpoint_dir;
      const std::uint64_t seed = config.seed;
      hook = [trace_before, dir, seed, s](
                 const std::vector<Individual>& pop,
                 const std::vector<GenerationRecord>& stage_history,
                 std::int64_t cumulative_calls) {
        Checkpoint cp;
        cp.seed = seed;
        cp.stage = s;
        cp.generation = stage_history.back().generation;
        cp.evaluator_calls = cumulative_calls;
        cp.trace = trace_before;
        cp.trace.insert(cp.trace.end(), stage_history.begin(),
                        stage_history.end());
        cp.population = pop;
        save_checkpoint(dir, cp);
      };
    }

    StageOutcome out = run_stage_ga(
        std::move(population), layout, stage_specs[s - 1], config,
        make_stage_evaluator(problem, config, s), calls, std::move(resume),
        hook);
    population = std::move(out.population);
    calls = out.evaluator_calls;
    trace.insert(trace.end(), out.history.begin(), out.history.end());
    resume = StageResume{};
  }

  RunReport report;
  report.trace = std::move(trace);
  report.evaluator_calls = calls;
  const Individual& best = population.front();
  report.best_genome = best.genome;
  report.best_eval = best.eval;
  report.best_fitness = best.fitness();
  report.best_plan = circuit::decode(layout, best.genome);
  if (!best.eval.failed) {
    try {
      const circuit::SimulationResult sim = circuit::simulate_adaptive(
          report.best_plan, config.stage3_adaptive, problem.sim);
      const fock::RealVector d = sim.distribution();
      report.number_distribution.assign(d.data(), d.data() + d.size());
    } catch (const std::exception&) {
      // The evaluation already tells the story; the distribution is a bonus.
    }
  }
  return report;
}

}  // namespace herald::search
