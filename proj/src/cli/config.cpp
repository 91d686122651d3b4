#include "herald/cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "herald/errors.hpp"

namespace herald::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError("config " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) bad(where, "unknown key '" + item.key() + "'");
  }
}

template <class T>
void read(const json& obj, const std::string& where, const char* key,
          T& target) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(target);
  } catch (const std::exception& e) {
    bad(where, std::string("key '") + key + "': " + e.what());
  }
}

std::string kind_name(fitness::FitnessKind k) {
  switch (k) {
    case fitness::FitnessKind::PureQfiScaled: return "pure_qfi_scaled";
    case fitness::FitnessKind::MixedQfiScaled: return "mixed_qfi_scaled";
    case fitness::FitnessKind::BmseFixedPovm: return "bmse_fixed_povm";
    case fitness::FitnessKind::BmseSingleShotOptimal:
      return "bmse_single_shot_optimal";
  }
  throw std::logic_error("kind_name(FitnessKind)");
}

fitness::FitnessKind parse_fitness_kind(const std::string& s,
                                        const std::string& where) {
  for (auto k : {fitness::FitnessKind::PureQfiScaled,
                 fitness::FitnessKind::MixedQfiScaled,
                 fitness::FitnessKind::BmseFixedPovm,
                 fitness::FitnessKind::BmseSingleShotOptimal}) {
    if (kind_name(k) == s) return k;
  }
  bad(where, "unknown fitness kind '" + s + "'");
}

std::string kind_name(search::CrossoverKind k) {
  switch (k) {
    case search::CrossoverKind::Scattered: return "scattered";
    case search::CrossoverKind::SinglePoint: return "single_point";
    case search::CrossoverKind::TwoPoint: return "two_point";
  }
  throw std::logic_error("kind_name(CrossoverKind)");
}

search::CrossoverKind parse_crossover_kind(const std::string& s,
                                           const std::string& where) {
  for (auto k : {search::CrossoverKind::Scattered,
                 search::CrossoverKind::SinglePoint,
                 search::CrossoverKind::TwoPoint}) {
    if (kind_name(k) == s) return k;
  }
  bad(where, "unknown crossover kind '" + s + "'");
}

std::string kind_name(search::MutationKind k) {
  switch (k) {
    case search::MutationKind::PowerMutation: return "power_mutation";
    case search::MutationKind::PowerSelection: return "power_selection";
  }
  throw std::logic_error("kind_name(MutationKind)");
}

search::MutationKind parse_mutation_kind(const std::string& s,
                                         const std::string& where) {
  for (auto k : {search::MutationKind::PowerMutation,
                 search::MutationKind::PowerSelection}) {
    if (kind_name(k) == s) return k;
  }
  bad(where, "unknown mutation kind '" + s + "'");
}

toolbox::ToolboxSpec toolbox_preset(const std::string& name,
                                    const std::string& where) {
  if (name == "full") return toolbox::ToolboxSpec::full();
  if (name == "tool1") return toolbox::ToolboxSpec::tool1();
  if (name == "tool2") return toolbox::ToolboxSpec::tool2();
  if (name == "no_pnrd") return toolbox::ToolboxSpec::no_pnrd();
  if (name == "lossy") return toolbox::ToolboxSpec::lossy();
  bad(where, "unknown toolbox preset '" + name + "'");
}

void parse_toolbox(const json& sec, toolbox::ToolboxSpec& tb) {
  const std::string where = "toolbox";
  check_keys(sec, where, {"preset", "states", "ops", "measurements", "bounds"});
  if (sec.contains("preset")) {
    std::string preset;
    read(sec, where, "preset", preset);
    tb = toolbox_preset(preset, where);
  }
  auto read_kinds = [&](const char* key, auto parser, auto& out) {
    if (!sec.contains(key)) return;
    std::vector<std::string> names;
    read(sec, where, key, names);
    out.clear();
    for (const auto& n : names) {
      try {
        out.push_back(parser(n));
      } catch (const std::exception& e) {
        bad(where, e.what());
      }
    }
  };
  read_kinds("states", toolbox::parse_state_kind, tb.states);
  read_kinds("ops", toolbox::parse_op_kind, tb.ops);
  read_kinds("measurements", toolbox::parse_meas_kind, tb.measurements);
  if (sec.contains("bounds")) {
    const json& b = sec.at("bounds");
    const std::string bw = "toolbox.bounds";
    check_keys(b, bw,
               {"alpha_max", "zeta_state_max", "zeta_op_max", "fock_max",
                "pnrd_max", "multiplex_detectors", "multiplex_click_max",
                "homodyne_x_max", "homodyne_bin"});
    read(b, bw, "alpha_max", tb.bounds.alpha_max);
    read(b, bw, "zeta_state_max", tb.bounds.zeta_state_max);
    read(b, bw, "zeta_op_max", tb.bounds.zeta_op_max);
    read(b, bw, "fock_max", tb.bounds.fock_max);
    read(b, bw, "pnrd_max", tb.bounds.pnrd_max);
    read(b, bw, "multiplex_detectors", tb.bounds.multiplex_detectors);
    read(b, bw, "multiplex_click_max", tb.bounds.multiplex_click_max);
    read(b, bw, "homodyne_x_max", tb.bounds.homodyne_x_max);
    read(b, bw, "homodyne_bin", tb.bounds.homodyne_bin);
  }
}

void parse_fitness(const json& sec, fitness::FitnessSpec& f) {
  const std::string where = "fitness";
  check_keys(sec, where,
             {"kind", "mu", "prior_center", "prior_width", "nbar_cap",
              "nbar_floor", "bmse"});
  if (sec.contains("kind")) {
    std::string kind;
    read(sec, where, "kind", kind);
    f.kind = parse_fitness_kind(kind, where);
  }
  read(sec, where, "mu", f.mu);
  read(sec, where, "prior_center", f.prior.center);
  read(sec, where, "prior_width", f.prior.width);
  read(sec, where, "nbar_cap", f.nbar_cap);
  read(sec, where, "nbar_floor", f.nbar_floor);
  if (sec.contains("bmse")) {
    const json& b = sec.at("bmse");
    const std::string bw = "fitness.bmse";
    check_keys(b, bw,
               {"grid_nodes", "grid_tol", "outcome_tail", "enum_cap",
                "mc_sequences", "mc_seed", "optimize_phase", "fixed_phase",
                "eig_cutoff", "keep_grid"});
    read(b, bw, "grid_nodes", f.bmse.grid_nodes);
    read(b, bw, "grid_tol", f.bmse.grid_tol);
    read(b, bw, "outcome_tail", f.bmse.outcome_tail);
    read(b, bw, "enum_cap", f.bmse.enum_cap);
    read(b, bw, "mc_sequences", f.bmse.mc_sequences);
    read(b, bw, "mc_seed", f.bmse.mc_seed);
    read(b, bw, "optimize_phase", f.bmse.optimize_phase);
    read(b, bw, "fixed_phase", f.bmse.fixed_phase);
    read(b, bw, "eig_cutoff", f.bmse.eig_cutoff);
    read(b, bw, "keep_grid", f.bmse.keep_grid);
  }
}

void parse_search(const json& sec, search::GaConfig& g) {
  const std::string where = "search";
  check_keys(sec, where,
             {"stage1_population", "stage2_population", "stage3_population",
              "stage1_generations", "stage2_generations", "stage3_generations",
              "stage1_truncation", "stage2_truncation", "crossover",
              "crossover_fraction", "tournament_size", "elite_count",
              "mutation", "power", "rate", "stall_generations", "stall_tol",
              "workers"});
  read(sec, where, "stage1_population", g.stage1_population);
  read(sec, where, "stage2_population", g.stage2_population);
  read(sec, where, "stage3_population", g.stage3_population);
  read(sec, where, "stage1_generations", g.stage1_generations);
  read(sec, where, "stage2_generations", g.stage2_generations);
  read(sec, where, "stage3_generations", g.stage3_generations);
  read(sec, where, "stage1_truncation", g.stage1_truncation);
  read(sec, where, "stage2_truncation", g.stage2_truncation);
  if (sec.contains("crossover")) {
    std::string kind;
    read(sec, where, "crossover", kind);
    g.crossover = parse_crossover_kind(kind, where);
  }
  read(sec, where, "crossover_fraction", g.crossover_fraction);
  read(sec, where, "tournament_size", g.tournament_size);
  read(sec, where, "elite_count", g.elite_count);
  if (sec.contains("mutation")) {
    std::string kind;
    read(sec, where, "mutation", kind);
    g.mutation = parse_mutation_kind(kind, where);
  }
  read(sec, where, "power", g.power);
  read(sec, where, "rate", g.rate);
  read(sec, where, "stall_generations", g.stall_generations);
  read(sec, where, "stall_tol", g.stall_tol);
  read(sec, where, "workers", g.workers);
}

void parse_limits(const json& sec, RunConfig& cfg) {
  const std::string where = "limits";
  check_keys(sec, where,
             {"t_start", "t_step", "t_max", "rel_tol", "n_modes", "m_ops",
              "probability_floor", "leak_threshold"});
  read(sec, where, "t_start", cfg.search.stage3_adaptive.t_start);
  read(sec, where, "t_step", cfg.search.stage3_adaptive.t_step);
  read(sec, where, "t_max", cfg.search.stage3_adaptive.t_max);
  read(sec, where, "rel_tol", cfg.search.stage3_adaptive.rel_tol);
  read(sec, where, "n_modes", cfg.n_modes);
  read(sec, where, "m_ops", cfg.m_ops);
  read(sec, where, "probability_floor", cfg.sim.probability_floor);
  read(sec, where, "leak_threshold", cfg.sim.leak_threshold);
}

void parse_output(const json& sec, RunConfig& cfg) {
  const std::string where = "output";
  check_keys(sec, where, {"run_dir", "formats", "checkpoints", "resume"});
  read(sec, where, "run_dir", cfg.run_dir);
  if (sec.contains("formats")) {
    std::vector<std::string> formats;
    read(sec, where, "formats", formats);
    cfg.write_json = false;
    cfg.write_text = false;
    for (const auto& f : formats) {
      if (f == "json") {
        cfg.write_json = true;
      } else if (f == "text") {
        cfg.write_text = true;
      } else {
        bad(where, "unknown report format '" + f + "'");
      }
    }
  }
  read(sec, where, "checkpoints", cfg.checkpoints);
  read(sec, where, "resume", cfg.resume);
}

}  // namespace

void RunConfig::validate() const {
  try {
    fitness.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config fitness: ") + e.what());
  }
  search.validate();
  if (toolbox.states.empty() || toolbox.ops.empty() ||
      toolbox.measurements.empty()) {
    throw ConfigError("config toolbox: every category needs at least one kind");
  }
  if (n_modes < 2) throw ConfigError("config limits: n_modes must be >= 2");
  if (m_ops < 1) throw ConfigError("config limits: m_ops must be >= 1");
  const auto& loss = sim.loss;
  auto gamma_ok = [](double g) { return g >= 0.0 && g < 1.0; };
  if (!gamma_ok(loss.gamma_det) || !gamma_ok(loss.gamma_out)) {
    throw ConfigError("config loss: gammas must lie in [0, 1)");
  }
  const bool lossy = loss.gamma_det > 0.0 || loss.gamma_out > 0.0;
  if (lossy && fitness.kind != fitness::FitnessKind::MixedQfiScaled) {
    throw ConfigError(
        "config: loss produces mixed outputs; only mixed_qfi_scaled scores "
        "them (the pure and Bayesian figures require a lossless pipeline)");
  }
  if (!(sim.probability_floor > 0.0)) {
    throw ConfigError("config limits: probability_floor must be positive");
  }
  if (!(sim.leak_threshold > 0.0)) {
    throw ConfigError("config limits: leak_threshold must be positive");
  }
  const auto& ad = search.stage3_adaptive;
  if (ad.t_start < 1 || ad.t_step < 1 || ad.t_max < ad.t_start) {
    throw ConfigError("config limits: need 1 <= t_start <= t_max, t_step >= 1");
  }
  if (!(ad.rel_tol > 0.0)) {
    throw ConfigError("config limits: rel_tol must be positive");
  }
  if (run_dir.empty()) {
    throw ConfigError("config output: run_dir must not be empty");
  }
  if (!write_json && !write_text) {
    throw ConfigError("config output: at least one report format is needed");
  }
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_keys(j, "top level",
             {"seed", "toolbox", "loss", "fitness", "search", "limits",
              "output"});
  RunConfig cfg;
  read(j, "top level", "seed", cfg.seed);
  if (j.contains("toolbox")) parse_toolbox(j.at("toolbox"), cfg.toolbox);
  if (j.contains("loss")) {
    const json& sec = j.at("loss");
    check_keys(sec, "loss", {"gamma_det", "gamma_out"});
    read(sec, "loss", "gamma_det", cfg.sim.loss.gamma_det);
    read(sec, "loss", "gamma_out", cfg.sim.loss.gamma_out);
  }
  if (j.contains("fitness")) parse_fitness(j.at("fitness"), cfg.fitness);
  if (j.contains("search")) parse_search(j.at("search"), cfg.search);
  if (j.contains("limits")) parse_limits(j.at("limits"), cfg);
  if (j.contains("output")) parse_output(j.at("output"), cfg);
  // One source of truth for the homodyne bin: the toolbox bound.
  cfg.sim.homodyne_bin = cfg.toolbox.bounds.homodyne_bin;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

nlohmann::json effective_config(const RunConfig& cfg) {
  json tb;
  {
    std::vector<std::string> states;
    for (auto k : cfg.toolbox.states) states.push_back(toolbox::name(k));
    std::vector<std::string> ops;
    for (auto k : cfg.toolbox.ops) ops.push_back(toolbox::name(k));
    std::vector<std::string> meas;
    for (auto k : cfg.toolbox.measurements) meas.push_back(toolbox::name(k));
    const auto& b = cfg.toolbox.bounds;
    tb = json{{"states", states},
              {"ops", ops},
              {"measurements", meas},
              {"bounds",
               json{{"alpha_max", b.alpha_max},
                    {"zeta_state_max", b.zeta_state_max},
                    {"zeta_op_max", b.zeta_op_max},
                    {"fock_max", b.fock_max},
                    {"pnrd_max", b.pnrd_max},
                    {"multiplex_detectors", b.multiplex_detectors},
                    {"multiplex_click_max", b.multiplex_click_max},
                    {"homodyne_x_max", b.homodyne_x_max},
                    {"homodyne_bin", b.homodyne_bin}}}};
  }
  const auto& f = cfg.fitness;
  json fitness_sec{{"kind", kind_name(f.kind)},
                   {"mu", f.mu},
                   {"prior_center", f.prior.center},
                   {"prior_width", f.prior.width},
                   {"nbar_cap", f.nbar_cap},
                   {"nbar_floor", f.nbar_floor},
                   {"bmse",
                    json{{"grid_nodes", f.bmse.grid_nodes},
                         {"grid_tol", f.bmse.grid_tol},
                         {"outcome_tail", f.bmse.outcome_tail},
                         {"enum_cap", f.bmse.enum_cap},
                         {"mc_sequences", f.bmse.mc_sequences},
                         {"mc_seed", f.bmse.mc_seed},
                         {"optimize_phase", f.bmse.optimize_phase},
                         {"fixed_phase", f.bmse.fixed_phase},
                         {"eig_cutoff", f.bmse.eig_cutoff},
                         {"keep_grid", f.bmse.keep_grid}}}};
  const auto& g = cfg.search;
  json search_sec{{"stage1_population", g.stage1_population},
                  {"stage2_population", g.stage2_population},
                  {"stage3_population", g.stage3_population},
                  {"stage1_generations", g.stage1_generations},
                  {"stage2_generations", g.stage2_generations},
                  {"stage3_generations", g.stage3_generations},
                  {"stage1_truncation", g.stage1_truncation},
                  {"stage2_truncation", g.stage2_truncation},
                  {"crossover", kind_name(g.crossover)},
                  {"crossover_fraction", g.crossover_fraction},
                  {"tournament_size", g.tournament_size},
                  {"elite_count", g.elite_count},
                  {"mutation", kind_name(g.mutation)},
                  {"power", g.power},
                  {"rate", g.rate},
                  {"stall_generations", g.stall_generations},
                  {"stall_tol", g.stall_tol},
                  {"workers", g.workers}};
  const auto& ad = g.stage3_adaptive;
  json limits_sec{{"t_start", ad.t_start},
                  {"t_step", ad.t_step},
                  {"t_max", ad.t_max},
                  {"rel_tol", ad.rel_tol},
                  {"n_modes", cfg.n_modes},
                  {"m_ops", cfg.m_ops},
                  {"probability_floor", cfg.sim.probability_floor},
                  {"leak_threshold", cfg.sim.leak_threshold}};
  std::vector<std::string> formats;
  if (cfg.write_json) formats.push_back("json");
  if (cfg.write_text) formats.push_back("text");
  json output_sec{{"run_dir", cfg.run_dir},
                  {"formats", formats},
                  {"checkpoints", cfg.checkpoints},
                  {"resume", cfg.resume}};
  return json{{"seed", cfg.seed},
              {"toolbox", tb},
              {"loss",
               json{{"gamma_det", cfg.sim.loss.gamma_det},
                    {"gamma_out", cfg.sim.loss.gamma_out}}},
              {"fitness", fitness_sec},
              {"search", search_sec},
              {"limits", limits_sec},
              {"output", output_sec}};
}

std::string config_hash(const RunConfig& cfg) {
  const std::string s = effective_config(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

search::SearchProblem make_problem(const RunConfig& cfg) {
  search::SearchProblem p;
  p.toolbox = cfg.toolbox;
  p.n_modes = cfg.n_modes;
  p.m_ops = cfg.m_ops;
  p.fitness = cfg.fitness;
  p.sim = cfg.sim;
  return p;
}

search::GaConfig make_ga(const RunConfig& cfg) {
  search::GaConfig ga = cfg.search;
  ga.seed = cfg.seed;
  ga.checkpoint_dir =
      cfg.checkpoints
          ? (std::filesystem::path(cfg.run_dir) / "checkpoints").string()
          : std::string{};
  ga.resume = cfg.resume;
  return ga;
}

}  // namespace herald::cli
