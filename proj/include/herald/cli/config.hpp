#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "herald/search/three_stage.hpp"

namespace herald::cli {

// Fully resolved run settings: one JSON document with named sections
// (toolbox, loss, fitness, search, limits, output, seed).  Parsing is strict:
// unknown keys are rejected, and the persisted effective config records every
// default so a run directory is reproducible from its config.json alone.
struct RunConfig {
  std::uint64_t seed = 0;
  toolbox::ToolboxSpec toolbox = toolbox::ToolboxSpec::full();
  circuit::SimOptions sim;          // loss model + probability/leak floors
  fitness::FitnessSpec fitness;
  search::GaConfig search;          // stage3_adaptive carries the limits
  int n_modes = 2;
  int m_ops = 3;
  std::string run_dir = "run";
  bool checkpoints = true;
  bool resume = false;
  bool write_json = true;           // output formats
  bool write_text = true;

  // Cross-field rules on top of the member validators: loss strengths in
  // [0, 1), loss only with the mixed figure of merit, non-empty toolbox
  // categories, at least two modes and one operator slot, coherent limits.
  void validate() const;
};

// Throws ConfigError carrying the parser's line/column diagnostics or the
// offending section and key.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Every field written out, defaults included; parse_run_config applied to the
// dump reproduces the config exactly.
nlohmann::json effective_config(const RunConfig& config);

// FNV-1a over the canonical effective serialization (16 hex digits).
std::string config_hash(const RunConfig& config);

// Adapters into the search pipeline.
search::SearchProblem make_problem(const RunConfig& config);
search::GaConfig make_ga(const RunConfig& config);

}  // namespace herald::cli
