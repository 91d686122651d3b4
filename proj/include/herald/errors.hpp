#pragma once

#include <stdexcept>
#include <string>

namespace herald {

// A requested herald outcome has probability below the caller's floor.
struct HeraldImpossible : std::runtime_error {
  double probability;
  explicit HeraldImpossible(const std::string& what, double p)
      : std::runtime_error(what), probability(p) {}
};

// Truncation pressure exceeded the caller's threshold. The adaptive driver
// consumes this and retries with a larger cutoff; fixed-cutoff callers that
// set no threshold never see it.
struct TruncationInsufficient : std::runtime_error {
  double leakage;
  int cutoff;
  TruncationInsufficient(const std::string& what, double leak, int t)
      : std::runtime_error(what), leakage(leak), cutoff(t) {}
};

// The truncated-Taylor loop failed to meet its tolerance within the term
// budget; carries the last relative increment as a residual estimate.
struct ExpmNonConvergence : std::runtime_error {
  double residual;
  ExpmNonConvergence(const std::string& what, double r)
      : std::runtime_error(what), residual(r) {}
};

// Invalid configuration or circuit file; maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace herald
