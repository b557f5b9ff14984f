#pragma once

#include <set>
#include <string>
#include <vector>

#include "ksphere/pipeline.hpp"

namespace ksphere {

struct CheckResult {
  std::string system;
  std::string group;
  std::string name;
  bool hard = true;   // hard failures map to exit code 3
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::set<std::string> groups;  // empty: nothing to check
  Tolerances tol;
  int samples = 201;
  /// Evolve with A(1, 0) sign-flipped to confirm the harness catches it.
  bool inject_bug = false;
};

/// Runs the selected check groups on one system over [0, t_max].
std::vector<CheckResult> verify_system(const System& system, double t_max,
                                       const VerifyOptions& options);

struct ZooEntry {
  RunConfig config;
  double t_max = 0.0;
};

/// Model families plus seeded random Hamiltonians and chains.
std::vector<ZooEntry> model_zoo(std::uint64_t seed);

struct VerifySummary {
  std::vector<CheckResult> results;
  int hard_failures = 0;
  int soft_failures = 0;
  bool ok() const { return hard_failures == 0; }
};

VerifySummary summarize(std::vector<CheckResult> results);
io::json summary_to_json(const VerifySummary& s);
/// Fixed-width pass/fail table.
std::string summary_table(const VerifySummary& s);

}  // namespace ksphere
