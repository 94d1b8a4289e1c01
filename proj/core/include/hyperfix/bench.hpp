#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperfix/repair.hpp"

namespace hyperfix {

/// One corpus instance directory: program.imp, property.hltl, bench.json and
/// (for sanity-checked instances) expected.imp.
struct BenchInstance {
  std::string name;
  std::string suite;
  std::string dir;
  Program program;
  HyperLtlFormula formula;
  RepairConfig config;          // solverCmd/runDir filled by the runner
  bool iterative = true;
  int maxTermSize = 14;
  std::optional<Program> expected;
  std::optional<int> expectIterations;
  std::optional<int> expectSize;
};

BenchInstance load_instance(const std::string& dir);

/// Instance directories of a suite under the corpus root, sorted by the
/// numeric `order` field in bench.json (then by name).
std::vector<std::string> suite_instances(const std::string& corpusRoot, const std::string& suite);

struct BenchResult {
  std::string name;
  RepairReport report;
  bool expectationsChecked = false;
  bool expectationsMet = true;
  std::string note;
};

/// Builds the per-instance solver command from the template by substituting
/// {domain}, {maxsize} and {timeout}, then runs the configured repair mode.
BenchResult run_instance(const BenchInstance& inst, const std::string& solverCmdTemplate,
                         const std::string& runRoot);

std::string bench_table(const std::vector<BenchResult>& results);

/// Writes the instance's oracle-enumeration domain as JSON (consumed by the
/// finite-domain search tool).
std::string domain_to_json(const FiniteDomain& dom);
FiniteDomain domain_from_json(const std::string& text);

}  // namespace hyperfix
