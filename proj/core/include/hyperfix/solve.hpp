#pragma once

#include <memory>
#include <string>

#include "hyperfix/eval.hpp"

namespace hyperfix {

enum class Sat : uint8_t { Sat, Unsat, Unknown };

inline const char* to_string(Sat s) {
  switch (s) {
    case Sat::Sat: return "sat";
    case Sat::Unsat: return "unsat";
    case Sat::Unknown: return "unknown";
  }
  return "?";
}

struct SatResult {
  Sat verdict = Sat::Unknown;
  std::string info;
  double seconds = 0;
};

class SmtBackend {
 public:
  virtual ~SmtBackend() = default;
  virtual SatResult check_sat(const TermRef& formula) = 0;
  virtual std::string name() const = 0;
};

/// Sound verdicts without an external solver: UNSAT from structural conflict
/// rules over the top-level conjunction (complementary literals, per-variable
/// integer intervals, contradictory string bindings, false ground conjuncts);
/// SAT from a finite-domain model search (a finite model extends to a real
/// one; uninterpreted applications are treated as free values, which is only
/// sound while a symbol is applied to a single argument tuple). Everything
/// else is Unknown.
class FiniteModelBackend : public SmtBackend {
 public:
  explicit FiniteModelBackend(FiniteDomain dom) : dom_(std::move(dom)) {}

  SatResult check_sat(const TermRef& formula) override;
  std::string name() const override { return "finite-model"; }

 private:
  FiniteDomain dom_;
};

/// Writes SMT-LIB 2 to a file and invokes an external command; the template's
/// `{file}` is replaced by the path. Expects sat/unsat/unknown on stdout.
class ExternalSmtBackend : public SmtBackend {
 public:
  ExternalSmtBackend(std::string cmdTemplate, std::string workDir, double timeoutSeconds = 120)
      : cmd_(std::move(cmdTemplate)), workDir_(std::move(workDir)), timeout_(timeoutSeconds) {}

  SatResult check_sat(const TermRef& formula) override;
  std::string name() const override { return "external"; }

  /// The emitted script, exposed for tests and --emit-constraints.
  static std::string to_script(const TermRef& formula);

 private:
  std::string cmd_;
  std::string workDir_;
  double timeout_;
  int counter_ = 0;
};

/// Runs a command with a timeout, capturing stdout+stderr.
struct RunResult {
  int exitCode = -1;
  bool timedOut = false;
  std::string output;
  double seconds = 0;
};
RunResult run_command(const std::string& command, double timeoutSeconds);

}  // namespace hyperfix
