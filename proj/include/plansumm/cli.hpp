#pragma once

#include <optional>
#include <string>

#include "plansumm/oracle.hpp"

namespace plansumm {

// Command implementations behind the plansumm tool. Exit codes:
//   0 success, 1 parse/validation/missing-file (or a failed verification),
//   2 RecursionError, 3 DefinitelyIncorrect, 4 NoPlan, 5 BoundsExceeded.
struct CmdResult {
  int exit_code = 0;
  std::string out; // newline-terminated JSON or text
  std::string err; // diagnostics
};

struct RunConfig {
  std::string plan_library;
  std::string action_library;
  std::string beliefs;
  std::string plan;
  std::string goal;           // DSL formula text
  std::string verify_target;  // ground event atom or rule:<index>
  std::string verify_mode;    // must | precondition | capture | coherence
  bool resolve = false;
  bool emit_traces = false;
  ExecutionBounds bounds;
};

CmdResult cmd_summarize(const RunConfig& cfg);
CmdResult cmd_export(const RunConfig& cfg);
CmdResult cmd_check(const RunConfig& cfg);
CmdResult cmd_plan(const RunConfig& cfg);
CmdResult cmd_verify(const RunConfig& cfg);

} // namespace plansumm
