#pragma once

#include <string>
#include <vector>

#include "plansumm/summarize.hpp"

namespace plansumm {

// JSON report over a summary table. Deterministic: keys sorted, arrays sorted
// by canonical rendering, newline-terminated.
std::string emit_report(const SummaryTable& table);

struct ReportEntry {
  std::string subject; // "name/arity"
  std::vector<std::string> params;
  std::optional<Formula> precondition; // absent when rendered "epsilon"
  std::set<Literal> must;
  std::set<Literal> mentioned;
};

// Round-trip side of emit_report; used by the report harness.
std::vector<ReportEntry> parse_report(const std::string& text);

} // namespace plansumm
