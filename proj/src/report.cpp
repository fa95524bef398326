#include "plansumm/report.hpp"

#include <algorithm>

#include <json.hpp>

namespace plansumm {

namespace {

std::vector<std::string> sorted_renderings(const std::set<Literal>& ls) {
  std::vector<std::string> out;
  out.reserve(ls.size());
  for (const Literal& l : ls) out.push_back(to_string(l));
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

std::string emit_report(const SummaryTable& table) {
  nlohmann::json summaries = nlohmann::json::array();
  for (const SummaryInfo* info : table.event_entries()) {
    nlohmann::json entry;
    entry["subject"] = info->subject.key();
    nlohmann::json params = nlohmann::json::array();
    for (const Term& t : info->subject.event_head.args) params.push_back(to_string(t));
    entry["params"] = params;
    entry["precondition"] = info->precondition ? to_string(*info->precondition) : "epsilon";
    entry["must"] = sorted_renderings(info->must);
    entry["mentioned"] = sorted_renderings(info->mentioned);
    summaries.push_back(entry);
  }
  nlohmann::json report;
  report["summaries"] = summaries;
  return report.dump(2) + "\n";
}

std::vector<ReportEntry> parse_report(const std::string& text) {
  nlohmann::json report = nlohmann::json::parse(text);
  std::vector<ReportEntry> out;
  for (const auto& entry : report.at("summaries")) {
    ReportEntry re;
    re.subject = entry.at("subject").get<std::string>();
    for (const auto& p : entry.at("params")) re.params.push_back(p.get<std::string>());
    std::string pre = entry.at("precondition").get<std::string>();
    if (pre != "epsilon") re.precondition = parse_formula_text(pre);
    for (const auto& l : entry.at("must")) re.must.insert(parse_literal_text(l.get<std::string>()));
    for (const auto& l : entry.at("mentioned"))
      re.mentioned.insert(parse_literal_text(l.get<std::string>()));
    out.push_back(std::move(re));
  }
  return out;
}

} // namespace plansumm
