#include "plansumm/cli.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "plansumm/abstraction.hpp"
#include "plansumm/report.hpp"

namespace plansumm {

namespace {

class FileError : public std::runtime_error {
 public:
  explicit FileError(const std::string& path) : std::runtime_error("cannot read " + path) {}
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Loaded {
  PlanLibrary plans;
  ActionLibrary actions;
  std::optional<BeliefFile> beliefs;
  std::vector<Step> plan;
};

Loaded load(const RunConfig& cfg, bool want_beliefs, bool want_plan) {
  Loaded l;
  l.plans = parse_plan_library(slurp(cfg.plan_library));
  l.actions = parse_action_library(slurp(cfg.action_library));
  validate_against(l.plans, l.actions);
  if (want_beliefs) l.beliefs = parse_belief_base(slurp(cfg.beliefs));
  if (want_plan) {
    l.plan = parse_plan(slurp(cfg.plan));
    validate_plan_against(l.plan, l.plans, l.actions);
  }
  return l;
}

nlohmann::json witness_json(const Witness& w) {
  nlohmann::json j;
  j["literal"] = to_string(w.pre_literal);
  j["step"] = w.step_index;
  j["undone_at_step"] = w.undoing_step;
  j["undoing_literal"] = to_string(w.undoing_literal);
  nlohmann::json theta = nlohmann::json::object();
  for (const auto& [v, t] : w.theta.bindings()) theta["?" + v] = to_string(t);
  j["theta"] = theta;
  return j;
}

// maps errors onto the exit-code contract
int run(const std::function<CmdResult()>& body, CmdResult& result) {
  try {
    result = body();
    return result.exit_code;
  } catch (const RecursionError& e) {
    result.err = std::string(e.what()) + "\n";
    return result.exit_code = 2;
  } catch (const BoundsExceeded& e) {
    result.err = std::string(e.what()) + "\n";
    return result.exit_code = 5;
  } catch (const NoPlan& e) {
    result.err = std::string(e.what()) + "\n";
    return result.exit_code = 4;
  } catch (const std::exception& e) {
    result.err = std::string(e.what()) + "\n";
    return result.exit_code = 1;
  }
}

} // namespace

CmdResult cmd_summarize(const RunConfig& cfg) {
  CmdResult result;
  run(
      [&]() -> CmdResult {
        Loaded l = load(cfg, false, false);
        SummaryTable table = summ(l.plans, l.actions);
        return CmdResult{0, emit_report(table), ""};
      },
      result);
  return result;
}

CmdResult cmd_export(const RunConfig& cfg) {
  CmdResult result;
  run(
      [&]() -> CmdResult {
        Loaded l = load(cfg, false, false);
        SummaryTable table = summ(l.plans, l.actions);
        return CmdResult{0, export_pddl_like(l.actions, build_abstract_operators(table)), ""};
      },
      result);
  return result;
}

CmdResult cmd_check(const RunConfig& cfg) {
  CmdResult result;
  run(
      [&]() -> CmdResult {
        Loaded l = load(cfg, true, true);
        SummaryTable table = summ(l.plans, l.actions);

        GroundPlan plan;
        plan.initial = l.beliefs->beliefs;
        for (const Step& s : l.plan)
          plan.steps.push_back(PlanStep{s.kind == Step::Kind::Event, s.atom, {}});
        if (!cfg.goal.empty()) plan.goal = parse_formula_text(cfg.goal);

        Verdict verdict = classify_plan(plan, table, l.actions);
        if (verdict.kind == VerdictKind::PotentiallyIncorrect && cfg.resolve)
          verdict = resolve(plan, table, l.plans, l.actions, l.beliefs->universe, cfg.bounds);

        nlohmann::json j;
        j["verdict"] = to_string(verdict.kind);
        nlohmann::json ws = nlohmann::json::array();
        for (const Witness& w : verdict.witnesses) ws.push_back(witness_json(w));
        j["witnesses"] = ws;
        if (verdict.witness_execution)
          j["execution"] = nlohmann::json::parse(outcome_to_json(*verdict.witness_execution));
        int code = verdict.kind == VerdictKind::DefinitelyIncorrect ? 3 : 0;
        return CmdResult{code, j.dump(2) + "\n", ""};
      },
      result);
  return result;
}

CmdResult cmd_plan(const RunConfig& cfg) {
  CmdResult result;
  run(
      [&]() -> CmdResult {
        Loaded l = load(cfg, true, false);
        Formula goal = parse_formula_text(cfg.goal);
        auto [plan, witness] = plan_abstract_verified(l.beliefs->beliefs, goal, l.plans,
                                                      l.actions, l.beliefs->universe, cfg.bounds);
        nlohmann::json j;
        nlohmann::json steps = nlohmann::json::array();
        for (const PlanStep& s : plan.steps) {
          nlohmann::json step;
          step["kind"] = s.is_abstract ? "event" : "act";
          step["atom"] = to_string(s.ground_atom);
          steps.push_back(step);
        }
        j["plan"] = steps;
        j["execution"] = nlohmann::json::parse(outcome_to_json(witness));
        return CmdResult{0, j.dump(2) + "\n", ""};
      },
      result);
  return result;
}

namespace {

CmdResult verify_must(const RunConfig& cfg, const Loaded& l) {
  Atom event = parse_atom_text(cfg.verify_target);
  if (!event.ground()) throw ValidationError("verify", "event must be ground");
  SummaryTable table = summ(l.plans, l.actions);
  const SummaryInfo* info = table.find_event(EventType::of(event));
  if (!info) throw MissingSummary(EventType::of(event).key());

  auto theta = mgu(info->subject.event_head, event);
  std::set<Literal> computed;
  for (const Literal& lit : info->must) computed.insert(apply(*theta, lit));

  std::string traces;
  if (cfg.emit_traces) {
    EnumerationResult res = enumerate_executions(l.beliefs->beliefs, {Step::event(event)},
                                                 l.plans, l.actions, l.beliefs->universe,
                                                 cfg.bounds);
    for (const ExecutionOutcome& o : res.outcomes) traces += outcome_to_json(o) + "\n";
  }

  std::set<Literal> oracle = oracle_must_literals(event, l.plans, l.actions, l.beliefs->universe,
                                                  cfg.bounds, {l.beliefs->beliefs});
  bool sound = std::includes(oracle.begin(), oracle.end(), computed.begin(), computed.end());

  nlohmann::json j;
  j["mode"] = "must";
  j["event"] = to_string(event);
  nlohmann::json cj = nlohmann::json::array(), oj = nlohmann::json::array();
  for (const Literal& lit : computed) cj.push_back(to_string(lit));
  for (const Literal& lit : oracle) oj.push_back(to_string(lit));
  j["computed_must"] = cj;
  j["oracle_must"] = oj;
  j["sound"] = sound;
  return CmdResult{sound ? 0 : 1, traces + j.dump(2) + "\n", ""};
}

CmdResult verify_precondition(const RunConfig& cfg, const Loaded& l) {
  Atom event = parse_atom_text(cfg.verify_target);
  if (!event.ground()) throw ValidationError("verify", "event must be ground");
  SummaryTable table = summ(l.plans, l.actions);
  const SummaryInfo* info = table.find_event(EventType::of(event));
  if (!info) throw MissingSummary(EventType::of(event).key());
  auto theta = mgu(info->subject.event_head, event);
  Formula pre = apply(*theta, *info->precondition);

  std::vector<Step> program = {Step::event(event)};
  auto outcome = has_successful_execution(l.beliefs->beliefs, program, l.plans, l.actions,
                                          l.beliefs->universe, cfg.bounds);
  bool holds =
      !satisfying_groundings(l.beliefs->beliefs, pre, l.beliefs->universe).empty();
  bool sound = !outcome || holds; // execution exists => precondition holds

  nlohmann::json j;
  j["mode"] = "precondition";
  j["event"] = to_string(event);
  j["precondition"] = to_string(pre);
  j["has_execution"] = outcome.has_value();
  j["precondition_holds"] = holds;
  j["sound"] = sound;
  if (outcome && cfg.emit_traces)
    j["execution"] = nlohmann::json::parse(outcome_to_json(*outcome));
  return CmdResult{sound ? 0 : 1, j.dump(2) + "\n", ""};
}

CmdResult verify_capture(const RunConfig& cfg, const Loaded& l) {
  SummaryTable table = summ_full(l.plans, l.actions);
  std::vector<Step> program;
  std::set<Literal> mentioned;
  std::string subject;
  if (cfg.verify_target.rfind("rule:", 0) == 0) {
    int idx = std::stoi(cfg.verify_target.substr(5));
    if (idx < 0 || idx >= static_cast<int>(l.plans.rules.size()))
      throw ValidationError("verify", "no rule with index " + std::to_string(idx));
    program = l.plans.rules[idx].body;
    mentioned = table.require("body:" + std::to_string(idx)).mentioned;
    subject = l.plans.rules[idx].id();
  } else {
    Atom event = parse_atom_text(cfg.verify_target);
    const SummaryInfo* info = table.find_event(EventType::of(event));
    if (!info) throw MissingSummary(EventType::of(event).key());
    program = {Step::event(event)};
    mentioned = info->mentioned;
    subject = to_string(event);
  }
  bool captured = oracle_captures(mentioned, program, l.plans, l.actions, l.beliefs->universe,
                                  cfg.bounds);
  nlohmann::json j;
  j["mode"] = "capture";
  j["subject"] = subject;
  nlohmann::json mj = nlohmann::json::array();
  for (const Literal& lit : mentioned) mj.push_back(to_string(lit));
  j["mentioned"] = mj;
  j["captured"] = captured;
  return CmdResult{captured ? 0 : 1, j.dump(2) + "\n", ""};
}

CmdResult verify_coherence(const RunConfig& cfg, const Loaded& l) {
  auto violations =
      validate_coherence(l.plans, l.actions, l.beliefs->universe, cfg.bounds);
  nlohmann::json j;
  j["mode"] = "coherence";
  nlohmann::json vs = nlohmann::json::array();
  for (const CoherenceViolation& v : violations) {
    nlohmann::json vj;
    vj["rule"] = "R" + std::to_string(v.rule_index);
    vj["head"] = to_string(v.head_instance);
    nlohmann::json base = nlohmann::json::array();
    for (const Atom& a : v.base.facts) base.push_back(to_string(a));
    vj["beliefs"] = base;
    vs.push_back(vj);
  }
  j["violations"] = vs;
  j["coherent"] = violations.empty();
  return CmdResult{violations.empty() ? 0 : 1, j.dump(2) + "\n", ""};
}

} // namespace

CmdResult cmd_verify(const RunConfig& cfg) {
  CmdResult result;
  run(
      [&]() -> CmdResult {
        Loaded l = load(cfg, true, false);
        if (cfg.verify_mode == "must") return verify_must(cfg, l);
        if (cfg.verify_mode == "precondition") return verify_precondition(cfg, l);
        if (cfg.verify_mode == "capture") return verify_capture(cfg, l);
        if (cfg.verify_mode == "coherence") return verify_coherence(cfg, l);
        throw ValidationError("verify", "unknown mode " + cfg.verify_mode);
      },
      result);
  return result;
}

} // namespace plansumm
