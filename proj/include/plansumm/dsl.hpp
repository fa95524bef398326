#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plansumm/core.hpp"

namespace plansumm {

// Plan-library DSL: plan rules, action rules, belief bases and ground plans,
// all in the s-expression surface syntax.

struct Step {
  enum class Kind { Act, Event, AddBelief, DelBelief, Test };

  Kind kind = Kind::Act;
  Atom atom;    // Act / Event / AddBelief / DelBelief
  Formula test; // Test

  static Step act(Atom a);
  static Step event(Atom a);
  static Step add_belief(Atom a);
  static Step del_belief(Atom a);
  static Step test_cond(Formula f);

  bool ground() const;
  bool operator==(const Step&) const = default;
};

std::string to_string(const Step& s);
Step apply(const Substitution& s, const Step& step);
std::vector<Step> apply(const Substitution& s, const std::vector<Step>& steps);
std::set<std::string> free_vars(const Step& s);
std::set<std::string> free_vars(const std::vector<Step>& steps);

struct EventType {
  std::string name;
  int arity = 0;

  std::string key() const { return name + "/" + std::to_string(arity); }
  static EventType of(const Atom& a) { return EventType{a.predicate, a.arity()}; }

  auto operator<=>(const EventType&) const = default;
};

struct PlanRule {
  Atom head;    // event name + pairwise-distinct variable args
  Formula context;
  std::vector<Step> body; // nonempty
  int index = -1;         // position in the library

  std::string id() const { return "R" + std::to_string(index); }
};

struct ActionRule {
  Atom head; // distinct variable args; pre/add/del variables all occur here
  Formula pre;
  std::vector<Atom> add;
  std::vector<Atom> del;
};

struct PlanLibrary {
  std::vector<PlanRule> rules;
  std::set<EventType> event_types; // every type mentioned: rule heads + event steps

  std::vector<int> rules_for(const EventType& e) const;
  // Head atom of the first rule for e, or a synthesized ?x1..?xn head.
  Atom canonical_head(const EventType& e) const;
};

struct ActionLibrary {
  std::vector<ActionRule> rules; // exactly one per action name+arity

  const ActionRule* find(const std::string& name, int arity) const;
  const ActionRule& require(const std::string& name, int arity) const;
};

struct BeliefFile {
  BeliefBase beliefs;
  Universe universe;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int col, const std::string& expected);
  int line = 0;
  int col = 0;
  std::string expected;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string where, const std::string& what);
  std::string where; // rule/action id or file section
};

class UnknownAction : public std::runtime_error {
 public:
  explicit UnknownAction(const std::string& name);
  std::string name;
};

PlanLibrary parse_plan_library(std::string_view text);
ActionLibrary parse_action_library(std::string_view text);
BeliefFile parse_belief_base(std::string_view text);
std::vector<Step> parse_plan(std::string_view text); // ground act/event steps only
Formula parse_formula_text(std::string_view text);
Literal parse_literal_text(std::string_view text);
Atom parse_atom_text(std::string_view text);

// Cross-library checks run at load time: act steps name declared actions,
// plan steps reference types mentioned in the plan library.
void validate_against(const PlanLibrary& plans, const ActionLibrary& actions);
void validate_plan_against(const std::vector<Step>& plan, const PlanLibrary& plans,
                           const ActionLibrary& actions);

struct ActionCoherenceViolation {
  std::string action;
  Atom add;
  Atom del;
  Substitution theta;
};

// Conservative, decidable check of the action-coherence requirement: a
// violation is an add/del atom pair unifiable by theta whose instantiated
// precondition is not syntactically inconsistent (no contradicted
// disequality, no complementary literal pair).
std::vector<ActionCoherenceViolation> check_action_coherence(const ActionRule& rule);

// Canonical text rendering; parse(print(lib)) == lib modulo whitespace.
std::string print_library(const PlanLibrary& plans, const ActionLibrary& actions);
std::string print_belief_file(const BeliefFile& bf);
std::string print_plan(const std::vector<Step>& plan);

} // namespace plansumm
