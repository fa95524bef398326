#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "plansumm/report.hpp"
#include "plansumm/summarize.hpp"
#include "randomlib.hpp"

using namespace plansumm;
using namespace plansumm::testing;

TEST_CASE("mars fixture loads with the expected shape") {
  PlanLibrary plans = load_plans("mars.plib");
  ActionLibrary actions = load_actions("mars.alib");
  CHECK(plans.rules.size() == 8);
  CHECK(plans.event_types.size() == 6);
  CHECK(actions.rules.size() == 10);
  CHECK_NOTHROW(validate_against(plans, actions));
  CHECK(plans.rules_for(EventType{"transmitRes", 1}).size() == 2);
  CHECK(plans.canonical_head(EventType{"nav", 2}).args.size() == 2);
}

TEST_CASE("empty input yields empty libraries") {
  CHECK(parse_plan_library("").rules.empty());
  CHECK(parse_action_library("; just a comment\n").rules.empty());
}

TEST_CASE("duplicate head variables are rejected") {
  CHECK_THROWS_AS(parse_plan_library("(plan-rule (event nav ?x ?x) (context true)"
                                     " (body (act move ?x ?x)))"),
                  ValidationError);
}

TEST_CASE("arity clashes are parse-time errors") {
  CHECK_THROWS_AS(parse_plan_library("(plan-rule (event e ?x) (context true)"
                                     " (body (event e ?x ?x)))"),
                  ValidationError);
  CHECK_THROWS_AS(parse_plan_library("(plan-rule (event e) (context (p ?x))"
                                     " (body (add p)))"),
                  ValidationError);
}

TEST_CASE("action rules validate head coverage and uniqueness") {
  ActionLibrary one = parse_action_library(
      "(action (move ?x ?y) (pre (and (at ?x) (not (at ?y)))) (add (at ?y)) (del (at ?x)))");
  REQUIRE(one.rules.size() == 1);
  CHECK(one.rules[0].add.size() == 1);
  CHECK(one.rules[0].del.size() == 1);

  CHECK_THROWS_AS(
      parse_action_library("(action (noop) (pre true) (add (p ?x)) (del))"),
      ValidationError);
  CHECK_THROWS_AS(parse_action_library("(action (a) (pre true) (add (p)) (del))"
                                       "(action (a) (pre true) (add (q)) (del))"),
                  ValidationError);
}

TEST_CASE("unknown actions and undeclared events surface at load") {
  PlanLibrary plans = parse_plan_library("(plan-rule (event e) (context true) (body (act a)))");
  CHECK_THROWS_AS(validate_against(plans, ActionLibrary{}), UnknownAction);
  auto plan = parse_plan("(event ghost)");
  CHECK_THROWS_AS(validate_plan_against(plan, plans, ActionLibrary{}), ValidationError);
}

TEST_CASE("plans parse as ground act/event steps only") {
  auto plan = parse_plan("(event e1) (event e2)");
  REQUIRE(plan.size() == 2);
  CHECK(plan[0].kind == Step::Kind::Event);
  CHECK(plan[1].atom.predicate == "e2");
  CHECK_THROWS_AS(parse_plan("(event e ?x)"), ValidationError);
  CHECK_THROWS_AS(parse_plan("(add p)"), ValidationError);
}

TEST_CASE("belief files declare the universe and ground facts") {
  BeliefFile bf = load_beliefs("mars.bel");
  CHECK(bf.universe.constants == std::vector<std::string>{"lander", "s1", "w"});
  CHECK(bf.beliefs.facts.size() == 2);
  CHECK_THROWS_AS(parse_belief_base("(facts (p))"), SyntaxError);
  CHECK_THROWS_AS(parse_belief_base("(universe a) (facts (p ?x))"), ValidationError);
  CHECK_THROWS_AS(parse_belief_base("(universe a) (facts (p b))"), ValidationError);
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_plan_library("(plan-rule (event e) (context true)\n  (body (act a))");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 2);
    CHECK(e.col > 0);
  }
}

TEST_CASE("action coherence check follows the conservative rule") {
  ActionLibrary guarded = parse_action_library(
      "(action (move ?x ?y) (pre (and (at ?x) (not (at ?y)))) (add (at ?y)) (del (at ?x)))");
  CHECK(check_action_coherence(guarded.rules[0]).empty());

  ActionLibrary unguarded =
      parse_action_library("(action (move ?x ?y) (pre true) (add (at ?y)) (del (at ?x)))");
  auto violations = check_action_coherence(unguarded.rules[0]);
  REQUIRE(violations.size() == 1);
  CHECK(to_string(violations[0].theta) == "{?x/?y}");

  ActionLibrary disjoint =
      parse_action_library("(action (a ?x) (pre true) (add (p ?x)) (del (q ?x)))");
  CHECK(check_action_coherence(disjoint.rules[0]).empty());

  ActionLibrary neq_guarded = parse_action_library(
      "(action (move ?x ?y) (pre (!= ?x ?y)) (add (at ?y)) (del (at ?x)))");
  CHECK(check_action_coherence(neq_guarded.rules[0]).empty());

  // add and delete lists sharing an atom: loads, but the check flags it
  ActionLibrary self = parse_action_library("(action (a) (pre true) (add (p)) (del (p)))");
  REQUIRE(self.rules.size() == 1);
  CHECK(check_action_coherence(self.rules[0]).size() == 1);
}

TEST_CASE("parse/print round-trip on the fixtures") {
  for (const char* name : {"mars", "gotowork", "e0r0"}) {
    PlanLibrary plans = load_plans(std::string(name) + ".plib");
    ActionLibrary actions = load_actions(std::string(name) + ".alib");
    std::string printed = print_library(plans, actions);
    PlanLibrary plans2 = parse_plan_library(printed);
    ActionLibrary actions2 = parse_action_library(printed);
    REQUIRE(plans2.rules.size() == plans.rules.size());
    REQUIRE(actions2.rules.size() == actions.rules.size());
    CHECK(print_library(plans2, actions2) == printed);
  }
}

TEST_CASE("parse/print round-trip on random libraries") {
  std::mt19937 rng(harness_seed() + 10);
  for (int i = 0; i < 50; ++i) {
    RandomDomain dom = random_domain(rng);
    std::string printed = print_library(dom.plans, dom.actions);
    PlanLibrary plans2 = parse_plan_library(printed);
    ActionLibrary actions2 = parse_action_library(printed);
    CHECK(print_library(plans2, actions2) == printed);
    CHECK(plans2.event_types == dom.plans.event_types);
  }
}

TEST_CASE("emit_report is deterministic and sorted") {
  PlanLibrary plans = load_plans("mars.plib");
  ActionLibrary actions = load_actions("mars.alib");
  std::string r1 = emit_report(summ(plans, actions));
  std::string r2 = emit_report(summ(plans, actions));
  CHECK(r1 == r2);
  CHECK(r1.back() == '\n');

  auto entries = parse_report(r1);
  REQUIRE(entries.size() == 6);
  bool found = false;
  for (const auto& e : entries) {
    if (e.subject == "transmitRes/1") {
      found = true;
      CHECK(sets_variant_equal(e.must, parse_literals({"(rT ?y)"})));
    }
  }
  CHECK(found);
}

TEST_CASE("emit_report of an empty table") {
  CHECK(emit_report(SummaryTable{}) == "{\n  \"summaries\": []\n}\n");
}

TEST_CASE("report round-trip reproduces the table modulo renaming") {
  PlanLibrary plans = load_plans("mars.plib");
  ActionLibrary actions = load_actions("mars.alib");
  SummaryTable table = summ(plans, actions);
  auto entries = parse_report(emit_report(table));
  REQUIRE(entries.size() == table.entries.size());
  for (const auto& e : entries) {
    const SummaryInfo& info = table.require(e.subject);
    Atom parsed_head;
    parsed_head.predicate = info.subject.event.name;
    for (const std::string& p : e.params) parsed_head.args.push_back(parse_atom_text("(x " + p + ")").args[0]);
    CHECK(summary_variant_equal(parsed_head, e.must, e.mentioned, info.subject.event_head,
                                info.must, info.mentioned));
    REQUIRE(e.precondition.has_value());
    CHECK(to_string(*e.precondition) == to_string(*info.precondition));
  }
}

TEST_CASE("step and formula text parsers") {
  CHECK(to_string(parse_formula_text("(or (and (p ?x) (not (q))) (!= ?x b) true)")) ==
        "(or (and (p ?x) (not (q))) (!= ?x b) true)");
  CHECK(parse_literal_text("(not (at ?x))") == Literal{false, Atom{"at", {Term::variable("x")}}});
  CHECK(parse_atom_text("(rT s1)") == Atom{"rT", {Term::constant("s1")}});
  CHECK_THROWS_AS(parse_formula_text("(and)"), SyntaxError);
  CHECK_THROWS_AS(parse_literal_text("(and (p) (q))"), SyntaxError);
}
