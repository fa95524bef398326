#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "plansumm/cli.hpp"

using namespace plansumm;
using namespace plansumm::testing;

namespace {

RunConfig mars_cfg() {
  RunConfig cfg;
  cfg.plan_library = fixture_path("mars.plib");
  cfg.action_library = fixture_path("mars.alib");
  cfg.beliefs = fixture_path("mars.bel");
  return cfg;
}

RunConfig six_cfg() {
  RunConfig cfg;
  cfg.plan_library = fixture_path("six.plib");
  cfg.action_library = fixture_path("empty.alib");
  cfg.beliefs = fixture_path("six.bel");
  cfg.plan = fixture_path("six.plan");
  cfg.goal = "(r)";
  return cfg;
}

} // namespace

TEST_CASE("summarize emits the report and exit 0") {
  CmdResult r = cmd_summarize(mars_cfg());
  CHECK(r.exit_code == 0);
  CHECK(r.out.back() == '\n');
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["summaries"].size() == 6);
  // byte-identical on a second run
  CHECK(cmd_summarize(mars_cfg()).out == r.out);
}

TEST_CASE("summarize maps recursion to exit 2 naming the cycle") {
  RunConfig cfg = mars_cfg();
  cfg.plan_library = fixture_path("recursive_cycle3.plib");
  CmdResult r = cmd_summarize(cfg);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("e1/0") != std::string::npos);
  CHECK(r.err.find("cycle") != std::string::npos);
}

TEST_CASE("missing and malformed files map to exit 1") {
  RunConfig cfg = mars_cfg();
  cfg.plan_library = fixture_path("no_such_file.plib");
  CHECK(cmd_summarize(cfg).exit_code == 1);

  RunConfig bad = mars_cfg();
  bad.plan_library = fixture_path("mars.bel"); // wrong grammar
  CHECK(cmd_summarize(bad).exit_code == 1);
}

TEST_CASE("export renders the pddl domain") {
  CmdResult r = cmd_export(mars_cfg());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("(define (domain") != std::string::npos);
  CHECK(r.out.find(";; abstract") != std::string::npos);
  CHECK(r.out.find("(:action explore_2") != std::string::npos);
}

TEST_CASE("check without resolve reports the potentially-incorrect witness") {
  CmdResult r = cmd_check(six_cfg());
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "potentially_incorrect");
  REQUIRE(j["witnesses"].size() == 1);
  CHECK(j["witnesses"][0]["literal"] == "(p)");
  CHECK(j["witnesses"][0]["step"] == 2);
  CHECK(j["witnesses"][0]["undone_at_step"] == 1);
  CHECK(j["witnesses"][0]["undoing_literal"] == "(not (p))");
}

TEST_CASE("check with resolve attaches the execution and reports correct") {
  RunConfig cfg = six_cfg();
  cfg.resolve = true;
  CmdResult r = cmd_check(cfg);
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "correct");
  CHECK(j.contains("execution"));
  CHECK(j["execution"]["final"].size() == 3);
}

TEST_CASE("check reports definitely_incorrect with exit 3") {
  RunConfig cfg = six_cfg();
  cfg.plan_library = fixture_path("six_norule1.plib");
  cfg.resolve = true;
  CmdResult r = cmd_check(cfg);
  // in the modified library the plan is no longer flagged by classify alone
  auto j = nlohmann::json::parse(r.out);
  if (j["verdict"] == "potentially_incorrect" || j["verdict"] == "definitely_incorrect") {
    CHECK(r.exit_code == (j["verdict"] == "definitely_incorrect" ? 3 : 0));
  }

  // a plan whose classify is potentially incorrect and no execution reaches
  // the goal maps to exit 3
  RunConfig np = six_cfg();
  np.plan_library = fixture_path("noplan.plib");
  np.resolve = true;
  CmdResult r2 = cmd_check(np);
  CHECK(r2.exit_code == 3);
  CHECK(nlohmann::json::parse(r2.out)["verdict"] == "definitely_incorrect");
}

TEST_CASE("trivially independent plans check correct") {
  RunConfig cfg = six_cfg();
  cfg.plan = fixture_path("six_correct.plan");
  CmdResult r = cmd_check(cfg);
  CHECK(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.out)["verdict"] == "correct");
}

TEST_CASE("plan returns the accepted plan with its witness") {
  CmdResult r = cmd_plan(six_cfg());
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["plan"].size() == 2);
  CHECK(j["plan"][0]["atom"] == "(e1)");
  CHECK(j["plan"][1]["atom"] == "(e2)");
  CHECK(j.contains("execution"));
}

TEST_CASE("plan maps exclusion exhaustion to exit 4") {
  RunConfig cfg = six_cfg();
  cfg.plan_library = fixture_path("noplan.plib");
  cfg.bounds.max_depth = 4;
  CmdResult r = cmd_plan(cfg);
  CHECK(r.exit_code == 4);
}

TEST_CASE("verify must mode confirms oracle coverage") {
  RunConfig cfg = mars_cfg();
  cfg.verify_mode = "must";
  cfg.verify_target = "(transmitRes s1)";
  CmdResult r = cmd_verify(cfg);
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["sound"] == true);
  bool found = false;
  for (const auto& l : j["oracle_must"])
    if (l == "(rT s1)") found = true;
  CHECK(found);
}

TEST_CASE("verify precondition mode") {
  RunConfig cfg = mars_cfg();
  cfg.verify_mode = "precondition";
  cfg.verify_target = "(explore w s1)";
  CmdResult r = cmd_verify(cfg);
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["has_execution"] == true);
  CHECK(j["precondition_holds"] == true);
  CHECK(j["sound"] == true);
}

TEST_CASE("verify capture mode on a rule body") {
  RunConfig cfg = mars_cfg();
  cfg.beliefs = fixture_path("mars2.bel");
  cfg.verify_mode = "capture";
  cfg.verify_target = "rule:3";
  CmdResult r = cmd_verify(cfg);
  CHECK(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.out)["captured"] == true);
}

TEST_CASE("verify coherence lists the test-false rule") {
  RunConfig cfg;
  cfg.plan_library = fixture_path("badcoherence.plib");
  cfg.action_library = fixture_path("empty.alib");
  cfg.beliefs = fixture_path("badcoherence.bel");
  cfg.verify_mode = "coherence";
  CmdResult r = cmd_verify(cfg);
  CHECK(r.exit_code == 1);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["coherent"] == false);
  REQUIRE(j["violations"].size() == 1);
  CHECK(j["violations"][0]["rule"] == "R0");
}

TEST_CASE("verify with an unknown mode is a usage error") {
  RunConfig cfg = mars_cfg();
  cfg.verify_mode = "nonsense";
  CHECK(cmd_verify(cfg).exit_code == 1);
}

TEST_CASE("verify --trace prepends execution traces as JSON lines") {
  RunConfig cfg = mars_cfg();
  cfg.verify_mode = "must";
  cfg.verify_target = "(transmitRes s1)";
  cfg.emit_traces = true;
  CmdResult r = cmd_verify(cfg);
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string first;
  std::getline(lines, first);
  auto j = nlohmann::json::parse(first);
  CHECK(j.contains("trace"));
  CHECK(j.contains("final"));
  CHECK(j.contains("tree"));
}

TEST_CASE("check handles abstract steps with extra precondition variables") {
  RunConfig cfg = mars_cfg();
  cfg.plan = fixture_path("mars_transmit.plan");
  cfg.goal = "(rT s1)";
  CmdResult r = cmd_check(cfg);
  CHECK(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.out)["verdict"] == "correct");

  cfg.resolve = true;
  CHECK(cmd_check(cfg).exit_code == 0);
}

TEST_CASE("plan on the mars domain verifies its shortest plan") {
  RunConfig cfg = mars_cfg();
  cfg.goal = "(rT s1)";
  CmdResult r = cmd_plan(cfg);
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["plan"].size() >= 1);
  bool goal_reached = false;
  for (const auto& fact : j["execution"]["final"])
    if (fact == "(rT s1)") goal_reached = true;
  CHECK(goal_reached);
}
