#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "plansumm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Static precondition/effect summarization for hierarchical plan libraries"};
  app.require_subcommand(1);

  plansumm::RunConfig cfg;
  std::string output_path;

  auto add_bounds = [&](CLI::App* cmd) {
    cmd->add_option("--max-depth", cfg.bounds.max_depth,
                    "maximum event decomposition depth / plan length");
    cmd->add_option("--max-outcomes", cfg.bounds.max_outcomes, "enumeration/search budget");
    cmd->add_option("-o,--output", output_path, "write output to a file instead of stdout");
  };

  CLI::App* summarize = app.add_subcommand("summarize", "derive event-goal summaries");
  summarize->add_option("plib", cfg.plan_library, "plan library file")->required();
  summarize->add_option("alib", cfg.action_library, "action library file")->required();
  add_bounds(summarize);

  CLI::App* exp = app.add_subcommand("export", "export abstract planning operators");
  exp->add_option("plib", cfg.plan_library)->required();
  exp->add_option("alib", cfg.action_library)->required();
  add_bounds(exp);

  CLI::App* check = app.add_subcommand("check", "classify an abstract plan");
  check->add_option("plib", cfg.plan_library)->required();
  check->add_option("alib", cfg.action_library)->required();
  check->add_option("beliefs", cfg.beliefs)->required();
  check->add_option("plan", cfg.plan)->required();
  check->add_option("--goal", cfg.goal, "goal formula for --resolve");
  check->add_flag("--resolve", cfg.resolve, "resolve potentially-incorrect plans via the oracle");
  add_bounds(check);

  CLI::App* plan = app.add_subcommand("plan", "plan with abstract operators and verify");
  plan->add_option("plib", cfg.plan_library)->required();
  plan->add_option("alib", cfg.action_library)->required();
  plan->add_option("beliefs", cfg.beliefs)->required();
  plan->add_option("--goal", cfg.goal, "ground goal formula")->required();
  add_bounds(plan);

  CLI::App* verify = app.add_subcommand("verify", "brute-force checks against the oracle");
  verify->add_option("plib", cfg.plan_library)->required();
  verify->add_option("alib", cfg.action_library)->required();
  verify->add_option("beliefs", cfg.beliefs)->required();
  verify->add_option("--mode", cfg.verify_mode, "must | precondition | capture | coherence")
      ->required();
  verify->add_option("--target", cfg.verify_target, "ground event atom or rule:<index>");
  verify->add_flag("--trace", cfg.emit_traces, "include execution traces in the report");
  add_bounds(verify);

  CLI11_PARSE(app, argc, argv);

  plansumm::CmdResult result;
  if (summarize->parsed()) result = plansumm::cmd_summarize(cfg);
  if (exp->parsed()) result = plansumm::cmd_export(cfg);
  if (check->parsed()) result = plansumm::cmd_check(cfg);
  if (plan->parsed()) result = plansumm::cmd_plan(cfg);
  if (verify->parsed()) result = plansumm::cmd_verify(cfg);

  if (!result.err.empty()) std::cerr << result.err;
  if (!result.out.empty()) {
    if (output_path.empty()) {
      std::cout << result.out;
    } else {
      std::ofstream out(output_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << output_path << "\n";
        return 1;
      }
      out << result.out;
    }
  }
  return result.exit_code;
}
