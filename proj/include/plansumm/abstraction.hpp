#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plansumm/oracle.hpp"
#include "plansumm/summarize.hpp"

namespace plansumm {

// Abstract-operator export, plan correctness classification, the
// definitely-incorrect resolution loop and a desk-scale forward planner.

class NoPlan : public std::runtime_error {
 public:
  explicit NoPlan(const std::string& what) : std::runtime_error(what) {}
};

struct AbstractOperator {
  std::string name;                // event name + arity marker
  std::vector<std::string> params; // head vars, then extra precondition vars
  Formula pre;
  std::set<Literal> post; // the must set; every variable occurs in params
  EventType event;
  Atom head; // canonical event head
};

struct PlanStep {
  bool is_abstract = false;
  Atom ground_atom;      // action atom or event atom
  Substitution grounding; // the substitution the planner applied (over params)
};

struct GroundPlan {
  std::vector<PlanStep> steps;
  BeliefBase initial;
  Formula goal = Formula::truth();
};

struct Witness {
  Literal pre_literal;    // l, with the planner's grounding applied
  int step_index = 0;     // i, 1-based
  int undoing_step = 0;   // k, 1-based
  Literal undoing_literal; // l'
  Substitution theta;
};

enum class VerdictKind { Correct, PotentiallyIncorrect, DefinitelyIncorrect };

struct Verdict {
  VerdictKind kind = VerdictKind::Correct;
  std::vector<Witness> witnesses;                    // PotentiallyIncorrect
  std::optional<ExecutionOutcome> witness_execution; // resolve: Correct
};

std::string to_string(VerdictKind k);

// One operator per event entry of the table, sorted by name.
std::vector<AbstractOperator> build_abstract_operators(const SummaryTable& table);

// The polynomial §6 check over the plan's precondition literals. Returns
// Correct or PotentiallyIncorrect (with all failing witnesses).
Verdict classify_plan(const GroundPlan& plan, const SummaryTable& table,
                      const ActionLibrary& actions);

// Requires a PotentiallyIncorrect plan (throws std::invalid_argument
// otherwise). Looks for a goal-reaching HTN decomposition: found -> Correct
// with the witness execution attached, none -> DefinitelyIncorrect.
Verdict resolve(const GroundPlan& plan, const SummaryTable& table, const PlanLibrary& plans,
                const ActionLibrary& actions, const Universe& universe,
                const ExecutionBounds& bounds);

// Breadth-first forward search over ground operator applications; returns a
// shortest plan achieving the ground goal, skipping plans in `exclude`.
// Plan length is capped by bounds.max_depth, expansions by
// bounds.max_outcomes (BoundsExceeded). Throws NoPlan when exhausted.
GroundPlan plan_classical(const BeliefBase& initial, const Formula& goal,
                          const ActionLibrary& actions,
                          const std::vector<AbstractOperator>& abstract_ops,
                          const Universe& universe, const ExecutionBounds& bounds,
                          const std::set<std::vector<std::string>>& exclude = {});

// The §6 loop: plan, classify, resolve when flagged, exclude definitely
// incorrect plans and repeat. Returns the first accepted plan together with a
// goal-reaching decomposition.
std::pair<GroundPlan, ExecutionOutcome> plan_abstract_verified(const BeliefBase& initial,
                                                               const Formula& goal,
                                                               const PlanLibrary& plans,
                                                               const ActionLibrary& actions,
                                                               const Universe& universe,
                                                               const ExecutionBounds& bounds);

// PDDL-subset rendering of primitive and abstract operators; abstract ones
// are flagged with a ";; abstract" comment line.
std::string export_pddl_like(const ActionLibrary& actions,
                             const std::vector<AbstractOperator>& abstract_ops);

// Step sequence key used by the exclusion set.
std::vector<std::string> plan_key(const GroundPlan& plan);

} // namespace plansumm
