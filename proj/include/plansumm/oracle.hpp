#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plansumm/core.hpp"
#include "plansumm/dsl.hpp"

namespace plansumm {

// Ground HTN-execution enumerator over the plan-type transition semantics,
// plus brute-force checkers for coherence, must literals and capture.

class BoundsExceeded : public std::runtime_error {
 public:
  explicit BoundsExceeded(const std::string& what) : std::runtime_error(what) {}
};

class NoExecutionFound : public std::runtime_error {
 public:
  explicit NoExecutionFound(const std::string& what) : std::runtime_error(what) {}
};

struct ExecutionBounds {
  int max_depth = 32;            // event decomposition nesting
  long max_outcomes = 1'000'000; // enumeration/search budget
};

// One recorded choice point. Events carry the selected rule and the rule
// grounding; tests carry the chosen grounding of their free variables.
struct DecompNode {
  Step step;
  int rule_index = -1;
  Substitution binding;
  std::vector<DecompNode> children;
};

struct ExecutionOutcome {
  BeliefBase final_beliefs;
  std::vector<Atom> trace; // executed actions in order
  std::vector<DecompNode> tree;
};

struct EnumerationResult {
  std::vector<ExecutionOutcome> outcomes;
  bool complete = true; // false when a bound truncated the search
};

// All successful HTN executions of the (ground) program up to bounds, in
// deterministic order: rules by library order, groundings lexicographic.
// Failure recovery is never applied.
EnumerationResult enumerate_executions(const BeliefBase& beliefs, const std::vector<Step>& program,
                                       const PlanLibrary& plans, const ActionLibrary& actions,
                                       const Universe& universe, const ExecutionBounds& bounds);

// First outcome in deterministic order; absent if none. Throws BoundsExceeded
// when the search was truncated before any outcome was found.
std::optional<ExecutionOutcome> has_successful_execution(const BeliefBase& beliefs,
                                                         const std::vector<Step>& program,
                                                         const PlanLibrary& plans,
                                                         const ActionLibrary& actions,
                                                         const Universe& universe,
                                                         const ExecutionBounds& bounds);

// First outcome whose final beliefs satisfy the (ground) goal formula.
std::optional<ExecutionOutcome> first_goal_execution(const BeliefBase& beliefs,
                                                     const std::vector<Step>& program,
                                                     const Formula& goal,
                                                     const PlanLibrary& plans,
                                                     const ActionLibrary& actions,
                                                     const Universe& universe,
                                                     const ExecutionBounds& bounds);

// Ground literals (over the libraries' predicates and the universe) true in
// the final beliefs of every enumerated successful execution of the event
// from every provided start base. Throws NoExecutionFound when no start base
// admits any execution.
std::set<Literal> oracle_must_literals(const Atom& ground_event, const PlanLibrary& plans,
                                       const ActionLibrary& actions, const Universe& universe,
                                       const ExecutionBounds& bounds,
                                       const std::vector<BeliefBase>& start_bases);

struct CoherenceViolation {
  int rule_index = -1;
  Atom head_instance;
  Substitution context_grounding;
  BeliefBase base;
};

// Checks every rule, ground head instance and belief base over the rule's
// readable atoms: whenever the grounded context holds, a successful execution
// of the grounded body must exist.
std::vector<CoherenceViolation> validate_coherence(const PlanLibrary& plans,
                                                   const ActionLibrary& actions,
                                                   const Universe& universe,
                                                   const ExecutionBounds& bounds);

// Appendix capture check: every literal newly true at the end of some
// enumerated successful execution of some ground instance of P unifies with a
// member of L.
bool oracle_captures(const std::set<Literal>& literals, const std::vector<Step>& program,
                     const PlanLibrary& plans, const ActionLibrary& actions,
                     const Universe& universe, const ExecutionBounds& bounds);

// Re-applies the decomposition tree; returns the reproduced final beliefs.
// Throws std::logic_error when a recorded choice no longer applies.
BeliefBase replay(const BeliefBase& initial, const std::vector<DecompNode>& tree,
                  const ActionLibrary& actions, const PlanLibrary& plans);

// {"trace":[...],"final":[...],"tree":[...]} rendering for the CLI.
std::string outcome_to_json(const ExecutionOutcome& outcome);

} // namespace plansumm
