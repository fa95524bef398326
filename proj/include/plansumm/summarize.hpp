#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plansumm/core.hpp"
#include "plansumm/dsl.hpp"

namespace plansumm {

// Precondition/effect summarization: rankings, postconditions, the
// mentioned-literal closure, Must-/May-Undone and the bottom-up summary
// extraction.

class RecursionError : public std::runtime_error {
 public:
  explicit RecursionError(std::vector<std::string> cycle_path);
  std::vector<std::string> cycle; // event type keys, first repeated at the end
};

class MissingSummary : public std::runtime_error {
 public:
  explicit MissingSummary(const std::string& subject);
  std::string subject;
};

struct Ranking {
  std::map<EventType, int> ranks; // parent strictly above every child

  int rank_of(const EventType& e) const;
};

// A summarized subject: an event-goal type, a plan body, or a primitive step.
struct Subject {
  enum class Kind { Event, Body, Step };

  Kind kind = Kind::Step;
  EventType event;   // Kind::Event
  Atom event_head;   // Kind::Event: canonical head (defines the parameters)
  int rule_index = -1; // Kind::Body
  Step step;         // Kind::Step

  static Subject for_event(EventType e, Atom head);
  static Subject for_body(int rule_index);
  static Subject for_step(Step s);

  std::string key() const;
};

// The tuple <subject, precondition, must literals, mentioned literals>.
// The precondition is absent (epsilon) exactly when the subject is not an
// event; must is always a syntactic subset of mentioned.
struct SummaryInfo {
  Subject subject;
  std::optional<Formula> precondition;
  std::set<Literal> must;
  std::set<Literal> mentioned;
};

struct SummaryTable {
  std::map<std::string, SummaryInfo> entries; // at most one per subject

  void insert(SummaryInfo info);
  const SummaryInfo* find(const std::string& key) const;
  const SummaryInfo& require(const std::string& key) const; // MissingSummary
  const SummaryInfo& require_step(const Step& s) const;
  const SummaryInfo* find_event(const EventType& e) const;

  // Event entries in key order.
  std::vector<const SummaryInfo*> event_entries() const;
};

// Event types of events occurring in bodies of rules handling e.
std::set<EventType> children(const EventType& e, const PlanLibrary& plans);

// Leaf events rank 0, each parent 1 + max child rank. Throws RecursionError
// when the children relation is cyclic.
Ranking compute_ranking(const PlanLibrary& plans);

// Postcondition of a primitive step (not an Event). Throws UnknownAction.
std::set<Literal> post(const Step& step, const ActionLibrary& actions);

// Recursive mentioned-literal closure; representatives up to renaming.
std::set<Literal> compute_mnt(const std::vector<Step>& body, const PlanLibrary& plans,
                              const ActionLibrary& actions, int depth_guard = 256);
std::set<Literal> compute_mnt(const EventType& e, const PlanLibrary& plans,
                              const ActionLibrary& actions, int depth_guard = 256);

// l is definitely negated by a later step: some step in `rest` has a must
// literal whose complement equals l syntactically.
bool must_undone(const Literal& l, std::span<const Step> rest, const SummaryTable& delta);

struct MayUndoneWitness {
  int index = 0;       // position within `rest`
  Literal undoing;     // the mentioned literal responsible
  Substitution theta;  // restricted to l's variables
};

// l is possibly negated: some step has a mentioned literal l' (renamed apart
// from l) with l theta = complement(l') theta. The witness variant returns the
// earliest step, then the canonically smallest literal.
bool may_undone(const Literal& l, std::span<const Step> rest, const SummaryTable& delta);
std::optional<MayUndoneWitness> may_undone_witness(const Literal& l, std::span<const Step> rest,
                                                   const SummaryTable& delta);

// Summary of a plan body. delta_in must hold summaries for every primitive
// step and for the event type of every event step in the body.
SummaryInfo summ_plan(const std::vector<Step>& body, const SummaryTable& delta_in,
                      Renamer& renamer, Subject subject = Subject::for_body(-1));

// Summary of an event-goal type from the summaries of its rule bodies
// (keyed "body:<rule index>" in delta). Zero rules yields <e, false, {}, {}>.
SummaryInfo summ_event(const EventType& e, const PlanLibrary& plans, const SummaryTable& delta,
                       Renamer& renamer);

// Bottom-up summary extraction. summ() returns event entries only; summ_full()
// additionally keeps the primitive-step and plan-body entries.
SummaryTable summ(const PlanLibrary& plans, const ActionLibrary& actions);
SummaryTable summ_full(const PlanLibrary& plans, const ActionLibrary& actions);

} // namespace plansumm
