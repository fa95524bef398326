#include "plansumm/summarize.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace plansumm {

namespace {

std::string join_cycle(const std::vector<std::string>& cycle) {
  std::string out;
  for (size_t i = 0; i < cycle.size(); ++i) {
    if (i) out += " -> ";
    out += cycle[i];
  }
  return out;
}

} // namespace

RecursionError::RecursionError(std::vector<std::string> cycle_path)
    : std::runtime_error("recursive plan-library: cycle " + join_cycle(cycle_path)),
      cycle(std::move(cycle_path)) {}

MissingSummary::MissingSummary(const std::string& subject_)
    : std::runtime_error("no summary for " + subject_), subject(subject_) {}

int Ranking::rank_of(const EventType& e) const {
  auto it = ranks.find(e);
  if (it == ranks.end()) throw MissingSummary(e.key());
  return it->second;
}

Subject Subject::for_event(EventType e, Atom head) {
  Subject s;
  s.kind = Kind::Event;
  s.event = std::move(e);
  s.event_head = std::move(head);
  return s;
}

Subject Subject::for_body(int rule_index) {
  Subject s;
  s.kind = Kind::Body;
  s.rule_index = rule_index;
  return s;
}

Subject Subject::for_step(Step st) {
  Subject s;
  s.kind = Kind::Step;
  s.step = std::move(st);
  return s;
}

std::string Subject::key() const {
  switch (kind) {
    case Kind::Event:
      return event.key();
    case Kind::Body:
      return "body:" + std::to_string(rule_index);
    case Kind::Step:
      return to_string(step);
  }
  return "";
}

void SummaryTable::insert(SummaryInfo info) {
  std::string key = info.subject.key();
  auto [it, inserted] = entries.emplace(std::move(key), std::move(info));
  if (!inserted) throw std::logic_error("duplicate summary for " + it->first);
}

const SummaryInfo* SummaryTable::find(const std::string& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

const SummaryInfo& SummaryTable::require(const std::string& key) const {
  const SummaryInfo* info = find(key);
  if (!info) throw MissingSummary(key);
  return *info;
}

const SummaryInfo& SummaryTable::require_step(const Step& s) const {
  return require(to_string(s));
}

const SummaryInfo* SummaryTable::find_event(const EventType& e) const { return find(e.key()); }

std::vector<const SummaryInfo*> SummaryTable::event_entries() const {
  std::vector<const SummaryInfo*> out;
  for (const auto& [key, info] : entries) {
    if (info.subject.kind == Subject::Kind::Event) out.push_back(&info);
  }
  return out;
}

std::set<EventType> children(const EventType& e, const PlanLibrary& plans) {
  std::set<EventType> out;
  for (int idx : plans.rules_for(e)) {
    for (const Step& s : plans.rules[idx].body) {
      if (s.kind == Step::Kind::Event) out.insert(EventType::of(s.atom));
    }
  }
  return out;
}

namespace {

enum class Color { White, Grey, Black };

int visit_rank(const EventType& e, const PlanLibrary& plans, std::map<EventType, int>& ranks,
               std::map<EventType, Color>& color, std::vector<EventType>& stack) {
  Color& c = color[e];
  if (c == Color::Grey) {
    std::vector<std::string> cycle;
    auto it = std::find(stack.begin(), stack.end(), e);
    for (; it != stack.end(); ++it) cycle.push_back(it->key());
    cycle.push_back(e.key());
    throw RecursionError(std::move(cycle));
  }
  if (c == Color::Black) return ranks.at(e);
  c = Color::Grey;
  stack.push_back(e);
  int rank = 0;
  for (const EventType& child : children(e, plans)) {
    rank = std::max(rank, 1 + visit_rank(child, plans, ranks, color, stack));
  }
  stack.pop_back();
  color[e] = Color::Black;
  ranks[e] = rank;
  return rank;
}

} // namespace

Ranking compute_ranking(const PlanLibrary& plans) {
  Ranking r;
  std::map<EventType, Color> color;
  std::vector<EventType> stack;
  for (const EventType& e : plans.event_types) {
    visit_rank(e, plans, r.ranks, color, stack);
  }
  return r;
}

std::set<Literal> post(const Step& step, const ActionLibrary& actions) {
  switch (step.kind) {
    case Step::Kind::Test:
      return {};
    case Step::Kind::AddBelief:
      return {Literal{true, step.atom}};
    case Step::Kind::DelBelief:
      return {Literal{false, step.atom}};
    case Step::Kind::Act: {
      const ActionRule& rule = actions.require(step.atom.predicate, step.atom.arity());
      // rename the rule apart so occurrence variables cannot be captured
      auto [fresh_head, ren] = rename_apart(rule.head, free_vars(step.atom));
      auto theta_opt = mgu(fresh_head, step.atom);
      assert(theta_opt);
      Substitution theta = ren.compose(*theta_opt);
      std::set<Literal> out;
      for (const Atom& a : rule.add) out.insert(Literal{true, apply(theta, a)});
      for (const Atom& a : rule.del) out.insert(Literal{false, apply(theta, a)});
      return out;
    }
    case Step::Kind::Event:
      throw std::invalid_argument("post: event steps have no primitive postcondition");
  }
  return {};
}

namespace {

// Renames every variable of the payload except `keep` to a fresh name.
Substitution composite_rename(const std::set<std::string>& vars, const std::set<std::string>& keep,
                              const std::set<std::string>& avoid, Renamer& renamer) {
  std::set<std::string> blocked = avoid;
  blocked.insert(vars.begin(), vars.end());
  blocked.insert(keep.begin(), keep.end());
  std::map<std::string, Term> m;
  for (const std::string& v : vars) {
    if (keep.count(v)) continue;
    std::string f = renamer.fresh(v, blocked);
    blocked.insert(f);
    m.emplace(v, Term::variable(f));
  }
  return Substitution(std::move(m));
}

std::set<std::string> vars_of_literals(const std::set<Literal>& ls) {
  std::set<std::string> vs;
  for (const Literal& l : ls) {
    auto sub = free_vars(l);
    vs.insert(sub.begin(), sub.end());
  }
  return vs;
}

std::set<Literal> apply_all(const Substitution& s, const std::set<Literal>& ls) {
  std::set<Literal> out;
  for (const Literal& l : ls) out.insert(apply(s, l));
  return out;
}

// Two literals equal up to a bijective renaming of analysis-fresh variables;
// user-written variables must match exactly.
bool anon_variant(const Literal& a, const Literal& b, const Renamer& renamer) {
  if (a.positive != b.positive || a.atom.predicate != b.atom.predicate ||
      a.atom.args.size() != b.atom.args.size())
    return false;
  std::map<std::string, std::string> fwd, bwd;
  for (size_t i = 0; i < a.atom.args.size(); ++i) {
    const Term& x = a.atom.args[i];
    const Term& y = b.atom.args[i];
    if (x.is_variable && y.is_variable && renamer.created(x.name) && renamer.created(y.name)) {
      auto [fit, fnew] = fwd.emplace(x.name, y.name);
      auto [bit, bnew] = bwd.emplace(y.name, x.name);
      if (fit->second != y.name || bit->second != x.name) return false;
    } else if (x != y) {
      return false;
    }
  }
  return true;
}

// Keeps one representative per anonymous-renaming class. Literals in `first`
// are always retained, so a must set stays a syntactic subset.
std::set<Literal> dedup_anon(const std::set<Literal>& in, const Renamer& renamer,
                             const std::set<Literal>& first = {}) {
  std::vector<Literal> retained(first.begin(), first.end());
  for (const Literal& l : in) {
    if (first.count(l)) continue;
    bool dup = std::any_of(retained.begin(), retained.end(),
                           [&](const Literal& r) { return anon_variant(l, r, renamer); });
    if (!dup) retained.push_back(l);
  }
  return std::set<Literal>(retained.begin(), retained.end());
}

struct Instantiated {
  std::optional<Formula> precondition;
  std::set<Literal> must;
  std::set<Literal> mentioned;
};

// Alg. 2 line 1: rename the type summary apart, then bind its head to the
// occurrence; summary variables not bound this way stay fresh.
Instantiated instantiate_for_occurrence(const Atom& type_head, const SummaryInfo& type_info,
                                        const Atom& occurrence, Renamer& renamer) {
  std::set<std::string> vars = free_vars(type_head);
  if (type_info.precondition) {
    auto vs = free_vars(*type_info.precondition);
    vars.insert(vs.begin(), vs.end());
  }
  auto mvars = vars_of_literals(type_info.must);
  vars.insert(mvars.begin(), mvars.end());
  auto nvars = vars_of_literals(type_info.mentioned);
  vars.insert(nvars.begin(), nvars.end());

  Substitution ren = composite_rename(vars, {}, free_vars(occurrence), renamer);
  auto theta_opt = mgu(apply(ren, type_head), occurrence);
  assert(theta_opt);
  Substitution inst = ren.compose(*theta_opt);

  Instantiated out;
  if (type_info.precondition) out.precondition = apply(inst, *type_info.precondition);
  out.must = apply_all(inst, type_info.must);
  out.mentioned = apply_all(inst, type_info.mentioned);
  return out;
}

bool must_undone_in(const Literal& l, std::span<const SummaryInfo* const> rest) {
  Literal target = l.complement();
  for (const SummaryInfo* info : rest) {
    if (info->must.count(target)) return true;
  }
  return false;
}

std::optional<MayUndoneWitness> may_undone_in(const Literal& l,
                                              std::span<const SummaryInfo* const> rest) {
  for (size_t k = 0; k < rest.size(); ++k) {
    // canonical rendering order for the reported witness
    std::vector<const Literal*> ls;
    for (const Literal& lp : rest[k]->mentioned) ls.push_back(&lp);
    std::sort(ls.begin(), ls.end(),
              [](const Literal* a, const Literal* b) { return to_string(*a) < to_string(*b); });
    for (const Literal* lp : ls) {
      if (auto theta = unify_renamed_apart(l, lp->complement())) {
        return MayUndoneWitness{static_cast<int>(k), *lp, *theta};
      }
    }
  }
  return std::nullopt;
}

std::vector<const SummaryInfo*> resolve_steps(std::span<const Step> steps,
                                              const SummaryTable& delta) {
  std::vector<const SummaryInfo*> out;
  out.reserve(steps.size());
  for (const Step& s : steps) out.push_back(&delta.require_step(s));
  return out;
}

} // namespace

bool must_undone(const Literal& l, std::span<const Step> rest, const SummaryTable& delta) {
  auto infos = resolve_steps(rest, delta);
  return must_undone_in(l, infos);
}

bool may_undone(const Literal& l, std::span<const Step> rest, const SummaryTable& delta) {
  auto infos = resolve_steps(rest, delta);
  return may_undone_in(l, infos).has_value();
}

std::optional<MayUndoneWitness> may_undone_witness(const Literal& l, std::span<const Step> rest,
                                                   const SummaryTable& delta) {
  auto infos = resolve_steps(rest, delta);
  return may_undone_in(l, infos);
}

SummaryInfo summ_plan(const std::vector<Step>& body, const SummaryTable& delta_in,
                      Renamer& renamer, Subject subject) {
  // per-step summaries; identical steps share one entry
  std::map<std::string, SummaryInfo> local;
  for (const Step& s : body) {
    std::string key = to_string(s);
    if (local.count(key)) continue;
    if (s.kind == Step::Kind::Event) {
      EventType type = EventType::of(s.atom);
      const SummaryInfo* type_info = delta_in.find_event(type);
      if (!type_info) throw MissingSummary(type.key());
      Instantiated inst =
          instantiate_for_occurrence(type_info->subject.event_head, *type_info, s.atom, renamer);
      SummaryInfo occ;
      occ.subject = Subject::for_step(s);
      occ.precondition = inst.precondition;
      occ.must = std::move(inst.must);
      occ.mentioned = std::move(inst.mentioned);
      local.emplace(key, std::move(occ));
    } else {
      local.emplace(key, delta_in.require_step(s));
    }
  }

  std::vector<const SummaryInfo*> infos;
  infos.reserve(body.size());
  for (const Step& s : body) infos.push_back(&local.at(to_string(s)));

  std::set<Literal> must_out;
  std::set<Literal> mn_out;
  for (size_t i = 0; i < body.size(); ++i) {
    std::span<const SummaryInfo* const> suffix(infos.data() + i + 1, body.size() - i - 1);
    for (const Literal& l : infos[i]->must) {
      if (!may_undone_in(l, suffix)) must_out.insert(l);
    }
    for (const Literal& l : infos[i]->mentioned) {
      if (!must_undone_in(l, suffix)) mn_out.insert(l);
    }
  }

  SummaryInfo out;
  out.subject = std::move(subject);
  out.must = std::move(must_out);
  out.mentioned = dedup_anon(mn_out, renamer, out.must);
  assert(std::includes(out.mentioned.begin(), out.mentioned.end(), out.must.begin(),
                       out.must.end()));
  return out;
}

SummaryInfo summ_event(const EventType& e, const PlanLibrary& plans, const SummaryTable& delta,
                       Renamer& renamer) {
  Atom type_head = plans.canonical_head(e);
  std::set<std::string> type_vars = free_vars(type_head);

  std::vector<Formula> disjuncts;
  std::vector<std::set<Literal>> must_sets;
  std::set<Literal> mentioned;

  for (int idx : plans.rules_for(e)) {
    const PlanRule& rule = plans.rules[idx];
    const SummaryInfo& body_info = delta.require("body:" + std::to_string(idx));

    // rename rule-local variables, then map the rule head onto the type head
    std::set<std::string> head_vars = free_vars(rule.head);
    std::set<std::string> vars = free_vars(rule.context);
    auto mv = vars_of_literals(body_info.must);
    vars.insert(mv.begin(), mv.end());
    auto nv = vars_of_literals(body_info.mentioned);
    vars.insert(nv.begin(), nv.end());
    Substitution ren = composite_rename(vars, head_vars, type_vars, renamer);

    Substitution theta;
    for (size_t i = 0; i < rule.head.args.size(); ++i)
      theta.bind(rule.head.args[i].name, type_head.args[i]);
    Substitution inst = ren.compose(theta);

    disjuncts.push_back(apply(inst, rule.context));
    must_sets.push_back(apply_all(inst, body_info.must));
    auto mn = apply_all(inst, body_info.mentioned);
    mentioned.insert(mn.begin(), mn.end());
  }

  SummaryInfo out;
  out.subject = Subject::for_event(e, type_head);
  if (disjuncts.empty()) {
    out.precondition = Formula::falsity();
  } else if (disjuncts.size() == 1) {
    out.precondition = disjuncts[0];
  } else {
    out.precondition = Formula::disj(std::move(disjuncts));
  }

  if (!must_sets.empty()) {
    std::set<Literal> acc = must_sets[0];
    for (size_t i = 1; i < must_sets.size(); ++i) {
      std::set<Literal> next;
      std::set_intersection(acc.begin(), acc.end(), must_sets[i].begin(), must_sets[i].end(),
                            std::inserter(next, next.begin()));
      acc = std::move(next);
    }
    for (const Literal& l : acc) {
      auto lv = free_vars(l);
      if (std::includes(type_vars.begin(), type_vars.end(), lv.begin(), lv.end()))
        out.must.insert(l);
    }
  }
  out.mentioned = dedup_anon(mentioned, renamer, out.must);
  return out;
}

namespace {

std::set<std::string> library_vars(const PlanLibrary& plans, const ActionLibrary& actions) {
  std::set<std::string> vs;
  auto absorb = [&vs](std::set<std::string> sub) { vs.insert(sub.begin(), sub.end()); };
  for (const PlanRule& r : plans.rules) {
    absorb(free_vars(r.head));
    absorb(free_vars(r.context));
    absorb(free_vars(r.body));
  }
  for (const ActionRule& r : actions.rules) {
    absorb(free_vars(r.head));
    absorb(free_vars(r.pre));
    for (const Atom& a : r.add) absorb(free_vars(a));
    for (const Atom& a : r.del) absorb(free_vars(a));
  }
  return vs;
}

SummaryTable summ_impl(const PlanLibrary& plans, const ActionLibrary& actions, bool full) {
  Ranking ranking = compute_ranking(plans);

  Renamer renamer;
  renamer.reserve(library_vars(plans, actions));

  SummaryTable table;
  for (const PlanRule& r : plans.rules) {
    for (const Step& s : r.body) {
      if (s.kind == Step::Kind::Event) continue;
      if (table.find(to_string(s))) continue;
      SummaryInfo info;
      info.subject = Subject::for_step(s);
      info.must = post(s, actions);
      info.mentioned = info.must;
      table.insert(std::move(info));
    }
  }

  std::map<int, std::vector<EventType>> by_rank;
  for (const EventType& e : plans.event_types) by_rank[ranking.rank_of(e)].push_back(e);

  for (const auto& [rank, events] : by_rank) {
    for (const EventType& e : events) {
      for (int idx : plans.rules_for(e)) {
        table.insert(
            summ_plan(plans.rules[idx].body, table, renamer, Subject::for_body(idx)));
      }
      table.insert(summ_event(e, plans, table, renamer));
    }
  }

  if (full) return table;
  SummaryTable events_only;
  for (const auto& [key, info] : table.entries) {
    if (info.subject.kind == Subject::Kind::Event) events_only.insert(info);
  }
  return events_only;
}

struct MntContext {
  const PlanLibrary& plans;
  const ActionLibrary& actions;
  Renamer renamer;
  std::map<EventType, std::set<Literal>> memo;
  std::set<EventType> in_progress;

  std::set<Literal> event_mnt(const EventType& e, int depth);
  std::set<Literal> steps_mnt(const std::vector<Step>& body, int depth);
};

std::set<Literal> MntContext::steps_mnt(const std::vector<Step>& body, int depth) {
  std::set<Literal> out;
  for (const Step& s : body) {
    if (s.kind != Step::Kind::Event) {
      auto p = post(s, actions);
      out.insert(p.begin(), p.end());
      continue;
    }
    EventType type = EventType::of(s.atom);
    std::set<Literal> type_mnt = event_mnt(type, depth - 1);
    SummaryInfo as_info;
    as_info.mentioned = std::move(type_mnt);
    Instantiated inst =
        instantiate_for_occurrence(plans.canonical_head(type), as_info, s.atom, renamer);
    out.insert(inst.mentioned.begin(), inst.mentioned.end());
  }
  return out;
}

std::set<Literal> MntContext::event_mnt(const EventType& e, int depth) {
  if (auto it = memo.find(e); it != memo.end()) return it->second;
  if (depth <= 0 || in_progress.count(e)) throw RecursionError({e.key(), e.key()});
  in_progress.insert(e);
  Atom type_head = plans.canonical_head(e);
  std::set<std::string> type_vars = free_vars(type_head);
  std::set<Literal> out;
  for (int idx : plans.rules_for(e)) {
    const PlanRule& rule = plans.rules[idx];
    std::set<Literal> body_mnt = steps_mnt(rule.body, depth - 1);
    Substitution ren =
        composite_rename(vars_of_literals(body_mnt), free_vars(rule.head), type_vars, renamer);
    Substitution theta;
    for (size_t i = 0; i < rule.head.args.size(); ++i)
      theta.bind(rule.head.args[i].name, type_head.args[i]);
    auto mapped = apply_all(ren.compose(theta), body_mnt);
    out.insert(mapped.begin(), mapped.end());
  }
  in_progress.erase(e);
  out = dedup_anon(out, renamer);
  memo.emplace(e, out);
  return out;
}

} // namespace

std::set<Literal> compute_mnt(const std::vector<Step>& body, const PlanLibrary& plans,
                              const ActionLibrary& actions, int depth_guard) {
  MntContext ctx{plans, actions, {}, {}, {}};
  ctx.renamer.reserve(library_vars(plans, actions));
  return dedup_anon(ctx.steps_mnt(body, depth_guard), ctx.renamer);
}

std::set<Literal> compute_mnt(const EventType& e, const PlanLibrary& plans,
                              const ActionLibrary& actions, int depth_guard) {
  MntContext ctx{plans, actions, {}, {}, {}};
  ctx.renamer.reserve(library_vars(plans, actions));
  return ctx.event_mnt(e, depth_guard);
}

SummaryTable summ(const PlanLibrary& plans, const ActionLibrary& actions) {
  return summ_impl(plans, actions, /*full=*/false);
}

SummaryTable summ_full(const PlanLibrary& plans, const ActionLibrary& actions) {
  return summ_impl(plans, actions, /*full=*/true);
}

} // namespace plansumm
