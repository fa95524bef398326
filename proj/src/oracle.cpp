#include "plansumm/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include <json.hpp>

namespace plansumm {

namespace {

struct Search {
  const PlanLibrary& plans;
  const ActionLibrary& actions;
  const Universe& universe;
  ExecutionBounds bounds;
  // sink returns false to stop the whole search
  std::function<bool(BeliefBase, std::vector<Atom>, std::vector<DecompNode>)> sink;
  bool truncated = false;
  bool stop = false;

  using Cont = std::function<void(const BeliefBase&, const std::vector<Atom>&,
                                  std::vector<DecompNode>&)>;

  void run(const BeliefBase& b, const std::vector<Atom>& trace, const std::vector<Step>& seq,
           size_t idx, int depth, std::vector<DecompNode>& nodes, const Cont& done) {
    if (stop) return;
    if (idx == seq.size()) {
      done(b, trace, nodes);
      return;
    }
    const Step& step = seq[idx];
    switch (step.kind) {
      case Step::Kind::AddBelief:
      case Step::Kind::DelBelief: {
        if (!step.atom.ground()) return;
        BeliefBase b2 = b;
        if (step.kind == Step::Kind::AddBelief)
          b2.facts.insert(step.atom);
        else
          b2.facts.erase(step.atom);
        nodes.push_back(DecompNode{step, -1, {}, {}});
        run(b2, trace, seq, idx + 1, depth, nodes, done);
        nodes.pop_back();
        return;
      }
      case Step::Kind::Act: {
        if (!step.atom.ground()) return;
        const ActionRule& rule = actions.require(step.atom.predicate, step.atom.arity());
        auto theta = mgu(rule.head, step.atom);
        if (!theta) return;
        if (!evaluate(b, rule.pre, *theta)) return;
        // delete then add
        BeliefBase b2 = b;
        for (const Atom& a : rule.del) b2.facts.erase(apply(*theta, a));
        for (const Atom& a : rule.add) b2.facts.insert(apply(*theta, a));
        std::vector<Atom> trace2 = trace;
        trace2.push_back(step.atom);
        nodes.push_back(DecompNode{step, -1, {}, {}});
        run(b2, trace2, seq, idx + 1, depth, nodes, done);
        nodes.pop_back();
        return;
      }
      case Step::Kind::Test: {
        for (const Substitution& theta : satisfying_groundings(b, step.test, universe)) {
          if (stop) return;
          std::vector<Step> rest(seq.begin() + idx + 1, seq.end());
          for (Step& s : rest) s = apply(theta, s);
          nodes.push_back(DecompNode{step, -1, theta, {}});
          run(b, trace, rest, 0, depth, nodes, done);
          nodes.pop_back();
        }
        return;
      }
      case Step::Kind::Event: {
        if (!step.atom.ground()) return;
        if (depth <= 0) {
          truncated = true;
          return;
        }
        for (const PlanRule& rule : plans.rules) {
          if (stop) return;
          if (rule.head.predicate != step.atom.predicate ||
              rule.head.arity() != step.atom.arity())
            continue;
          Substitution theta;
          for (size_t i = 0; i < rule.head.args.size(); ++i)
            theta.bind(rule.head.args[i].name, step.atom.args[i]);
          Formula ctx = apply(theta, rule.context);
          for (const Substitution& ground : satisfying_groundings(b, ctx, universe)) {
            if (stop) return;
            Substitution binding = theta.compose(ground);
            std::vector<Step> body = plansumm::apply(binding, rule.body);
            std::vector<DecompNode> child_nodes;
            Cont resume = [&, this](const BeliefBase& b2, const std::vector<Atom>& t2,
                                    std::vector<DecompNode>& sub) {
              nodes.push_back(DecompNode{step, rule.index, binding, sub});
              run(b2, t2, seq, idx + 1, depth, nodes, done);
              nodes.pop_back();
            };
            run(b, trace, body, 0, depth - 1, child_nodes, resume);
          }
        }
        return;
      }
    }
  }

  void start(const BeliefBase& b, const std::vector<Step>& program) {
    std::vector<DecompNode> nodes;
    Cont done = [this](const BeliefBase& fb, const std::vector<Atom>& tr,
                       std::vector<DecompNode>& ns) {
      if (stop) return;
      if (!sink(fb, tr, ns)) stop = true;
    };
    run(b, {}, program, 0, bounds.max_depth, nodes, done);
  }
};

struct PredicateSig {
  std::string name;
  int arity;
  auto operator<=>(const PredicateSig&) const = default;
};

void collect_formula_preds(const Formula& f, std::set<PredicateSig>& out) {
  if (f.lit) out.insert({f.lit->atom.predicate, f.lit->atom.arity()});
  for (const Formula& c : f.children) collect_formula_preds(c, out);
}

std::set<PredicateSig> domain_predicates(const PlanLibrary& plans, const ActionLibrary& actions) {
  std::set<PredicateSig> out;
  for (const PlanRule& r : plans.rules) {
    collect_formula_preds(r.context, out);
    for (const Step& s : r.body) {
      if (s.kind == Step::Kind::AddBelief || s.kind == Step::Kind::DelBelief)
        out.insert({s.atom.predicate, s.atom.arity()});
      if (s.kind == Step::Kind::Test) collect_formula_preds(s.test, out);
    }
  }
  for (const ActionRule& r : actions.rules) {
    collect_formula_preds(r.pre, out);
    for (const Atom& a : r.add) out.insert({a.predicate, a.arity()});
    for (const Atom& a : r.del) out.insert({a.predicate, a.arity()});
  }
  return out;
}

std::vector<Atom> ground_atoms_of(const std::set<PredicateSig>& preds, const Universe& universe) {
  std::vector<Atom> out;
  for (const PredicateSig& p : preds) {
    std::vector<size_t> idx(p.arity, 0);
    for (;;) {
      Atom a;
      a.predicate = p.name;
      for (int i = 0; i < p.arity; ++i)
        a.args.push_back(Term::constant(universe.constants[idx[i]]));
      out.push_back(std::move(a));
      if (p.arity == 0) break;
      size_t i = idx.size();
      bool carry = true;
      while (i > 0 && carry) {
        --i;
        carry = ++idx[i] == universe.constants.size();
        if (carry) idx[i] = 0;
      }
      if (carry) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Enumerates ground instantiations of `vars` over the universe.
std::vector<Substitution> all_groundings(const std::set<std::string>& vars,
                                         const Universe& universe) {
  std::vector<std::string> vs(vars.begin(), vars.end());
  std::vector<Substitution> out;
  if (vs.empty()) {
    out.emplace_back();
    return out;
  }
  if (universe.constants.empty()) return out;
  std::vector<size_t> idx(vs.size(), 0);
  for (;;) {
    Substitution s;
    for (size_t i = 0; i < vs.size(); ++i)
      s.bind(vs[i], Term::constant(universe.constants[idx[i]]));
    out.push_back(std::move(s));
    size_t i = idx.size();
    bool carry = true;
    while (i > 0 && carry) {
      --i;
      carry = ++idx[i] == universe.constants.size();
      if (carry) idx[i] = 0;
    }
    if (carry) return out;
  }
}

} // namespace

EnumerationResult enumerate_executions(const BeliefBase& beliefs, const std::vector<Step>& program,
                                       const PlanLibrary& plans, const ActionLibrary& actions,
                                       const Universe& universe, const ExecutionBounds& bounds) {
  EnumerationResult result;
  Search search{plans, actions, universe, bounds, {}, false, false};
  search.sink = [&](BeliefBase fb, std::vector<Atom> tr, std::vector<DecompNode> ns) {
    result.outcomes.push_back(ExecutionOutcome{std::move(fb), std::move(tr), std::move(ns)});
    if (static_cast<long>(result.outcomes.size()) >= bounds.max_outcomes) {
      search.truncated = true;
      return false;
    }
    return true;
  };
  search.start(beliefs, program);
  result.complete = !search.truncated;
  return result;
}

std::optional<ExecutionOutcome> has_successful_execution(const BeliefBase& beliefs,
                                                         const std::vector<Step>& program,
                                                         const PlanLibrary& plans,
                                                         const ActionLibrary& actions,
                                                         const Universe& universe,
                                                         const ExecutionBounds& bounds) {
  std::optional<ExecutionOutcome> found;
  Search search{plans, actions, universe, bounds, {}, false, false};
  search.sink = [&](BeliefBase fb, std::vector<Atom> tr, std::vector<DecompNode> ns) {
    found = ExecutionOutcome{std::move(fb), std::move(tr), std::move(ns)};
    return false;
  };
  search.start(beliefs, program);
  if (!found && search.truncated)
    throw BoundsExceeded("execution search truncated before finding an outcome");
  return found;
}

std::optional<ExecutionOutcome> first_goal_execution(const BeliefBase& beliefs,
                                                     const std::vector<Step>& program,
                                                     const Formula& goal,
                                                     const PlanLibrary& plans,
                                                     const ActionLibrary& actions,
                                                     const Universe& universe,
                                                     const ExecutionBounds& bounds) {
  std::optional<ExecutionOutcome> found;
  bool ground_goal = free_vars(goal).empty();
  Search search{plans, actions, universe, bounds, {}, false, false};
  search.sink = [&](BeliefBase fb, std::vector<Atom> tr, std::vector<DecompNode> ns) {
    bool satisfied = ground_goal ? evaluate(fb, goal)
                                 : !satisfying_groundings(fb, goal, universe).empty();
    if (!satisfied) return true;
    found = ExecutionOutcome{std::move(fb), std::move(tr), std::move(ns)};
    return false;
  };
  search.start(beliefs, program);
  if (!found && search.truncated)
    throw BoundsExceeded("execution search truncated before reaching the goal");
  return found;
}

std::set<Literal> oracle_must_literals(const Atom& ground_event, const PlanLibrary& plans,
                                       const ActionLibrary& actions, const Universe& universe,
                                       const ExecutionBounds& bounds,
                                       const std::vector<BeliefBase>& start_bases) {
  std::set<Literal> candidates;
  for (const Atom& a : ground_atoms_of(domain_predicates(plans, actions), universe)) {
    candidates.insert(Literal{true, a});
    candidates.insert(Literal{false, a});
  }
  std::vector<Step> program = {Step::event(ground_event)};
  bool any_execution = false;
  for (const BeliefBase& b : start_bases) {
    EnumerationResult res = enumerate_executions(b, program, plans, actions, universe, bounds);
    if (!res.complete)
      throw BoundsExceeded("must-literal oracle: enumeration truncated");
    for (const ExecutionOutcome& o : res.outcomes) {
      any_execution = true;
      for (auto it = candidates.begin(); it != candidates.end();) {
        bool holds = it->positive == o.final_beliefs.holds(it->atom);
        it = holds ? std::next(it) : candidates.erase(it);
      }
    }
  }
  if (!any_execution)
    throw NoExecutionFound("no successful execution of " + to_string(ground_event) +
                           " from any start base");
  return candidates;
}

namespace {

// Ground instances of every atom the rule's decomposition subtree can read
// (context conditions, test conditions, action preconditions). Initial values
// of any other atom cannot affect execution success.
std::vector<Atom> readable_atoms(const PlanRule& rule, const PlanLibrary& plans,
                                 const ActionLibrary& actions, const Universe& universe) {
  std::set<PredicateSig> preds;
  collect_formula_preds(rule.context, preds);
  std::set<EventType> seen;
  std::vector<const PlanRule*> frontier = {&rule};
  while (!frontier.empty()) {
    const PlanRule* r = frontier.back();
    frontier.pop_back();
    for (const Step& s : r->body) {
      switch (s.kind) {
        case Step::Kind::Test:
          collect_formula_preds(s.test, preds);
          break;
        case Step::Kind::Act:
          if (const ActionRule* ar = actions.find(s.atom.predicate, s.atom.arity()))
            collect_formula_preds(ar->pre, preds);
          break;
        case Step::Kind::Event: {
          EventType e = EventType::of(s.atom);
          if (seen.insert(e).second) {
            for (int idx : plans.rules_for(e)) {
              collect_formula_preds(plans.rules[idx].context, preds);
              frontier.push_back(&plans.rules[idx]);
            }
          }
          break;
        }
        default:
          break;
      }
    }
  }
  return ground_atoms_of(preds, universe);
}

constexpr size_t kMaxEnumeratedAtoms = 16;

} // namespace

std::vector<CoherenceViolation> validate_coherence(const PlanLibrary& plans,
                                                   const ActionLibrary& actions,
                                                   const Universe& universe,
                                                   const ExecutionBounds& bounds) {
  std::vector<CoherenceViolation> violations;
  long work = 0;
  for (const PlanRule& rule : plans.rules) {
    std::vector<Atom> atoms = readable_atoms(rule, plans, actions, universe);
    if (atoms.size() > kMaxEnumeratedAtoms)
      throw BoundsExceeded("coherence check: " + std::to_string(atoms.size()) +
                           " readable atoms for rule " + rule.id());
    for (const Substitution& theta : all_groundings(free_vars(rule.head), universe)) {
      Formula ctx = apply(theta, rule.context);
      for (size_t mask = 0; mask < (size_t{1} << atoms.size()); ++mask) {
        BeliefBase base;
        for (size_t i = 0; i < atoms.size(); ++i) {
          if (mask & (size_t{1} << i)) base.facts.insert(atoms[i]);
        }
        for (const Substitution& ground : satisfying_groundings(base, ctx, universe)) {
          if (++work > bounds.max_outcomes)
            throw BoundsExceeded("coherence check: search budget exhausted");
          std::vector<Step> body = plansumm::apply(theta.compose(ground), rule.body);
          if (!has_successful_execution(base, body, plans, actions, universe, bounds)) {
            violations.push_back(
                CoherenceViolation{rule.index, apply(theta, rule.head), ground, base});
          }
        }
      }
    }
  }
  return violations;
}

bool oracle_captures(const std::set<Literal>& literals, const std::vector<Step>& program,
                     const PlanLibrary& plans, const ActionLibrary& actions,
                     const Universe& universe, const ExecutionBounds& bounds) {
  // read/write atoms of the program's subtree bound the relevant start bases
  std::set<PredicateSig> rw;
  {
    PlanRule probe;
    probe.body = program;
    for (const Atom& a : readable_atoms(probe, plans, actions, universe))
      rw.insert({a.predicate, a.arity()});
    std::set<EventType> seen;
    std::vector<const std::vector<Step>*> frontier = {&program};
    while (!frontier.empty()) {
      const std::vector<Step>* body = frontier.back();
      frontier.pop_back();
      for (const Step& s : *body) {
        switch (s.kind) {
          case Step::Kind::AddBelief:
          case Step::Kind::DelBelief:
            rw.insert({s.atom.predicate, s.atom.arity()});
            break;
          case Step::Kind::Act:
            if (const ActionRule* ar = actions.find(s.atom.predicate, s.atom.arity())) {
              for (const Atom& a : ar->add) rw.insert({a.predicate, a.arity()});
              for (const Atom& a : ar->del) rw.insert({a.predicate, a.arity()});
            }
            break;
          case Step::Kind::Event: {
            EventType e = EventType::of(s.atom);
            if (seen.insert(e).second) {
              for (int idx : plans.rules_for(e)) frontier.push_back(&plans.rules[idx].body);
            }
            break;
          }
          default:
            break;
        }
      }
    }
  }
  std::vector<Atom> atoms = ground_atoms_of(rw, universe);
  if (atoms.size() > kMaxEnumeratedAtoms)
    throw BoundsExceeded("capture check: " + std::to_string(atoms.size()) + " relevant atoms");

  for (const Substitution& theta : all_groundings(free_vars(program), universe)) {
    std::vector<Step> ground_program = plansumm::apply(theta, program);
    for (size_t mask = 0; mask < (size_t{1} << atoms.size()); ++mask) {
      BeliefBase base;
      for (size_t i = 0; i < atoms.size(); ++i) {
        if (mask & (size_t{1} << i)) base.facts.insert(atoms[i]);
      }
      EnumerationResult res =
          enumerate_executions(base, ground_program, plans, actions, universe, bounds);
      if (!res.complete) throw BoundsExceeded("capture check: enumeration truncated");
      for (const ExecutionOutcome& o : res.outcomes) {
        for (const Atom& a : atoms) {
          std::optional<Literal> newly;
          if (!base.holds(a) && o.final_beliefs.holds(a)) newly = Literal{true, a};
          if (base.holds(a) && !o.final_beliefs.holds(a)) newly = Literal{false, a};
          if (!newly) continue;
          bool covered = std::any_of(literals.begin(), literals.end(), [&](const Literal& l) {
            return is_instance_of(*newly, l);
          });
          if (!covered) return false;
        }
      }
    }
  }
  return true;
}

namespace {

void replay_nodes(BeliefBase& b, const std::vector<DecompNode>& nodes,
                  const ActionLibrary& actions, const PlanLibrary& plans) {
  for (const DecompNode& node : nodes) {
    switch (node.step.kind) {
      case Step::Kind::AddBelief:
        b.facts.insert(node.step.atom);
        break;
      case Step::Kind::DelBelief:
        b.facts.erase(node.step.atom);
        break;
      case Step::Kind::Act: {
        const ActionRule& rule = actions.require(node.step.atom.predicate, node.step.atom.arity());
        auto theta = mgu(rule.head, node.step.atom);
        if (!theta || !evaluate(b, rule.pre, *theta))
          throw std::logic_error("replay: action no longer applicable: " + to_string(node.step));
        for (const Atom& a : rule.del) b.facts.erase(apply(*theta, a));
        for (const Atom& a : rule.add) b.facts.insert(apply(*theta, a));
        break;
      }
      case Step::Kind::Test:
        if (!evaluate(b, node.step.test, node.binding))
          throw std::logic_error("replay: test no longer satisfied: " + to_string(node.step));
        break;
      case Step::Kind::Event: {
        if (node.rule_index < 0 || node.rule_index >= static_cast<int>(plans.rules.size()))
          throw std::logic_error("replay: bad rule index");
        if (!evaluate(b, plans.rules[node.rule_index].context, node.binding))
          throw std::logic_error("replay: context no longer satisfied for " +
                                 to_string(node.step));
        replay_nodes(b, node.children, actions, plans);
        break;
      }
    }
  }
}

nlohmann::json node_to_json(const DecompNode& node) {
  nlohmann::json j;
  j["step"] = to_string(node.step);
  if (node.step.kind == Step::Kind::Event) j["rule"] = node.rule_index;
  if (!node.binding.empty()) {
    nlohmann::json b;
    for (const auto& [v, t] : node.binding.bindings()) b["?" + v] = to_string(t);
    j["binding"] = b;
  }
  if (!node.children.empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (const DecompNode& c : node.children) kids.push_back(node_to_json(c));
    j["children"] = kids;
  }
  return j;
}

} // namespace

BeliefBase replay(const BeliefBase& initial, const std::vector<DecompNode>& tree,
                  const ActionLibrary& actions, const PlanLibrary& plans) {
  BeliefBase b = initial;
  replay_nodes(b, tree, actions, plans);
  return b;
}

std::string outcome_to_json(const ExecutionOutcome& outcome) {
  nlohmann::json j;
  nlohmann::json trace = nlohmann::json::array();
  for (const Atom& a : outcome.trace) trace.push_back(to_string(a));
  j["trace"] = trace;
  nlohmann::json final_beliefs = nlohmann::json::array();
  for (const Atom& a : outcome.final_beliefs.facts) final_beliefs.push_back(to_string(a));
  j["final"] = final_beliefs;
  nlohmann::json tree = nlohmann::json::array();
  for (const DecompNode& n : outcome.tree) tree.push_back(node_to_json(n));
  j["tree"] = tree;
  return j.dump();
}

} // namespace plansumm
