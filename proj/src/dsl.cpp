#include "plansumm/dsl.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace plansumm {

Step Step::act(Atom a) { return Step{Kind::Act, std::move(a), {}}; }
Step Step::event(Atom a) { return Step{Kind::Event, std::move(a), {}}; }
Step Step::add_belief(Atom a) { return Step{Kind::AddBelief, std::move(a), {}}; }
Step Step::del_belief(Atom a) { return Step{Kind::DelBelief, std::move(a), {}}; }
Step Step::test_cond(Formula f) { return Step{Kind::Test, {}, std::move(f)}; }

bool Step::ground() const {
  return kind == Kind::Test ? free_vars(test).empty() : atom.ground();
}

std::string to_string(const Step& s) {
  auto body = [&](const char* tag) {
    std::string out = "(" + std::string(tag) + " " + s.atom.predicate;
    for (const Term& t : s.atom.args) out += " " + to_string(t);
    out += ")";
    return out;
  };
  switch (s.kind) {
    case Step::Kind::Act:
      return body("act");
    case Step::Kind::Event:
      return body("event");
    case Step::Kind::AddBelief:
      return body("add");
    case Step::Kind::DelBelief:
      return body("del");
    case Step::Kind::Test:
      return "(test " + to_string(s.test) + ")";
  }
  return "";
}

Step apply(const Substitution& s, const Step& step) {
  Step out = step;
  out.atom = apply(s, out.atom);
  out.test = apply(s, out.test);
  return out;
}

std::vector<Step> apply(const Substitution& s, const std::vector<Step>& steps) {
  std::vector<Step> out;
  out.reserve(steps.size());
  for (const Step& st : steps) out.push_back(apply(s, st));
  return out;
}

std::set<std::string> free_vars(const Step& s) {
  return s.kind == Step::Kind::Test ? free_vars(s.test) : free_vars(s.atom);
}

std::set<std::string> free_vars(const std::vector<Step>& steps) {
  std::set<std::string> vs;
  for (const Step& s : steps) {
    auto sub = free_vars(s);
    vs.insert(sub.begin(), sub.end());
  }
  return vs;
}

std::vector<int> PlanLibrary::rules_for(const EventType& e) const {
  std::vector<int> out;
  for (const PlanRule& r : rules) {
    if (EventType::of(r.head) == e) out.push_back(r.index);
  }
  return out;
}

Atom PlanLibrary::canonical_head(const EventType& e) const {
  for (const PlanRule& r : rules) {
    if (EventType::of(r.head) == e) return r.head;
  }
  Atom head;
  head.predicate = e.name;
  for (int i = 1; i <= e.arity; ++i) head.args.push_back(Term::variable("x" + std::to_string(i)));
  return head;
}

const ActionRule* ActionLibrary::find(const std::string& name, int arity) const {
  for (const ActionRule& r : rules) {
    if (r.head.predicate == name && r.head.arity() == arity) return &r;
  }
  return nullptr;
}

const ActionRule& ActionLibrary::require(const std::string& name, int arity) const {
  const ActionRule* r = find(name, arity);
  if (!r) throw UnknownAction(name + "/" + std::to_string(arity));
  return *r;
}

SyntaxError::SyntaxError(int line_, int col_, const std::string& expected_)
    : std::runtime_error("syntax error at " + std::to_string(line_) + ":" + std::to_string(col_) +
                         ": expected " + expected_),
      line(line_),
      col(col_),
      expected(expected_) {}

ValidationError::ValidationError(std::string where_, const std::string& what_)
    : std::runtime_error("invalid " + where_ + ": " + what_), where(std::move(where_)) {}

UnknownAction::UnknownAction(const std::string& name_)
    : std::runtime_error("unknown action " + name_), name(name_) {}

namespace {

// ---------------------------------------------------------------- reader

struct SExpr {
  bool is_list = false;
  std::string sym;
  std::vector<SExpr> items;
  int line = 0;
  int col = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_ws();
    while (!eof()) {
      out.push_back(read());
      skip_ws();
    }
    return out;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip_ws();
    if (eof()) throw SyntaxError(line_, col_, "an expression");
    SExpr e;
    e.line = line_;
    e.col = col_;
    if (peek() == '(') {
      advance();
      e.is_list = true;
      skip_ws();
      while (!eof() && peek() != ')') {
        e.items.push_back(read());
        skip_ws();
      }
      if (eof()) throw SyntaxError(line_, col_, "')'");
      advance();
      return e;
    }
    if (peek() == ')') throw SyntaxError(line_, col_, "an expression, not ')'");
    std::string sym;
    while (!eof()) {
      char c = peek();
      if (c == '(' || c == ')' || c == ';' || c == ' ' || c == '\t' || c == '\r' || c == '\n') break;
      sym += c;
      advance();
    }
    e.sym = std::move(sym);
    return e;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

[[noreturn]] void fail(const SExpr& at, const std::string& expected) {
  throw SyntaxError(at.line, at.col, expected);
}

const SExpr& expect_list(const SExpr& e, const std::string& what) {
  if (!e.is_list) fail(e, what);
  return e;
}

const std::string& expect_symbol(const SExpr& e, const std::string& what) {
  if (e.is_list || e.sym.empty()) fail(e, what);
  return e.sym;
}

bool keyword(const SExpr& e, const char* kw) {
  return e.is_list && !e.items.empty() && !e.items[0].is_list && e.items[0].sym == kw;
}

Term parse_term(const SExpr& e) {
  const std::string& s = expect_symbol(e, "a term");
  if (s[0] == '?') {
    if (s.size() == 1) fail(e, "a variable name after '?'");
    return Term::variable(s.substr(1));
  }
  return Term::constant(s);
}

Atom parse_atom(const SExpr& e) {
  if (!e.is_list) {
    // bare symbol: 0-ary atom
    Atom a;
    a.predicate = expect_symbol(e, "an atom");
    if (a.predicate[0] == '?') fail(e, "a predicate name, not a variable");
    return a;
  }
  if (e.items.empty()) fail(e, "a predicate name");
  Atom a;
  a.predicate = expect_symbol(e.items[0], "a predicate name");
  for (size_t i = 1; i < e.items.size(); ++i) a.args.push_back(parse_term(e.items[i]));
  return a;
}

Formula parse_formula(const SExpr& e);

std::vector<Formula> parse_formula_list(const SExpr& e, size_t from) {
  std::vector<Formula> out;
  for (size_t i = from; i < e.items.size(); ++i) out.push_back(parse_formula(e.items[i]));
  if (out.empty()) fail(e, "at least one subformula");
  return out;
}

Formula parse_formula(const SExpr& e) {
  if (!e.is_list) {
    const std::string& s = expect_symbol(e, "a formula");
    if (s == "true") return Formula::truth();
    if (s == "false") return Formula::falsity();
    return Formula::literal(Literal{true, parse_atom(e)});
  }
  if (e.items.empty()) fail(e, "a formula");
  const std::string& head = expect_symbol(e.items[0], "a formula head");
  if (head == "and") return Formula::conj(parse_formula_list(e, 1));
  if (head == "or") return Formula::disj(parse_formula_list(e, 1));
  if (head == "not") {
    if (e.items.size() != 2) fail(e, "(not atom)");
    return Formula::literal(Literal{false, parse_atom(e.items[1])});
  }
  if (head == "=" || head == "!=") {
    if (e.items.size() != 3) fail(e, "(" + head + " term term)");
    Term a = parse_term(e.items[1]);
    Term b = parse_term(e.items[2]);
    return head == "=" ? Formula::eq(a, b) : Formula::neq(a, b);
  }
  return Formula::literal(Literal{true, parse_atom(e)});
}

Step parse_step(const SExpr& e) {
  expect_list(e, "a step");
  if (e.items.empty()) fail(e, "a step");
  const std::string& head = expect_symbol(e.items[0], "a step kind");
  if (head == "test") {
    if (e.items.size() != 2) fail(e, "(test formula)");
    return Step::test_cond(parse_formula(e.items[1]));
  }
  if (e.items.size() < 2) fail(e, "(" + head + " NAME term*)");
  Atom a;
  a.predicate = expect_symbol(e.items[1], "a name");
  if (a.predicate[0] == '?') fail(e.items[1], "a name, not a variable");
  for (size_t i = 2; i < e.items.size(); ++i) a.args.push_back(parse_term(e.items[i]));
  if (head == "act") return Step::act(std::move(a));
  if (head == "event") return Step::event(std::move(a));
  if (head == "add") return Step::add_belief(std::move(a));
  if (head == "del") return Step::del_belief(std::move(a));
  fail(e.items[0], "one of act/event/add/del/test");
}

// Per-library predicate arity bookkeeping. Arity is fixed per name within
// each category.
class ArityTable {
 public:
  explicit ArityTable(std::string category) : category_(std::move(category)) {}

  void note(const std::string& where, const std::string& name, int arity) {
    auto [it, inserted] = arity_.emplace(name, arity);
    if (!inserted && it->second != arity) {
      throw ValidationError(where, category_ + " " + name + " used with arity " +
                                       std::to_string(arity) + " and " +
                                       std::to_string(it->second));
    }
  }

 private:
  std::string category_;
  std::map<std::string, int> arity_;
};

void note_formula_preds(const std::string& where, const Formula& f, ArityTable& preds) {
  if (f.lit) preds.note(where, f.lit->atom.predicate, f.lit->atom.arity());
  for (const Formula& c : f.children) note_formula_preds(where, c, preds);
}

void check_distinct_head_vars(const std::string& where, const Atom& head) {
  std::set<std::string> seen;
  for (const Term& t : head.args) {
    if (!t.is_variable)
      throw ValidationError(where, "head argument " + to_string(t) + " is not a variable");
    if (!seen.insert(t.name).second)
      throw ValidationError(where, "duplicate head variable ?" + t.name);
  }
}

PlanRule parse_plan_rule(const SExpr& e, int index, ArityTable& events, ArityTable& acts,
                         ArityTable& preds) {
  const std::string where = "R" + std::to_string(index);
  if (e.items.size() != 4) fail(e, "(plan-rule (event ...) (context ...) (body ...))");
  PlanRule rule;
  rule.index = index;

  const SExpr& h = expect_list(e.items[1], "(event NAME var*)");
  if (h.items.empty() || h.items[0].is_list || h.items[0].sym != "event")
    fail(h, "(event NAME var*)");
  if (h.items.size() < 2) fail(h, "an event name");
  rule.head.predicate = expect_symbol(h.items[1], "an event name");
  for (size_t i = 2; i < h.items.size(); ++i) rule.head.args.push_back(parse_term(h.items[i]));
  check_distinct_head_vars(where, rule.head);
  events.note(where, rule.head.predicate, rule.head.arity());

  const SExpr& c = expect_list(e.items[2], "(context formula)");
  if (c.items.size() != 2 || c.items[0].is_list || c.items[0].sym != "context")
    fail(c, "(context formula)");
  rule.context = parse_formula(c.items[1]);
  note_formula_preds(where, rule.context, preds);

  const SExpr& b = expect_list(e.items[3], "(body step+)");
  if (b.items.empty() || b.items[0].is_list || b.items[0].sym != "body") fail(b, "(body step+)");
  if (b.items.size() < 2) throw ValidationError(where, "empty plan body");
  for (size_t i = 1; i < b.items.size(); ++i) {
    Step s = parse_step(b.items[i]);
    switch (s.kind) {
      case Step::Kind::Event:
        events.note(where, s.atom.predicate, s.atom.arity());
        break;
      case Step::Kind::Act:
        acts.note(where, s.atom.predicate, s.atom.arity());
        break;
      case Step::Kind::AddBelief:
      case Step::Kind::DelBelief:
        preds.note(where, s.atom.predicate, s.atom.arity());
        break;
      case Step::Kind::Test:
        note_formula_preds(where, s.test, preds);
        break;
    }
    rule.body.push_back(std::move(s));
  }
  return rule;
}

ActionRule parse_action_rule(const SExpr& e, ArityTable& acts, ArityTable& preds) {
  if (e.items.size() != 5) fail(e, "(action (NAME var*) (pre ...) (add ...) (del ...))");
  ActionRule rule;
  rule.head = parse_atom(e.items[1]);
  const std::string where = rule.head.predicate;
  check_distinct_head_vars(where, rule.head);
  acts.note(where, rule.head.predicate, rule.head.arity());

  auto section = [&](const SExpr& s, const char* tag) -> const SExpr& {
    expect_list(s, std::string("(") + tag + " ...)");
    if (s.items.empty() || s.items[0].is_list || s.items[0].sym != tag)
      fail(s, std::string("(") + tag + " ...)");
    return s;
  };

  const SExpr& pre = section(e.items[2], "pre");
  if (pre.items.size() != 2) fail(pre, "(pre formula)");
  rule.pre = parse_formula(pre.items[1]);
  note_formula_preds(where, rule.pre, preds);

  const SExpr& add = section(e.items[3], "add");
  for (size_t i = 1; i < add.items.size(); ++i) {
    Atom a = parse_atom(add.items[i]);
    preds.note(where, a.predicate, a.arity());
    rule.add.push_back(std::move(a));
  }
  const SExpr& del = section(e.items[4], "del");
  for (size_t i = 1; i < del.items.size(); ++i) {
    Atom a = parse_atom(del.items[i]);
    preds.note(where, a.predicate, a.arity());
    rule.del.push_back(std::move(a));
  }

  std::set<std::string> head_vars = free_vars(rule.head);
  std::set<std::string> used = free_vars(rule.pre);
  for (const Atom& a : rule.add) {
    auto vs = free_vars(a);
    used.insert(vs.begin(), vs.end());
  }
  for (const Atom& a : rule.del) {
    auto vs = free_vars(a);
    used.insert(vs.begin(), vs.end());
  }
  for (const std::string& v : used) {
    if (!head_vars.count(v))
      throw ValidationError(where, "variable ?" + v + " does not occur in the action head");
  }
  return rule;
}

struct ParsedLibrary {
  PlanLibrary plans;
  ActionLibrary actions;
};

ParsedLibrary parse_library(std::string_view text) {
  Reader reader(text);
  ParsedLibrary lib;
  ArityTable events("event"), acts("action"), preds("predicate");
  int next_rule = 0;
  for (const SExpr& item : reader.read_all()) {
    expect_list(item, "(plan-rule ...) or (action ...)");
    if (keyword(item, "plan-rule")) {
      lib.plans.rules.push_back(parse_plan_rule(item, next_rule++, events, acts, preds));
    } else if (keyword(item, "action")) {
      ActionRule r = parse_action_rule(item, acts, preds);
      if (lib.actions.find(r.head.predicate, r.head.arity())) {
        throw ValidationError(r.head.predicate, "more than one action-rule for " +
                                                    r.head.predicate + "/" +
                                                    std::to_string(r.head.arity()));
      }
      lib.actions.rules.push_back(std::move(r));
    } else {
      fail(item, "plan-rule or action");
    }
  }
  for (const PlanRule& r : lib.plans.rules) {
    lib.plans.event_types.insert(EventType::of(r.head));
    for (const Step& s : r.body) {
      if (s.kind == Step::Kind::Event) lib.plans.event_types.insert(EventType::of(s.atom));
    }
  }
  return lib;
}

} // namespace

PlanLibrary parse_plan_library(std::string_view text) { return parse_library(text).plans; }

ActionLibrary parse_action_library(std::string_view text) { return parse_library(text).actions; }

BeliefFile parse_belief_base(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> items = reader.read_all();
  if (items.empty() || !keyword(items[0], "universe"))
    throw SyntaxError(1, 1, "(universe NAME+)");
  std::vector<std::string> constants;
  for (size_t i = 1; i < items[0].items.size(); ++i) {
    const std::string& c = expect_symbol(items[0].items[i], "a constant name");
    if (c[0] == '?') fail(items[0].items[i], "a constant, not a variable");
    constants.push_back(c);
  }
  if (constants.empty()) fail(items[0], "at least one universe constant");

  BeliefFile bf;
  bf.universe = Universe(std::move(constants));
  if (items.size() > 1) {
    if (!keyword(items[1], "facts")) fail(items[1], "(facts atom*)");
    for (size_t i = 1; i < items[1].items.size(); ++i) {
      Atom a = parse_atom(items[1].items[i]);
      if (!a.ground()) throw ValidationError("facts", "non-ground fact " + to_string(a));
      for (const Term& t : a.args) {
        if (!bf.universe.contains(t.name))
          throw ValidationError("facts", "constant " + t.name + " not in the universe");
      }
      bf.beliefs.add(a);
    }
    if (items.size() > 2) fail(items[2], "end of file");
  }
  return bf;
}

std::vector<Step> parse_plan(std::string_view text) {
  Reader reader(text);
  std::vector<Step> plan;
  for (const SExpr& item : reader.read_all()) {
    Step s = parse_step(item);
    if (s.kind != Step::Kind::Act && s.kind != Step::Kind::Event)
      throw ValidationError("plan", "plans may contain only act/event steps, got " + to_string(s));
    if (!s.ground()) throw ValidationError("plan", "non-ground plan step " + to_string(s));
    plan.push_back(std::move(s));
  }
  return plan;
}

Formula parse_formula_text(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> items = reader.read_all();
  if (items.size() != 1) throw SyntaxError(1, 1, "exactly one formula");
  return parse_formula(items[0]);
}

Literal parse_literal_text(std::string_view text) {
  Formula f = parse_formula_text(text);
  if (f.kind != Formula::Kind::Lit) throw SyntaxError(1, 1, "a literal");
  return *f.lit;
}

Atom parse_atom_text(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> items = reader.read_all();
  if (items.size() != 1) throw SyntaxError(1, 1, "exactly one atom");
  return parse_atom(items[0]);
}

void validate_against(const PlanLibrary& plans, const ActionLibrary& actions) {
  for (const PlanRule& r : plans.rules) {
    for (const Step& s : r.body) {
      if (s.kind == Step::Kind::Act && !actions.find(s.atom.predicate, s.atom.arity()))
        throw UnknownAction(s.atom.predicate + "/" + std::to_string(s.atom.arity()));
    }
  }
}

void validate_plan_against(const std::vector<Step>& plan, const PlanLibrary& plans,
                           const ActionLibrary& actions) {
  for (const Step& s : plan) {
    if (s.kind == Step::Kind::Act) {
      if (!actions.find(s.atom.predicate, s.atom.arity()))
        throw UnknownAction(s.atom.predicate + "/" + std::to_string(s.atom.arity()));
    } else if (s.kind == Step::Kind::Event) {
      if (!plans.event_types.count(EventType::of(s.atom)))
        throw ValidationError("plan", "undeclared event " + EventType::of(s.atom).key());
    }
  }
}

namespace {

void conjunctive_context(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind == Formula::Kind::And) {
    for (const Formula& c : f.children) conjunctive_context(c, out);
  } else {
    out.push_back(&f);
  }
}

// preθ trivially inconsistent: contains false, a contradicted (dis)equality,
// or a complementary ground-or-not literal pair.
bool trivially_inconsistent(const Formula& pre, const Substitution& theta) {
  Formula g = apply(theta, pre);
  std::vector<const Formula*> cs;
  conjunctive_context(g, cs);
  std::vector<Literal> lits;
  for (const Formula* c : cs) {
    switch (c->kind) {
      case Formula::Kind::False:
        return true;
      case Formula::Kind::Neq:
        if (c->pair[0] == c->pair[1]) return true;
        break;
      case Formula::Kind::Eq:
        if (!c->pair[0].is_variable && !c->pair[1].is_variable && c->pair[0] != c->pair[1])
          return true;
        break;
      case Formula::Kind::Lit:
        lits.push_back(*c->lit);
        break;
      default:
        break;
    }
  }
  for (size_t i = 0; i < lits.size(); ++i) {
    for (size_t j = i + 1; j < lits.size(); ++j) {
      if (lits[i] == lits[j].complement()) return true;
    }
  }
  return false;
}

} // namespace

std::vector<ActionCoherenceViolation> check_action_coherence(const ActionRule& rule) {
  std::vector<ActionCoherenceViolation> out;
  for (const Atom& d : rule.del) {
    for (const Atom& a : rule.add) {
      auto theta = mgu(d, a);
      if (!theta) continue;
      if (trivially_inconsistent(rule.pre, *theta)) continue;
      out.push_back(ActionCoherenceViolation{rule.head.predicate, a, d, *theta});
    }
  }
  return out;
}

namespace {

std::string print_head(const Atom& a) {
  std::string out = "(" + a.predicate;
  for (const Term& t : a.args) out += " " + to_string(t);
  out += ")";
  return out;
}

} // namespace

std::string print_library(const PlanLibrary& plans, const ActionLibrary& actions) {
  std::ostringstream out;
  for (const PlanRule& r : plans.rules) {
    out << "(plan-rule (event " << r.head.predicate;
    for (const Term& t : r.head.args) out << " " << to_string(t);
    out << ") (context " << to_string(r.context) << ") (body";
    for (const Step& s : r.body) out << " " << to_string(s);
    out << "))\n";
  }
  for (const ActionRule& r : actions.rules) {
    out << "(action " << print_head(r.head) << " (pre " << to_string(r.pre) << ") (add";
    for (const Atom& a : r.add) out << " " << to_string(a);
    out << ") (del";
    for (const Atom& a : r.del) out << " " << to_string(a);
    out << "))\n";
  }
  return out.str();
}

std::string print_belief_file(const BeliefFile& bf) {
  std::ostringstream out;
  out << "(universe";
  for (const std::string& c : bf.universe.constants) out << " " << c;
  out << ")\n(facts";
  for (const Atom& a : bf.beliefs.facts) out << " " << to_string(a);
  out << ")\n";
  return out.str();
}

std::string print_plan(const std::vector<Step>& plan) {
  std::ostringstream out;
  for (const Step& s : plan) out << to_string(s) << "\n";
  return out.str();
}

} // namespace plansumm
