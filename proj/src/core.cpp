#include "plansumm/core.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace plansumm {

Term Term::variable(std::string n) {
  assert(!n.empty());
  return Term{true, std::move(n)};
}

Term Term::constant(std::string n) {
  assert(!n.empty());
  return Term{false, std::move(n)};
}

bool Atom::ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.ground(); });
}

Formula Formula::truth() { return Formula{}; }

Formula Formula::falsity() {
  Formula f;
  f.kind = Kind::False;
  return f;
}

Formula Formula::literal(Literal l) {
  Formula f;
  f.kind = Kind::Lit;
  f.lit = std::move(l);
  return f;
}

Formula Formula::eq(Term a, Term b) {
  Formula f;
  f.kind = Kind::Eq;
  f.pair = {std::move(a), std::move(b)};
  return f;
}

Formula Formula::neq(Term a, Term b) {
  Formula f;
  f.kind = Kind::Neq;
  f.pair = {std::move(a), std::move(b)};
  return f;
}

Formula Formula::conj(std::vector<Formula> fs) {
  if (fs.empty()) throw std::logic_error("Formula::conj: empty conjunction");
  Formula f;
  f.kind = Kind::And;
  f.children = std::move(fs);
  return f;
}

Formula Formula::disj(std::vector<Formula> fs) {
  if (fs.empty()) throw std::logic_error("Formula::disj: empty disjunction");
  Formula f;
  f.kind = Kind::Or;
  f.children = std::move(fs);
  return f;
}

Substitution::Substitution(std::map<std::string, Term> bindings) {
  for (auto& [v, t] : bindings) {
    if (t.is_variable && t.name == v) continue;
    bindings_.emplace(v, std::move(t));
  }
}

void Substitution::bind(const std::string& var, Term t) {
  if (t.is_variable && t.name == var) return;
  bindings_[var] = std::move(t);
}

const Term* Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

Substitution Substitution::compose(const Substitution& then) const {
  std::map<std::string, Term> out;
  for (const auto& [v, t] : bindings_) out.emplace(v, apply(then, t));
  for (const auto& [v, t] : then.bindings_) {
    if (!bindings_.count(v)) out.emplace(v, t);
  }
  return Substitution(std::move(out));
}

void BeliefBase::add(const Atom& a) {
  if (!a.ground()) throw std::logic_error("BeliefBase::add: non-ground atom " + to_string(a));
  facts.insert(a);
}

Universe::Universe(std::vector<std::string> cs) : constants(std::move(cs)) {
  std::sort(constants.begin(), constants.end());
  constants.erase(std::unique(constants.begin(), constants.end()), constants.end());
}

bool Universe::contains(const std::string& c) const {
  return std::binary_search(constants.begin(), constants.end(), c);
}

std::string to_string(const Term& t) {
  return t.is_variable ? "?" + t.name : t.name;
}

std::string to_string(const Atom& a) {
  std::string out = "(" + a.predicate;
  for (const Term& t : a.args) out += " " + to_string(t);
  out += ")";
  return out;
}

std::string to_string(const Literal& l) {
  return l.positive ? to_string(l.atom) : "(not " + to_string(l.atom) + ")";
}

std::string to_string(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
      return "true";
    case Formula::Kind::False:
      return "false";
    case Formula::Kind::Lit:
      return to_string(*f.lit);
    case Formula::Kind::Eq:
      return "(= " + to_string(f.pair[0]) + " " + to_string(f.pair[1]) + ")";
    case Formula::Kind::Neq:
      return "(!= " + to_string(f.pair[0]) + " " + to_string(f.pair[1]) + ")";
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string out = f.kind == Formula::Kind::And ? "(and" : "(or";
      for (const Formula& c : f.children) out += " " + to_string(c);
      out += ")";
      return out;
    }
  }
  return "";
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += "?" + v + "/" + to_string(t);
  }
  out += "}";
  return out;
}

Term apply(const Substitution& s, const Term& t) {
  if (t.is_variable) {
    if (const Term* b = s.lookup(t.name)) return *b;
  }
  return t;
}

Atom apply(const Substitution& s, const Atom& a) {
  Atom out = a;
  for (Term& t : out.args) t = apply(s, t);
  return out;
}

Literal apply(const Substitution& s, const Literal& l) {
  return Literal{l.positive, apply(s, l.atom)};
}

Formula apply(const Substitution& s, const Formula& f) {
  Formula out = f;
  if (out.lit) out.lit = apply(s, *out.lit);
  for (Term& t : out.pair) t = apply(s, t);
  for (Formula& c : out.children) c = apply(s, c);
  return out;
}

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> vs;
  if (t.is_variable) vs.insert(t.name);
  return vs;
}

std::set<std::string> free_vars(const Atom& a) {
  std::set<std::string> vs;
  for (const Term& t : a.args) {
    if (t.is_variable) vs.insert(t.name);
  }
  return vs;
}

std::set<std::string> free_vars(const Literal& l) { return free_vars(l.atom); }

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> vs;
  if (f.lit) {
    auto sub = free_vars(*f.lit);
    vs.insert(sub.begin(), sub.end());
  }
  for (const Term& t : f.pair) {
    if (t.is_variable) vs.insert(t.name);
  }
  for (const Formula& c : f.children) {
    auto sub = free_vars(c);
    vs.insert(sub.begin(), sub.end());
  }
  return vs;
}

namespace {

Term walk(const std::map<std::string, Term>& bind, Term t) {
  while (t.is_variable) {
    auto it = bind.find(t.name);
    if (it == bind.end()) break;
    t = it->second;
  }
  return t;
}

} // namespace

std::optional<Substitution> mgu(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return std::nullopt;
  // Function-free terms: binding unbound roots to roots cannot create cycles,
  // so no occurs check is needed.
  std::map<std::string, Term> bind;
  for (size_t i = 0; i < a.args.size(); ++i) {
    Term x = walk(bind, a.args[i]);
    Term y = walk(bind, b.args[i]);
    if (x == y) continue;
    if (x.is_variable) {
      bind.emplace(x.name, y);
    } else if (y.is_variable) {
      bind.emplace(y.name, x);
    } else {
      return std::nullopt;
    }
  }
  std::map<std::string, Term> out;
  for (const auto& [v, t] : bind) {
    Term r = walk(bind, t);
    if (r.is_variable && r.name == v) continue;
    out.emplace(v, r);
  }
  return Substitution(std::move(out));
}

std::optional<Substitution> mgu(const Literal& a, const Literal& b) {
  if (a.positive != b.positive) return std::nullopt;
  return mgu(a.atom, b.atom);
}

std::optional<Substitution> unify_renamed_apart(const Literal& l, const Literal& target) {
  std::set<std::string> lv = free_vars(l);
  std::map<std::string, Term> ren;
  for (const std::string& v : free_vars(target)) {
    if (!lv.count(v)) continue;
    std::string cand = v;
    do {
      cand += "~";
    } while (lv.count(cand) || free_vars(target).count(cand));
    ren.emplace(v, Term::variable(cand));
  }
  Literal t2 = apply(Substitution(std::move(ren)), target);
  auto theta = mgu(l, t2);
  if (!theta) return std::nullopt;
  std::map<std::string, Term> restricted;
  for (const auto& [v, t] : theta->bindings()) {
    if (lv.count(v)) restricted.emplace(v, t);
  }
  return Substitution(std::move(restricted));
}

bool is_instance_of(const Literal& instance, const Literal& general) {
  if (instance.positive != general.positive) return false;
  if (instance.atom.predicate != general.atom.predicate) return false;
  if (instance.atom.args.size() != general.atom.args.size()) return false;
  std::map<std::string, Term> bind;
  for (size_t i = 0; i < general.atom.args.size(); ++i) {
    const Term& g = general.atom.args[i];
    const Term& t = instance.atom.args[i];
    if (g.is_variable) {
      auto [it, inserted] = bind.emplace(g.name, t);
      if (!inserted && it->second != t) return false;
    } else if (g != t) {
      return false;
    }
  }
  return true;
}

std::string Renamer::fresh(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  for (;;) {
    ++counter_;
    std::string cand = stem + std::to_string(counter_);
    if (avoid.count(cand) || created_.count(cand) || blocked_.count(cand)) continue;
    created_.insert(cand);
    return cand;
  }
}

void Renamer::reserve(const std::set<std::string>& names) {
  blocked_.insert(names.begin(), names.end());
}

namespace {

bool eval_ground(const BeliefBase& b, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Lit: {
      if (!f.lit->ground()) throw NonGroundFormula("non-ground literal " + to_string(*f.lit));
      return f.lit->positive == b.holds(f.lit->atom);
    }
    case Formula::Kind::Eq:
    case Formula::Kind::Neq: {
      if (f.pair[0].is_variable || f.pair[1].is_variable)
        throw NonGroundFormula("non-ground (dis)equality " + to_string(f));
      bool eq = f.pair[0] == f.pair[1];
      return f.kind == Formula::Kind::Eq ? eq : !eq;
    }
    case Formula::Kind::And:
      return std::all_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return eval_ground(b, c); });
    case Formula::Kind::Or:
      return std::any_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return eval_ground(b, c); });
  }
  return false;
}

} // namespace

bool evaluate(const BeliefBase& b, const Formula& f, const Substitution& s) {
  return eval_ground(b, apply(s, f));
}

std::vector<Substitution> satisfying_groundings(const BeliefBase& b, const Formula& f,
                                                const Universe& universe) {
  std::set<std::string> vars = free_vars(f);
  std::vector<std::string> vs(vars.begin(), vars.end());
  std::vector<Substitution> out;
  if (vs.empty()) {
    if (evaluate(b, f)) out.emplace_back();
    return out;
  }
  if (universe.constants.empty()) return out;
  std::vector<size_t> idx(vs.size(), 0);
  for (;;) {
    Substitution s;
    for (size_t i = 0; i < vs.size(); ++i)
      s.bind(vs[i], Term::constant(universe.constants[idx[i]]));
    if (evaluate(b, f, s)) out.push_back(std::move(s));
    // odometer with the last variable fastest: lexicographic by binding
    size_t i = vs.size();
    while (i > 0) {
      --i;
      if (++idx[i] < universe.constants.size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
  }
}

} // namespace plansumm
