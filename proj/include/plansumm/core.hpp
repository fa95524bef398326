#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace plansumm {

// First-order symbolic layer: function-free terms, atoms, literals,
// formulas, substitutions and ground belief bases.

struct Term {
  bool is_variable = false;
  std::string name;

  static Term variable(std::string n);
  static Term constant(std::string n);
  bool ground() const { return !is_variable; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  int arity() const { return static_cast<int>(args.size()); }
  bool ground() const;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  bool positive = true;
  Atom atom;

  Literal complement() const { return Literal{!positive, atom}; }
  bool ground() const { return atom.ground(); }

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

// Context conditions, preconditions and goals. And/Or lists are nonempty.
struct Formula {
  enum class Kind { True, False, Lit, Eq, Neq, And, Or };

  Kind kind = Kind::True;
  std::optional<Literal> lit;    // Kind::Lit
  std::vector<Term> pair;        // Kind::Eq / Kind::Neq, exactly two terms
  std::vector<Formula> children; // Kind::And / Kind::Or

  static Formula truth();
  static Formula falsity();
  static Formula literal(Literal l);
  static Formula eq(Term a, Term b);
  static Formula neq(Term a, Term b);
  static Formula conj(std::vector<Formula> fs);
  static Formula disj(std::vector<Formula> fs);

  bool operator==(const Formula&) const = default;
};

// Finite variable->term mapping, kept idempotent and free of x->x entries.
class Substitution {
 public:
  Substitution() = default;
  explicit Substitution(std::map<std::string, Term> bindings);

  void bind(const std::string& var, Term t);
  const std::map<std::string, Term>& bindings() const { return bindings_; }
  const Term* lookup(const std::string& var) const;
  bool empty() const { return bindings_.empty(); }

  // compose(s).apply(e) == apply(s, apply(*this, e)) for any expression e.
  Substitution compose(const Substitution& then) const;

  auto operator<=>(const Substitution&) const = default;
  bool operator==(const Substitution&) const = default;

 private:
  std::map<std::string, Term> bindings_;
};

struct BeliefBase {
  std::set<Atom> facts; // ground atoms only

  bool holds(const Atom& a) const { return facts.count(a) != 0; }
  void add(const Atom& a);

  auto operator<=>(const BeliefBase&) const = default;
};

struct Universe {
  std::vector<std::string> constants; // sorted, unique

  explicit Universe(std::vector<std::string> cs = {});
  bool contains(const std::string& c) const;
};

class NonGroundFormula : public std::runtime_error {
 public:
  explicit NonGroundFormula(const std::string& what) : std::runtime_error(what) {}
};

// Rendering (canonical text forms; variables print with a leading '?').
std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
std::string to_string(const Formula& f);
std::string to_string(const Substitution& s);

// Simultaneous substitution application.
Term apply(const Substitution& s, const Term& t);
Atom apply(const Substitution& s, const Atom& a);
Literal apply(const Substitution& s, const Literal& l);
Formula apply(const Substitution& s, const Formula& f);

std::set<std::string> free_vars(const Term& t);
std::set<std::string> free_vars(const Atom& a);
std::set<std::string> free_vars(const Literal& l);
std::set<std::string> free_vars(const Formula& f);

// Most general unifier for function-free atoms/literals; absence is a value.
// The result is idempotent.
std::optional<Substitution> mgu(const Atom& a, const Atom& b);
std::optional<Substitution> mgu(const Literal& a, const Literal& b);

// Unifies `l` with `target` after renaming target's variables away from l's
// (the footnote-style renamed unification used by May-Undone). The returned
// substitution is restricted to the variables of `l`.
std::optional<Substitution> unify_renamed_apart(const Literal& l, const Literal& target);

// true iff `instance` equals apply(theta, general) for some theta (one-way match).
bool is_instance_of(const Literal& instance, const Literal& general);

// Source of fresh variable names: base name plus a per-analysis monotone
// counter suffix. Names it created are "anonymous" for representative
// bookkeeping downstream.
class Renamer {
 public:
  std::string fresh(const std::string& base, const std::set<std::string>& avoid);
  bool created(const std::string& name) const { return created_.count(name) != 0; }
  // Blocks names from ever being issued (seed with every variable of the
  // libraries under analysis).
  void reserve(const std::set<std::string>& names);

 private:
  long counter_ = 0;
  std::set<std::string> created_;
  std::set<std::string> blocked_;
};

// Renames every variable of `value` not listed in `keep` to a fresh variable
// occurring neither in `avoid` nor in `value`. Injective.
template <class T>
std::pair<T, Substitution> rename_apart(const T& value, const std::set<std::string>& avoid,
                                        Renamer& renamer, const std::set<std::string>& keep = {}) {
  std::set<std::string> vars = free_vars(value);
  std::set<std::string> blocked = avoid;
  blocked.insert(vars.begin(), vars.end());
  blocked.insert(keep.begin(), keep.end());
  std::map<std::string, Term> m;
  for (const auto& v : vars) {
    if (keep.count(v)) continue;
    std::string f = renamer.fresh(v, blocked);
    blocked.insert(f);
    m.emplace(v, Term::variable(f));
  }
  Substitution s(std::move(m));
  return {apply(s, value), s};
}

template <class T>
std::pair<T, Substitution> rename_apart(const T& value, const std::set<std::string>& avoid) {
  Renamer local;
  return rename_apart(value, avoid, local);
}

// Closed-world evaluation of apply(s, f) against a ground belief base.
// Throws NonGroundFormula when apply(s, f) still contains a variable.
bool evaluate(const BeliefBase& b, const Formula& f, const Substitution& s = {});

// All ground substitutions over `universe` for f's free variables under which
// evaluate() returns true, ordered lexicographically by binding.
std::vector<Substitution> satisfying_groundings(const BeliefBase& b, const Formula& f,
                                                const Universe& universe);

} // namespace plansumm
