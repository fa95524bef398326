#include "fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace plansumm::testing {

std::string fixture_path(const std::string& name) {
  return std::string(PLANSUMM_FIXTURE_DIR) + "/" + name;
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PlanLibrary load_plans(const std::string& name) { return parse_plan_library(read_fixture(name)); }

ActionLibrary load_actions(const std::string& name) {
  return parse_action_library(read_fixture(name));
}

BeliefFile load_beliefs(const std::string& name) { return parse_belief_base(read_fixture(name)); }

namespace {

using Bijection = std::pair<std::map<std::string, std::string>, std::map<std::string, std::string>>;

bool extend(Bijection& bij, const std::string& a, const std::string& b) {
  auto [fit, fnew] = bij.first.emplace(a, b);
  auto [bit, bnew] = bij.second.emplace(b, a);
  return fit->second == b && bit->second == a;
}

bool match_atom(const Atom& a, const Atom& b, Bijection& bij) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    const Term& x = a.args[i];
    const Term& y = b.args[i];
    if (x.is_variable != y.is_variable) return false;
    if (x.is_variable) {
      if (!extend(bij, x.name, y.name)) return false;
    } else if (x.name != y.name) {
      return false;
    }
  }
  return true;
}

bool match_literal(const Literal& a, const Literal& b, Bijection& bij) {
  return a.positive == b.positive && match_atom(a.atom, b.atom, bij);
}

bool match_sets(const std::vector<Literal>& a, std::vector<bool>& used,
                const std::vector<Literal>& b, size_t idx, Bijection& bij) {
  if (idx == a.size()) return true;
  for (size_t j = 0; j < b.size(); ++j) {
    if (used[j]) continue;
    Bijection saved = bij;
    if (match_literal(a[idx], b[j], bij)) {
      used[j] = true;
      if (match_sets(a, used, b, idx + 1, bij)) return true;
      used[j] = false;
    }
    bij = std::move(saved);
  }
  return false;
}

bool match_sets(const std::set<Literal>& a, const std::set<Literal>& b, Bijection& bij) {
  if (a.size() != b.size()) return false;
  std::vector<Literal> av(a.begin(), a.end());
  std::vector<Literal> bv(b.begin(), b.end());
  std::vector<bool> used(bv.size(), false);
  return match_sets(av, used, bv, 0, bij);
}

} // namespace

bool sets_variant_equal(const std::set<Literal>& a, const std::set<Literal>& b) {
  Bijection bij;
  return match_sets(a, b, bij);
}

bool summary_variant_equal(const Atom& head_a, const std::set<Literal>& must_a,
                           const std::set<Literal>& mentioned_a, const Atom& head_b,
                           const std::set<Literal>& must_b, const std::set<Literal>& mentioned_b) {
  Bijection bij;
  if (!match_atom(head_a, head_b, bij)) return false;
  if (must_a.size() != must_b.size() || mentioned_a.size() != mentioned_b.size()) return false;
  std::vector<Literal> av(must_a.begin(), must_a.end());
  std::vector<Literal> bv(must_b.begin(), must_b.end());
  std::vector<bool> used(bv.size(), false);
  // backtrack across both sets under one bijection
  std::function<bool(size_t)> match_must = [&](size_t idx) -> bool {
    if (idx == av.size()) {
      Bijection saved = bij;
      if (match_sets(mentioned_a, mentioned_b, bij)) return true;
      bij = std::move(saved);
      return false;
    }
    for (size_t j = 0; j < bv.size(); ++j) {
      if (used[j]) continue;
      Bijection saved = bij;
      if (match_literal(av[idx], bv[j], bij)) {
        used[j] = true;
        if (match_must(idx + 1)) return true;
        used[j] = false;
      }
      bij = std::move(saved);
    }
    return false;
  };
  return match_must(0);
}

std::set<Literal> parse_literals(const std::vector<std::string>& rendered) {
  std::set<Literal> out;
  for (const std::string& s : rendered) out.insert(parse_literal_text(s));
  return out;
}

namespace {

struct Sig {
  std::string name;
  int arity;
  auto operator<=>(const Sig&) const = default;
};

void formula_sigs(const Formula& f, std::set<Sig>& out) {
  if (f.lit) out.insert({f.lit->atom.predicate, f.lit->atom.arity()});
  for (const Formula& c : f.children) formula_sigs(c, out);
}

} // namespace

std::vector<Atom> domain_ground_atoms(const PlanLibrary& plans, const ActionLibrary& actions,
                                      const Universe& universe) {
  std::set<Sig> sigs;
  for (const PlanRule& r : plans.rules) {
    formula_sigs(r.context, sigs);
    for (const Step& s : r.body) {
      if (s.kind == Step::Kind::AddBelief || s.kind == Step::Kind::DelBelief)
        sigs.insert({s.atom.predicate, s.atom.arity()});
      if (s.kind == Step::Kind::Test) formula_sigs(s.test, sigs);
    }
  }
  for (const ActionRule& r : actions.rules) {
    formula_sigs(r.pre, sigs);
    for (const Atom& a : r.add) sigs.insert({a.predicate, a.arity()});
    for (const Atom& a : r.del) sigs.insert({a.predicate, a.arity()});
  }

  std::vector<Atom> out;
  for (const Sig& sig : sigs) {
    std::vector<size_t> idx(sig.arity, 0);
    for (;;) {
      Atom a;
      a.predicate = sig.name;
      for (int i = 0; i < sig.arity; ++i)
        a.args.push_back(Term::constant(universe.constants[idx[i]]));
      out.push_back(std::move(a));
      if (sig.arity == 0) break;
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
  return out;
}

unsigned long harness_seed() {
  if (const char* env = std::getenv("PLANSUMM_SEED")) {
    return std::strtoul(env, nullptr, 10);
  }
  return 1729;
}

} // namespace plansumm::testing
