#pragma once

#include <string>
#include <vector>

#include "plansumm/dsl.hpp"
#include "plansumm/summarize.hpp"

namespace plansumm::testing {

std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);

PlanLibrary load_plans(const std::string& name);
ActionLibrary load_actions(const std::string& name);
BeliefFile load_beliefs(const std::string& name);

// Literal-set equality modulo a bijective variable renaming; the optional
// anchor atoms (event heads) must map onto each other under the same
// bijection, which pins head variables.
bool sets_variant_equal(const std::set<Literal>& a, const std::set<Literal>& b);
bool summary_variant_equal(const Atom& head_a, const std::set<Literal>& must_a,
                           const std::set<Literal>& mentioned_a, const Atom& head_b,
                           const std::set<Literal>& must_b, const std::set<Literal>& mentioned_b);

std::set<Literal> parse_literals(const std::vector<std::string>& rendered);

// Ground instances over the universe of every atom mentioned in the domain.
std::vector<Atom> domain_ground_atoms(const PlanLibrary& plans, const ActionLibrary& actions,
                                      const Universe& universe);

// PLANSUMM_SEED when set, otherwise a fixed default.
unsigned long harness_seed();

} // namespace plansumm::testing
