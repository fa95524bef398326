#pragma once

#include <random>

#include "plansumm/dsl.hpp"

namespace plansumm::testing {

struct RandomDomain {
  PlanLibrary plans;
  ActionLibrary actions;
  Universe universe;
};

struct GenConfig {
  int max_ranks = 3;
  int max_predicates = 4;
  int max_constants = 3;
  int max_rules_per_event = 2;
};

// Random acyclic libraries: action-coherent by construction (each action's
// add and delete predicates are disjoint), with act/add/del/event arguments
// drawn from variables that are ground by execution time (head vars, context
// vars, earlier test bindings).
RandomDomain random_domain(std::mt19937& rng, const GenConfig& cfg = {});

} // namespace plansumm::testing
