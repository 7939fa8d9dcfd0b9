#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsmat/query.hpp"
#include "gsmat/storage.hpp"

namespace gsmat {

// Bounds on the total number of intermediate tuples produced when joining a
// list of relations left to right:
//   lower = sum_{k>=2} min(c_1..c_k),  upper = sum_{k>=2} c_1 * ... * c_k.
// A single relation gives (c_1, c_1). Arithmetic saturates at 2^64 - 1.
struct CostBounds {
  std::uint64_t lower = 0;
  std::uint64_t upper = 0;

  friend bool operator==(const CostBounds&, const CostBounds&) = default;
};

// Throws ContractViolation for an empty list.
CostBounds delta_bounds(std::span<const std::uint64_t> cards);

// Predicate cardinality, shrunk by the distinct-subject (distinct-object)
// count when the subject (object) is a constant. Unknown predicates and
// constants missing from the dictionary estimate to 0.
std::uint64_t estimate_cardinality(const BoundPattern& pattern, const PredicateStats& stats);

struct PlanStep {
  BoundPattern pattern;
  std::uint64_t estimate = 0;
  std::vector<std::string> join_vars;  // shared with all earlier steps, in (s, o) order
  CostBounds cumulative;               // delta_bounds over estimates of steps 1..this
};

struct Plan {
  std::vector<PlanStep> steps;
  std::vector<std::string> projection;
  bool distinct = false;
  std::vector<std::string> warnings;
};

// Greedy "connected minimal upper bound" ordering: sort patterns by estimate
// (ties by ordinal), start from the cheapest, then repeatedly take the first
// remaining pattern that shares a variable with the steps taken so far. A
// shared constant does not count: joining on it would still be a cross
// product. When none does, the cheapest remaining pattern starts a new
// component and a cross-product warning is recorded.
Plan plan_query(const BoundQuery& query, const PredicateStats& stats);

// One tab-separated line per step: ordinal, pattern, estimate, join
// variables (comma separated, '-' if none), cumulative lower and upper bound.
std::string explain(const Plan& plan);

}  // namespace gsmat
