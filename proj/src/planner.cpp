#include "gsmat/planner.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "gsmat/error.hpp"
#include "gsmat/saturating.hpp"

namespace gsmat {

CostBounds delta_bounds(std::span<const std::uint64_t> cards) {
  if (cards.empty()) throw ContractViolation("delta_bounds: empty cardinality list");
  if (cards.size() == 1) return {cards[0], cards[0]};
  CostBounds b;
  std::uint64_t running_min = cards[0];
  std::uint64_t running_product = cards[0];
  for (std::size_t k = 1; k < cards.size(); ++k) {
    running_min = std::min(running_min, cards[k]);
    running_product = sat_mul(running_product, cards[k]);
    b.lower = sat_add(b.lower, running_min);
    b.upper = sat_add(b.upper, running_product);
  }
  return b;
}

std::uint64_t estimate_cardinality(const BoundPattern& pattern, const PredicateStats& stats) {
  if (pattern.matches_nothing()) return 0;
  const auto* st = stats.find(pattern.pred);
  if (!st || st->cardinality == 0) return 0;
  std::uint64_t est = st->cardinality;
  auto shrink = [&](std::uint64_t distinct) { est = (est + distinct - 1) / std::max<std::uint64_t>(distinct, 1); };
  if (pattern.s.kind == NodeSlot::Kind::constant) shrink(st->distinct_subjects);
  if (pattern.o.kind == NodeSlot::Kind::constant) shrink(st->distinct_objects);
  return std::max<std::uint64_t>(est, 1);
}

Plan plan_query(const BoundQuery& query, const PredicateStats& stats) {
  Plan plan;
  plan.projection = query.projection;
  plan.distinct = query.distinct;
  if (query.patterns.empty()) return plan;

  std::vector<std::uint64_t> estimates(query.patterns.size());
  for (std::size_t i = 0; i < query.patterns.size(); ++i) {
    estimates[i] = estimate_cardinality(query.patterns[i], stats);
  }
  std::vector<std::size_t> residual(query.patterns.size());
  std::iota(residual.begin(), residual.end(), 0);
  std::stable_sort(residual.begin(), residual.end(), [&](std::size_t a, std::size_t b) {
    if (estimates[a] != estimates[b]) return estimates[a] < estimates[b];
    return query.patterns[a].source.ordinal < query.patterns[b].source.ordinal;
  });

  std::set<std::string> bound_vars;
  std::vector<std::uint64_t> chosen_estimates;

  while (!residual.empty()) {
    auto pick = residual.begin();
    if (!plan.steps.empty()) {
      pick = std::find_if(residual.begin(), residual.end(), [&](std::size_t i) {
        const auto vars = query.patterns[i].variables();
        return std::any_of(vars.begin(), vars.end(), [&](const auto& v) { return bound_vars.count(v) > 0; });
      });
      if (pick == residual.end()) pick = residual.begin();
    }
    const std::size_t idx = *pick;
    residual.erase(pick);

    PlanStep step;
    step.pattern = query.patterns[idx];
    step.estimate = estimates[idx];
    for (const auto& v : step.pattern.variables()) {
      if (bound_vars.count(v)) step.join_vars.push_back(v);
    }
    if (!plan.steps.empty() && step.join_vars.empty()) {
      plan.warnings.push_back("cross product: pattern " + std::to_string(step.pattern.source.ordinal) + " (" +
                              to_string(step.pattern.source) + ") shares no variable with earlier steps");
    }
    for (const auto& v : step.pattern.variables()) bound_vars.insert(v);
    chosen_estimates.push_back(step.estimate);
    step.cumulative = delta_bounds(chosen_estimates);
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

std::string explain(const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) {
    std::string vars;
    for (const auto& v : step.join_vars) vars += (vars.empty() ? "" : ",") + v;
    if (vars.empty()) vars = "-";
    out += std::to_string(step.pattern.source.ordinal) + '\t' + to_string(step.pattern.source) + '\t' +
           std::to_string(step.estimate) + '\t' + vars + '\t' + std::to_string(step.cumulative.lower) + '\t' +
           std::to_string(step.cumulative.upper) + '\n';
  }
  return out;
}

}  // namespace gsmat
