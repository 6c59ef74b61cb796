#include "protopal/planner.hpp"

#include <cmath>

#include "protopal/risk.hpp"

namespace protopal {

std::string_view to_string(StopPolicy p) { return p == StopPolicy::no_improvement ? "no-improvement" : "exhaust-all"; }

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::target_reached: return "target-reached";
    case StopReason::no_improvement: return "no-improvement";
    case StopReason::max_steps: return "max-steps";
  }
  return "?";
}

StopPolicy parse_stop_policy(std::string_view s) {
  if (s == "no-improvement") return StopPolicy::no_improvement;
  if (s == "exhaust-all") return StopPolicy::exhaust_all;
  throw Error("unknown stop policy '" + std::string(s) + "'");
}

std::vector<Move> candidate_moves(const Eigen::VectorXd& current, const Assignments& target,
                                  const FeatureSchema& schema, int step_size) {
  if (step_size < 1) throw Error("step size must be at least 1");
  std::vector<Move> moves;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto& spec = schema[f];
    if (spec.mutability != Mutability::intervenable) continue;
    auto it = target.find(spec.name);
    if (it == target.end()) continue;
    const double from = current[static_cast<Eigen::Index>(f)];
    const double goal = it->second;
    if (from == goal) continue;
    double to = goal;
    if (spec.domain.kind == DomainKind::ordinal) {
      double delta = std::min<double>(step_size, std::abs(goal - from));
      to = from + (goal > from ? delta : -delta);
    }
    moves.push_back({spec.name, f, from, to});
  }
  return moves;
}

HealthPlan plan(const Individual& individual, const TrainedDiseaseModel& model, const PlannerConfig& config) {
  if (!model.autoencoders_fitted()) throw Error("model autoencoders are not fitted");
  HealthPlan out;
  Eigen::VectorXd z0 = model.standardize(individual.values);
  out.target_prototype = nearest_of_class(z0, model.prototypes, Label::healthy);
  out.target_lifestyle = prototype_lifestyle(model, out.target_prototype);
  out.initial_risk = risk_score(z0, model.prototypes);

  Individual base = individual;
  double base_risk = out.initial_risk;
  std::size_t target = out.target_prototype;
  Assignments target_lifestyle = out.target_lifestyle;

  while (true) {
    if (config.recompute_target && !out.steps.empty()) {
      target = nearest_of_class(model.standardize(base.values), model.prototypes, Label::healthy);
      target_lifestyle = prototype_lifestyle(model, target);
    }
    auto moves = candidate_moves(base.values, target_lifestyle, model.schema, config.step_size);
    if (moves.empty()) {
      out.stop_reason = StopReason::target_reached;
      break;
    }
    if (out.steps.size() >= config.max_steps) {
      out.stop_reason = StopReason::max_steps;
      break;
    }

    std::optional<PlanStep> best;
    for (const auto& move : moves) {
      DigitalTwin twin;
      try {
        twin = simulate(base, Assignments{{move.feature, move.to}}, target, model);
      } catch (const Error& e) {
        throw PlanningError(std::string("simulation failed for move on '") + move.feature + "': " + e.what(), out);
      }
      double reduction = base_risk - twin.risk_after;
      if (!best || reduction > best->risk_before - best->risk_after)
        best = PlanStep{move, base_risk, twin.risk_after, std::move(twin)};
    }
    if (config.stop_policy == StopPolicy::no_improvement && !(best->risk_after < base_risk)) {
      out.stop_reason = StopReason::no_improvement;
      break;
    }
    base = best->twin.to_individual();
    base_risk = best->risk_after;
    out.steps.push_back(std::move(*best));
  }
  return out;
}

}  // namespace protopal
