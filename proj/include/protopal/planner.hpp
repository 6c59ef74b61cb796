#pragma once

#include <optional>
#include <string>
#include <vector>

#include "protopal/twin.hpp"

namespace protopal {

/// One admissible lifestyle change: ordinal features move one level (or
/// `step_size` levels) toward the target, binary features flip, continuous
/// features jump to the target.
struct Move {
  std::string feature;
  std::size_t feature_index = 0;
  double from = 0.0;
  double to = 0.0;

  bool operator==(const Move&) const = default;
};

/// Moves for every intervenable feature whose current value differs from the
/// target, in schema order.
std::vector<Move> candidate_moves(const Eigen::VectorXd& current, const Assignments& target,
                                  const FeatureSchema& schema, int step_size = 1);

enum class StopPolicy { no_improvement, exhaust_all };
enum class StopReason { target_reached, no_improvement, max_steps };

std::string_view to_string(StopPolicy p);
std::string_view to_string(StopReason r);
StopPolicy parse_stop_policy(std::string_view s);

struct PlannerConfig {
  StopPolicy stop_policy = StopPolicy::no_improvement;
  std::size_t max_steps = 20;
  int step_size = 1;
  /// Experimental: re-pick the nearest healthy prototype after every step.
  bool recompute_target = false;
};

struct PlanStep {
  Move move;
  double risk_before = 0.0;
  double risk_after = 0.0;
  DigitalTwin twin;
};

struct HealthPlan {
  std::size_t target_prototype = 0;
  Assignments target_lifestyle;
  double initial_risk = 0.0;
  std::vector<PlanStep> steps;
  StopReason stop_reason = StopReason::target_reached;
};

/// Thrown when a simulation fails mid-plan; carries the steps built so far.
class PlanningError : public Error {
 public:
  PlanningError(const std::string& what, HealthPlan partial) : Error(what), partial_(std::move(partial)) {}
  const HealthPlan& partial() const noexcept { return partial_; }

 private:
  HealthPlan partial_;
};

/// Greedy plan toward the nearest healthy prototype: each step applies the
/// single move with the largest risk reduction (schema order breaks ties),
/// chaining each step's twin into the next step's base.
HealthPlan plan(const Individual& individual, const TrainedDiseaseModel& model, const PlannerConfig& config = {});

}  // namespace protopal
