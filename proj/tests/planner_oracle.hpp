#pragma once

#include <optional>
#include <string>

#include "protopal/twin.hpp"

namespace testdata {

using namespace protopal;

struct Choice {
  std::string feature;
  double to = 0.0;
  double risk = 0.0;
};

// Exhaustive one-step search written from the move rules directly: every
// intervenable feature that differs from the target, one level for ordinal,
// straight to the target otherwise; best reduction wins, first in schema
// order on ties.
inline std::optional<Choice> best_single_move(const Individual& base, double base_risk, const Assignments& target,
                                       std::size_t prototype, const TrainedDiseaseModel& model) {
  std::optional<Choice> best;
  for (std::size_t f = 0; f < model.schema.size(); ++f) {
    const auto& spec = model.schema[f];
    if (spec.mutability != Mutability::intervenable) continue;
    const double cur = base.values[static_cast<Eigen::Index>(f)], goal = target.at(spec.name);
    if (cur == goal) continue;
    double to = goal;
    if (spec.domain.kind == DomainKind::ordinal) to = cur + (goal > cur ? 1.0 : -1.0);
    double r = simulate(base, {{spec.name, to}}, prototype, model).risk_after;
    if (!best || base_risk - r > base_risk - best->risk) best = Choice{spec.name, to, r};
  }
  return best;
}

}  // namespace testdata
