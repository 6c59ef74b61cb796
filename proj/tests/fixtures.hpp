#pragma once

#include <vector>

#include "protopal/lvq.hpp"
#include "protopal/synthetic.hpp"
#include "protopal/twin.hpp"

namespace testdata {

struct Trained {
  protopal::SyntheticCohort cohort;
  std::vector<protopal::TrainedDiseaseModel> models;
};

/// Small default-schema cohort with two fully fitted disease models. Built
/// once per test binary.
inline const Trained& small_trained() {
  static const Trained trained = [] {
    using namespace protopal;
    auto cfg = GeneratorConfig::defaults();
    cfg.n = 800;
    cfg.seed = 21;
    Trained t;
    t.cohort = generate_planted_cohort(cfg);
    TrainingConfig tc;
    tc.prototypes_per_class = 3;
    tc.tangent_dim = 2;
    tc.epochs = 8;
    AutoencoderConfig ac;
    ac.epochs = 40;
    for (const char* code : {"E11", "K70"})
      t.models.push_back(fit_autoencoders(t.cohort.dataset, train(t.cohort.dataset, code, tc), ac));
    return t;
  }();
  return trained;
}

}  // namespace testdata
