#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "protopal/cox.hpp"
#include "protopal/model.hpp"

namespace protopal {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1; the first round(test_fraction * n) go to test.
Split split_indices(std::size_t n, double test_fraction, std::uint64_t seed);

struct ComparisonRow {
  std::string disease;
  std::string name;
  bool available = false;
  std::string note;  // reason when unavailable
  double cox_auc = 0.0;
  double gtlvq_auc = 0.0;
  std::optional<double> cox_c_index;
  std::optional<double> gtlvq_c_index;
  std::string winner;  // "cox", "gtlvq", "tie" or empty when unavailable
  std::size_t n_test = 0;
  std::size_t n_diseased = 0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::size_t cox_wins = 0;
  std::size_t gtlvq_wins = 0;
  std::size_t ties = 0;
};

/// Held-out AUC (and C-index where event times exist) of the prototype risk
/// score against the Cox linear predictor. Observed-diseased individuals are
/// positives, labelled-healthy ones negatives.
ComparisonTable compare(std::span<const TrainedDiseaseModel> models, const std::map<std::string, CoxBaseline>& baselines,
                        const CohortDataset& test);

/// Columns: icd10,disease,cox_auc,gtlvq_auc,cox_c_index,gtlvq_c_index,winner,n_test,n_diseased
/// followed by a closing `Wins` row carrying the per-method tallies.
void write_comparison_csv(std::ostream& out, const ComparisonTable& table);

struct TrendRow {
  std::string kind;  // "prototype" or "individual"
  std::string id;    // prototype index or individual id
  Label label = Label::healthy;
  std::optional<Label> predicted;
  std::optional<bool> correct;
  std::vector<double> values;  // raw units, one per requested feature
};

struct TrendExport {
  std::string disease;
  std::vector<std::string> features;
  std::vector<TrendRow> rows;
};

/// De-standardized prototype profiles over `features`, optionally followed by
/// labelled individuals of `overlay` with their nearest-prototype prediction.
TrendExport export_prototype_trends(const TrainedDiseaseModel& model, const std::vector<std::string>& features,
                                    const CohortDataset* overlay = nullptr);

/// Columns: kind,id,class,predicted,correct,<feature...>
void write_trends_csv(std::ostream& out, const TrendExport& trends);

}  // namespace protopal
