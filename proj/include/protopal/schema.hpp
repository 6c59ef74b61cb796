#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "protopal/errors.hpp"

namespace protopal {

enum class FeatureGroup { demographic, lab, lifestyle, history, medication };
enum class Mutability { fixed, intervenable, simulated };
enum class DomainKind { continuous, ordinal, binary };

/// Class of an individual (or prototype) with respect to one disease.
enum class Label { diseased, healthy };

std::string_view to_string(FeatureGroup g);
std::string_view to_string(Mutability m);
std::string_view to_string(DomainKind k);
std::string_view to_string(Label l);
FeatureGroup parse_group(std::string_view s);
Mutability parse_mutability(std::string_view s);
Label parse_label(std::string_view s);

/// Value domain of a feature. Ordinal values are integer level indices in
/// [0, levels); binary values are 0 or 1.
struct FeatureDomain {
  DomainKind kind = DomainKind::continuous;
  double min = 0.0;
  double max = 1.0;
  std::string units;
  int levels = 2;
  std::vector<std::string> level_names;

  static FeatureDomain continuous(double min, double max, std::string units = {});
  static FeatureDomain ordinal(std::vector<std::string> level_names);
  static FeatureDomain binary();

  double lower() const;
  double upper() const;
  bool discrete() const { return kind != DomainKind::continuous; }
  bool contains(double v) const;
  /// Nearest admissible value: rounds discrete domains, then clamps.
  double clamp(double v) const;

  bool operator==(const FeatureDomain&) const = default;
};

struct FeatureSpec {
  std::string name;
  FeatureGroup group = FeatureGroup::demographic;
  FeatureDomain domain;
  Mutability mutability = Mutability::fixed;

  bool operator==(const FeatureSpec&) const = default;
};

/// Ordered, validated list of features. Every lifestyle feature is
/// intervenable, every lab is simulated, and age/sex (when present) are fixed.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  /// Synthetic demonstration schema (ranges are plausible, not clinical).
  static FeatureSchema default_schema();

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  auto begin() const { return features_.begin(); }
  auto end() const { return features_.end(); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Throws SchemaError naming the feature when absent.
  std::size_t require_index(std::string_view name) const;
  std::vector<std::size_t> indices_with(Mutability m) const;

  /// Stable 64-bit FNV-1a digest of the canonical JSON form, as hex.
  std::string hash() const;

  bool conforms(const Eigen::VectorXd& values) const;

  bool operator==(const FeatureSchema& o) const { return features_ == o.features_; }

 private:
  std::vector<FeatureSpec> features_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

std::string schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(std::string_view text);
FeatureSchema load_schema_file(const std::string& path);

/// Per-disease outcome carried by an individual; all parts optional.
struct Outcome {
  std::optional<Label> label;
  std::optional<double> event_time;
  std::optional<bool> censored;

  bool operator==(const Outcome&) const = default;
};

struct Individual {
  std::string id;
  Eigen::VectorXd values;                  // schema order, raw units
  std::map<std::string, Outcome> outcomes;  // keyed by ICD-10 code
};

/// Immutable cohort: all individuals share the schema and have unique ids.
class CohortDataset {
 public:
  CohortDataset() = default;
  CohortDataset(FeatureSchema schema, std::vector<Individual> individuals);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<Individual>& individuals() const { return individuals_; }
  std::size_t size() const { return individuals_.size(); }
  bool empty() const { return individuals_.empty(); }
  const Individual& operator[](std::size_t i) const { return individuals_[i]; }

  /// Disease codes appearing in any outcome, sorted.
  std::vector<std::string> disease_codes() const;
  /// Row-per-individual raw value matrix.
  Eigen::MatrixXd matrix() const;
  CohortDataset subset(const std::vector<std::size_t>& rows) const;

 private:
  FeatureSchema schema_;
  std::vector<Individual> individuals_;
};

/// Validates one individual against the schema; `row` is used in errors.
void validate_individual(const FeatureSchema& schema, const Individual& ind, std::size_t row);

CohortDataset load_cohort(std::istream& in, const FeatureSchema& schema);
CohortDataset load_cohort_file(const std::string& path, const FeatureSchema& schema);
void write_cohort(std::ostream& out, const CohortDataset& cohort);

/// Shortest round-trip decimal form (integers print without a fraction).
std::string format_number(double v);

}  // namespace protopal
