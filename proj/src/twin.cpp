#include "protopal/twin.hpp"

#include <algorithm>
#include <numeric>

#include "protopal/risk.hpp"

namespace protopal {

std::vector<std::vector<std::size_t>> prototype_neighborhoods(const Eigen::MatrixXd& z, const PrototypeSet& set,
                                                              std::size_t k_min) {
  const auto n = static_cast<std::size_t>(z.rows());
  std::vector<std::vector<std::size_t>> cells(set.size());
  Eigen::MatrixXd dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x = z.row(static_cast<Eigen::Index>(i)).transpose();
    dist.row(static_cast<Eigen::Index>(i)) = set.distances(x).transpose();
    Eigen::Index best = 0;
    dist.row(static_cast<Eigen::Index>(i)).minCoeff(&best);
    cells[static_cast<std::size_t>(best)].push_back(i);
  }
  const std::size_t want = std::min(k_min, n);
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (cells[j].size() >= want) continue;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto col = static_cast<Eigen::Index>(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist(static_cast<Eigen::Index>(a), col) < dist(static_cast<Eigen::Index>(b), col);
    });
    std::vector<std::size_t> merged = cells[j];
    merged.insert(merged.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(want));
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    cells[j] = std::move(merged);
  }
  return cells;
}

TrainedDiseaseModel fit_autoencoders(const CohortDataset& dataset, TrainedDiseaseModel model,
                                     const AutoencoderConfig& config) {
  if (dataset.empty()) throw Error("cannot fit autoencoders on an empty dataset");
  if (dataset.schema().hash() != model.schema_hash) throw SchemaError("dataset schema does not match the model");
  Eigen::MatrixXd z = model.standardizer.apply_rows(dataset.matrix());
  auto cells = prototype_neighborhoods(z, model.prototypes, config.k_min);
  model.autoencoders.clear();
  for (std::size_t j = 0; j < cells.size(); ++j) {
    std::vector<Eigen::Index> rows(cells[j].begin(), cells[j].end());
    Eigen::MatrixXd samples = z(rows, Eigen::all);
    AutoencoderConfig cfg = config;
    cfg.seed = config.seed + j;
    model.autoencoders.push_back(DenoisingAutoencoder::fit(samples, cfg));
  }
  model.metadata.autoencoder = config;
  return model;
}

namespace {

void check_assignments(const FeatureSchema& schema, const Assignments& assignments) {
  for (const auto& [name, value] : assignments) {
    auto idx = schema.index_of(name);
    if (!idx) throw InterventionError("unknown feature '" + name + "'");
    const auto& spec = schema[*idx];
    if (spec.mutability != Mutability::intervenable)
      throw InterventionError("feature '" + name + "' is " + std::string(to_string(spec.mutability)) +
                              ", not intervenable");
    if (!spec.domain.contains(value))
      throw InterventionError("value " + format_number(value) + " outside the domain of '" + name + "'");
  }
}

}  // namespace

DigitalTwin simulate(const Individual& individual, const Assignments& assignments, std::size_t prototype,
                     const TrainedDiseaseModel& model) {
  const auto& schema = model.schema;
  validate_individual(schema, individual, 0);
  check_assignments(schema, assignments);
  if (prototype >= model.prototypes.size()) throw Error("prototype index out of range");
  if (!model.autoencoders_fitted()) throw Error("model autoencoders are not fitted");

  Eigen::VectorXd intervened = individual.values;
  for (const auto& [name, value] : assignments) intervened[static_cast<Eigen::Index>(schema.require_index(name))] = value;

  const auto& ae = model.autoencoders[prototype];
  Eigen::VectorXd twin = intervened;
  const std::size_t passes = std::max<std::size_t>(1, model.metadata.autoencoder.passes);
  for (std::size_t pass = 0; pass < passes; ++pass) {
    Eigen::VectorXd recon = model.standardizer.invert(ae.reconstruct(model.standardize(twin)));
    for (std::size_t f = 0; f < schema.size(); ++f) {
      const auto i = static_cast<Eigen::Index>(f);
      if (schema[f].mutability == Mutability::simulated) twin[i] = schema[f].domain.clamp(recon[i]);
      else twin[i] = intervened[i];
    }
  }

  DigitalTwin out;
  out.base_id = individual.id;
  out.prototype = prototype;
  out.prototype_label = model.prototypes[prototype].label;
  out.adopted = assignments;
  out.risk_before = risk_score(model.standardize(individual.values), model.prototypes);
  out.risk_after = risk_score(model.standardize(twin), model.prototypes);
  out.values = std::move(twin);
  return out;
}

Assignments prototype_lifestyle(const TrainedDiseaseModel& model, std::size_t prototype) {
  if (prototype >= model.prototypes.size()) throw Error("prototype index out of range");
  Eigen::VectorXd raw = model.standardizer.invert(model.prototypes[prototype].w);
  Assignments out;
  for (std::size_t f = 0; f < model.schema.size(); ++f) {
    const auto& spec = model.schema[f];
    if (spec.mutability == Mutability::intervenable)
      out[spec.name] = spec.domain.clamp(raw[static_cast<Eigen::Index>(f)]);
  }
  return out;
}

TwinPair make_full_twins(const Individual& individual, const TrainedDiseaseModel& model) {
  Eigen::VectorXd z = model.standardize(individual.values);
  TwinPair pair;
  pair.nearest_healthy = nearest_of_class(z, model.prototypes, Label::healthy);
  pair.nearest_diseased = nearest_of_class(z, model.prototypes, Label::diseased);
  pair.healthy = simulate(individual, prototype_lifestyle(model, pair.nearest_healthy), pair.nearest_healthy, model);
  pair.diseased =
      simulate(individual, prototype_lifestyle(model, pair.nearest_diseased), pair.nearest_diseased, model);
  return pair;
}

}  // namespace protopal
