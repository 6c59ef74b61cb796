#include "protopal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "protopal/lvq.hpp"
#include "protopal/metrics.hpp"
#include "protopal/risk.hpp"

namespace protopal {

Split split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw Error("test fraction must lie in [0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  Split s;
  s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

ComparisonTable compare(std::span<const TrainedDiseaseModel> models, const std::map<std::string, CoxBaseline>& baselines,
                        const CohortDataset& test) {
  ComparisonTable table;
  for (const auto& model : models) {
    ComparisonRow row;
    row.disease = model.disease;
    row.name = model.name;
    auto base = baselines.find(model.disease);
    if (base == baselines.end()) {
      row.note = "no baseline";
      table.rows.push_back(row);
      continue;
    }
    if (model.schema_hash != test.schema().hash()) {
      row.note = "schema mismatch";
      table.rows.push_back(row);
      continue;
    }

    std::vector<double> proto_scores, cox_scores, times;
    std::vector<int> labels, censored;
    std::vector<double> timed_proto, timed_cox;
    for (const auto& ind : test.individuals()) {
      auto it = ind.outcomes.find(model.disease);
      if (it == ind.outcomes.end()) continue;
      double ps = risk_score(model.standardize(ind.values), model.prototypes);
      double cs = base->second.score(ind.values);
      if (it->second.label) {
        proto_scores.push_back(ps);
        cox_scores.push_back(cs);
        labels.push_back(*it->second.label == Label::diseased ? 1 : 0);
      }
      if (it->second.event_time) {
        timed_proto.push_back(ps);
        timed_cox.push_back(cs);
        times.push_back(*it->second.event_time);
        censored.push_back(*it->second.censored ? 1 : 0);
      }
    }
    row.n_test = labels.size();
    row.n_diseased = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    auto vec = [](const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); };
    auto ivec = [](const std::vector<int>& v) { return Eigen::Map<const Eigen::VectorXi>(v.data(), static_cast<Eigen::Index>(v.size())); };
    try {
      row.gtlvq_auc = auc(vec(proto_scores), ivec(labels));
      row.cox_auc = auc(vec(cox_scores), ivec(labels));
      row.available = true;
    } catch (const MetricError& e) {
      row.note = e.what();
      table.rows.push_back(row);
      continue;
    }
    try {
      row.gtlvq_c_index = c_index(vec(timed_proto), vec(times), ivec(censored));
      row.cox_c_index = c_index(vec(timed_cox), vec(times), ivec(censored));
    } catch (const MetricError&) {
      row.gtlvq_c_index.reset();
      row.cox_c_index.reset();
    }
    if (row.gtlvq_auc > row.cox_auc) {
      row.winner = "gtlvq";
      ++table.gtlvq_wins;
    } else if (row.cox_auc > row.gtlvq_auc) {
      row.winner = "cox";
      ++table.cox_wins;
    } else {
      row.winner = "tie";
      ++table.ties;
    }
    table.rows.push_back(row);
  }
  return table;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
  out << "icd10,disease,cox_auc,gtlvq_auc,cox_c_index,gtlvq_c_index,winner,n_test,n_diseased\n";
  for (const auto& r : table.rows) {
    out << csv_cell(r.disease) << ',' << csv_cell(r.name) << ',';
    if (r.available) {
      out << fixed3(r.cox_auc) << ',' << fixed3(r.gtlvq_auc) << ',';
      out << (r.cox_c_index ? fixed3(*r.cox_c_index) : "") << ',';
      out << (r.gtlvq_c_index ? fixed3(*r.gtlvq_c_index) : "") << ',';
      out << r.winner;
    } else {
      out << ",,,," << "unavailable";
    }
    out << ',' << r.n_test << ',' << r.n_diseased << '\n';
  }
  out << "Wins,," << table.cox_wins << ',' << table.gtlvq_wins << ",,,tie=" << table.ties << ",,\n";
}

TrendExport export_prototype_trends(const TrainedDiseaseModel& model, const std::vector<std::string>& features,
                                    const CohortDataset* overlay) {
  TrendExport out;
  out.disease = model.disease;
  out.features = features;
  std::vector<std::size_t> idx;
  for (const auto& f : features) idx.push_back(model.schema.require_index(f));
  if (features.empty()) return out;

  auto pick = [&](const Eigen::VectorXd& raw) {
    std::vector<double> v;
    for (auto i : idx) v.push_back(raw[static_cast<Eigen::Index>(i)]);
    return v;
  };
  for (std::size_t j = 0; j < model.prototypes.size(); ++j) {
    TrendRow row;
    row.kind = "prototype";
    row.id = std::to_string(j);
    row.label = model.prototypes[j].label;
    row.values = pick(model.standardizer.invert(model.prototypes[j].w));
    out.rows.push_back(std::move(row));
  }
  if (overlay) {
    if (overlay->schema().hash() != model.schema_hash) throw SchemaError("overlay schema does not match the model");
    for (const auto& ind : overlay->individuals()) {
      auto it = ind.outcomes.find(model.disease);
      if (it == ind.outcomes.end() || !it->second.label) continue;
      TrendRow row;
      row.kind = "individual";
      row.id = ind.id;
      row.label = *it->second.label;
      row.predicted = classify(model.standardize(ind.values), model.prototypes);
      row.correct = *row.predicted == row.label;
      row.values = pick(ind.values);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

void write_trends_csv(std::ostream& out, const TrendExport& trends) {
  out << "kind,id,class,predicted,correct";
  for (const auto& f : trends.features) out << ',' << f;
  out << '\n';
  for (const auto& r : trends.rows) {
    out << r.kind << ',' << csv_cell(r.id) << ',' << to_string(r.label) << ',';
    if (r.predicted) out << to_string(*r.predicted);
    out << ',';
    if (r.correct) out << (*r.correct ? 1 : 0);
    for (double v : r.values) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace protopal
