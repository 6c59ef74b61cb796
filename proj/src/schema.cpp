#include "protopal/schema.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace protopal {

using nlohmann::json;

std::string_view to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::demographic: return "demographic";
    case FeatureGroup::lab: return "lab";
    case FeatureGroup::lifestyle: return "lifestyle";
    case FeatureGroup::history: return "history";
    case FeatureGroup::medication: return "medication";
  }
  return "?";
}

std::string_view to_string(Mutability m) {
  switch (m) {
    case Mutability::fixed: return "fixed";
    case Mutability::intervenable: return "intervenable";
    case Mutability::simulated: return "simulated";
  }
  return "?";
}

std::string_view to_string(DomainKind k) {
  switch (k) {
    case DomainKind::continuous: return "continuous";
    case DomainKind::ordinal: return "ordinal";
    case DomainKind::binary: return "binary";
  }
  return "?";
}

std::string_view to_string(Label l) { return l == Label::diseased ? "diseased" : "healthy"; }

FeatureGroup parse_group(std::string_view s) {
  for (auto g : {FeatureGroup::demographic, FeatureGroup::lab, FeatureGroup::lifestyle,
                 FeatureGroup::history, FeatureGroup::medication})
    if (to_string(g) == s) return g;
  throw SchemaError("unknown feature group '" + std::string(s) + "'");
}

Mutability parse_mutability(std::string_view s) {
  for (auto m : {Mutability::fixed, Mutability::intervenable, Mutability::simulated})
    if (to_string(m) == s) return m;
  throw SchemaError("unknown mutability '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
  if (s == "diseased") return Label::diseased;
  if (s == "healthy") return Label::healthy;
  throw SchemaError("unknown class '" + std::string(s) + "'");
}

FeatureDomain FeatureDomain::continuous(double min, double max, std::string units) {
  if (!(min < max)) throw SchemaError("continuous domain needs min < max");
  FeatureDomain d;
  d.kind = DomainKind::continuous;
  d.min = min;
  d.max = max;
  d.units = std::move(units);
  d.levels = 0;
  return d;
}

FeatureDomain FeatureDomain::ordinal(std::vector<std::string> level_names) {
  if (level_names.size() < 2) throw SchemaError("ordinal domain needs at least two levels");
  FeatureDomain d;
  d.kind = DomainKind::ordinal;
  d.levels = static_cast<int>(level_names.size());
  d.level_names = std::move(level_names);
  d.min = 0.0;
  d.max = d.levels - 1.0;
  return d;
}

FeatureDomain FeatureDomain::binary() {
  FeatureDomain d;
  d.kind = DomainKind::binary;
  d.levels = 2;
  d.min = 0.0;
  d.max = 1.0;
  return d;
}

double FeatureDomain::lower() const { return kind == DomainKind::continuous ? min : 0.0; }

double FeatureDomain::upper() const {
  switch (kind) {
    case DomainKind::continuous: return max;
    case DomainKind::ordinal: return levels - 1.0;
    case DomainKind::binary: return 1.0;
  }
  return max;
}

bool FeatureDomain::contains(double v) const {
  if (!std::isfinite(v)) return false;
  if (discrete() && v != std::round(v)) return false;
  return v >= lower() && v <= upper();
}

double FeatureDomain::clamp(double v) const {
  if (std::isnan(v)) v = lower();
  if (discrete()) v = std::round(v);
  return std::min(std::max(v, lower()), upper());
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.name.empty()) throw SchemaError("feature " + std::to_string(i) + " has an empty name");
    if (f.name == "id" || f.name.starts_with("label_") || f.name.starts_with("event_time_") ||
        f.name.starts_with("censored_"))
      throw SchemaError("feature name '" + f.name + "' collides with a reserved column");
    if (!index_.emplace(f.name, i).second) throw SchemaError("duplicate feature '" + f.name + "'");
    if (f.domain.kind == DomainKind::ordinal && f.domain.levels < 2)
      throw SchemaError("ordinal feature '" + f.name + "' needs at least 2 levels");
    if (f.domain.kind == DomainKind::continuous && !(f.domain.min < f.domain.max))
      throw SchemaError("continuous feature '" + f.name + "' needs min < max");
    if (f.group == FeatureGroup::lifestyle && f.mutability != Mutability::intervenable)
      throw SchemaError("lifestyle feature '" + f.name + "' must be intervenable");
    if (f.group == FeatureGroup::lab && f.mutability != Mutability::simulated)
      throw SchemaError("lab feature '" + f.name + "' must be simulated");
    if ((f.name == "age" || f.name == "sex") && f.mutability != Mutability::fixed)
      throw SchemaError("feature '" + f.name + "' must be fixed");
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureSchema::require_index(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw SchemaError("unknown feature '" + std::string(name) + "'");
}

std::vector<std::size_t> FeatureSchema::indices_with(Mutability m) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].mutability == m) out.push_back(i);
  return out;
}

bool FeatureSchema::conforms(const Eigen::VectorXd& values) const {
  if (static_cast<std::size_t>(values.size()) != size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (!features_[i].domain.contains(values[static_cast<Eigen::Index>(i)])) return false;
  return true;
}

namespace {

json spec_to_json(const FeatureSpec& f) {
  json domain;
  domain["kind"] = to_string(f.domain.kind);
  switch (f.domain.kind) {
    case DomainKind::continuous:
      domain["min"] = f.domain.min;
      domain["max"] = f.domain.max;
      domain["units"] = f.domain.units;
      break;
    case DomainKind::ordinal:
      domain["levels"] = f.domain.levels;
      domain["level_names"] = f.domain.level_names;
      break;
    case DomainKind::binary: break;
  }
  return json{{"name", f.name},
              {"group", to_string(f.group)},
              {"domain", domain},
              {"mutability", to_string(f.mutability)}};
}

FeatureSpec spec_from_json(const json& j) {
  FeatureSpec f;
  f.name = j.at("name").get<std::string>();
  f.group = parse_group(j.at("group").get<std::string>());
  f.mutability = parse_mutability(j.at("mutability").get<std::string>());
  const auto& d = j.at("domain");
  auto kind = d.at("kind").get<std::string>();
  if (kind == "continuous") {
    f.domain = FeatureDomain::continuous(d.at("min").get<double>(), d.at("max").get<double>(),
                                         d.value("units", std::string{}));
  } else if (kind == "ordinal") {
    std::vector<std::string> names = d.value("level_names", std::vector<std::string>{});
    int levels = d.value("levels", static_cast<int>(names.size()));
    if (names.empty())
      for (int i = 0; i < levels; ++i) names.push_back(std::to_string(i));
    if (static_cast<int>(names.size()) != levels)
      throw SchemaError("feature '" + f.name + "': level_names does not match levels");
    f.domain = FeatureDomain::ordinal(std::move(names));
  } else if (kind == "binary") {
    f.domain = FeatureDomain::binary();
  } else {
    throw SchemaError("feature '" + f.name + "': unknown domain kind '" + kind + "'");
  }
  return f;
}

json schema_json(const FeatureSchema& s) {
  json arr = json::array();
  for (const auto& f : s) arr.push_back(spec_to_json(f));
  return arr;
}

}  // namespace

std::string FeatureSchema::hash() const {
  std::string text = schema_json(*this).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string schema_to_json(const FeatureSchema& schema) {
  return json{{"features", schema_json(schema)}}.dump(2);
}

FeatureSchema schema_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  const json& arr = j.is_object() ? j.at("features") : j;
  if (!arr.is_array()) throw SchemaError("schema must list features in an array");
  std::vector<FeatureSpec> specs;
  try {
    for (const auto& f : arr) specs.push_back(spec_from_json(f));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed feature record: ") + e.what());
  }
  return FeatureSchema(std::move(specs));
}

FeatureSchema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return schema_from_json(ss.str());
}

FeatureSchema FeatureSchema::default_schema() {
  using D = FeatureDomain;
  using G = FeatureGroup;
  using M = Mutability;
  auto cont = [](std::string name, G g, double lo, double hi, std::string units, M m) {
    return FeatureSpec{std::move(name), g, D::continuous(lo, hi, std::move(units)), m};
  };
  auto lifestyle = [](std::string name, std::vector<std::string> levels) {
    return FeatureSpec{std::move(name), G::lifestyle, D::ordinal(std::move(levels)), M::intervenable};
  };
  auto lifestyle_flag = [](std::string name) {
    return FeatureSpec{std::move(name), G::lifestyle, D::binary(), M::intervenable};
  };
  auto flag = [](std::string name, G g) { return FeatureSpec{std::move(name), g, D::binary(), M::fixed}; };

  return FeatureSchema({
      cont("age", G::demographic, 20, 90, "years", M::fixed),
      FeatureSpec{"sex", G::demographic, D::binary(), M::fixed},
      cont("height", G::demographic, 140, 200, "cm", M::fixed),
      cont("weight", G::demographic, 35, 140, "kg", M::simulated),
      cont("bmi", G::demographic, 15, 45, "kg/m2", M::simulated),
      cont("waist", G::demographic, 55, 130, "cm", M::simulated),
      cont("sbp", G::lab, 85, 200, "mmHg", M::simulated),
      cont("dbp", G::lab, 45, 120, "mmHg", M::simulated),
      cont("ast", G::lab, 8, 120, "U/L", M::simulated),
      cont("alt", G::lab, 5, 150, "U/L", M::simulated),
      cont("ggt", G::lab, 5, 300, "U/L", M::simulated),
      cont("hdl", G::lab, 20, 110, "mg/dL", M::simulated),
      cont("ldl", G::lab, 40, 220, "mg/dL", M::simulated),
      cont("tg", G::lab, 30, 450, "mg/dL", M::simulated),
      cont("glucose", G::lab, 60, 250, "mg/dL", M::simulated),
      cont("hba1c", G::lab, 4.0, 11.0, "%", M::simulated),
      cont("uric_acid", G::lab, 2.0, 10.0, "mg/dL", M::simulated),
      lifestyle("smoking", {"never", "former", "current"}),
      lifestyle("exercise", {"none", "1-2 per week", "3-4 per week", "5+ per week"}),
      lifestyle_flag("walking"),
      lifestyle("alcohol", {"0", "1", "2", "3", "4", "5", "6", "7"}),
      lifestyle_flag("late_dinner"),
      lifestyle_flag("skip_breakfast"),
      lifestyle("eating_speed", {"slow", "normal", "fast"}),
      lifestyle_flag("sleep_ok"),
      flag("hx_stroke", G::history),
      flag("hx_heart", G::history),
      flag("hx_kidney", G::history),
      flag("hx_anemia", G::history),
      flag("med_ht", G::medication),
      flag("med_dm", G::medication),
      flag("med_hl", G::medication),
  });
}

CohortDataset::CohortDataset(FeatureSchema schema, std::vector<Individual> individuals)
    : schema_(std::move(schema)), individuals_(std::move(individuals)) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < individuals_.size(); ++i) {
    validate_individual(schema_, individuals_[i], i);
    if (!ids.insert(individuals_[i].id).second)
      throw ValidationError(i, "id", "duplicate id '" + individuals_[i].id + "'");
  }
}

std::vector<std::string> CohortDataset::disease_codes() const {
  std::set<std::string> codes;
  for (const auto& ind : individuals_)
    for (const auto& [code, _] : ind.outcomes) codes.insert(code);
  return {codes.begin(), codes.end()};
}

Eigen::MatrixXd CohortDataset::matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(schema_.size()));
  for (std::size_t i = 0; i < size(); ++i) m.row(static_cast<Eigen::Index>(i)) = individuals_[i].values.transpose();
  return m;
}

CohortDataset CohortDataset::subset(const std::vector<std::size_t>& rows) const {
  std::vector<Individual> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(individuals_.at(r));
  return CohortDataset(schema_, std::move(out));
}

void validate_individual(const FeatureSchema& schema, const Individual& ind, std::size_t row) {
  if (static_cast<std::size_t>(ind.values.size()) != schema.size())
    throw ValidationError(row, "*", "expected " + std::to_string(schema.size()) + " values, got " +
                                        std::to_string(ind.values.size()));
  for (std::size_t f = 0; f < schema.size(); ++f) {
    double v = ind.values[static_cast<Eigen::Index>(f)];
    const auto& spec = schema[f];
    if (!spec.domain.contains(v))
      throw ValidationError(row, spec.name, "value " + format_number(v) + " outside " +
                                                std::string(to_string(spec.domain.kind)) + " domain [" +
                                                format_number(spec.domain.lower()) + ", " +
                                                format_number(spec.domain.upper()) + "]");
  }
  for (const auto& [code, o] : ind.outcomes) {
    if (o.event_time.has_value() != o.censored.has_value())
      throw ValidationError(row, "event_time_" + code, "event_time and censored must be given together");
    if (o.event_time && !(*o.event_time >= 0.0 && std::isfinite(*o.event_time)))
      throw ValidationError(row, "event_time_" + code, "event time must be a nonnegative number");
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != last)
    throw ValidationError(row, column, "not a number: '" + cell + "'");
  return v;
}

bool parse_flag(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell == "0") return false;
  if (cell == "1") return true;
  throw ValidationError(row, column, "expected 0 or 1, got '" + cell + "'");
}

}  // namespace

CohortDataset load_cohort(std::istream& in, const FeatureSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("cohort CSV is empty (missing header row)");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  auto header = split_csv_line(line);

  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < header.size(); ++c) col[header[c]] = c;
  if (!col.count("id")) throw SchemaError("missing column 'id'");
  std::vector<std::size_t> feature_col(schema.size());
  for (std::size_t f = 0; f < schema.size(); ++f) {
    auto it = col.find(schema[f].name);
    if (it == col.end()) throw SchemaError("missing column '" + schema[f].name + "'");
    feature_col[f] = it->second;
  }

  struct OutcomeCols {
    std::optional<std::size_t> label, time, censored;
  };
  std::map<std::string, OutcomeCols> outcome_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.starts_with("label_")) outcome_cols[h.substr(6)].label = c;
    else if (h.starts_with("event_time_")) outcome_cols[h.substr(11)].time = c;
    else if (h.starts_with("censored_")) outcome_cols[h.substr(9)].censored = c;
  }

  std::vector<Individual> individuals;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ValidationError(row, "*", "expected " + std::to_string(header.size()) + " cells, got " +
                                          std::to_string(cells.size()));
    Individual ind;
    ind.id = cells[col["id"]];
    if (ind.id.empty()) throw ValidationError(row, "id", "empty id");
    ind.values.resize(static_cast<Eigen::Index>(schema.size()));
    for (std::size_t f = 0; f < schema.size(); ++f)
      ind.values[static_cast<Eigen::Index>(f)] = parse_number(cells[feature_col[f]], row, schema[f].name);
    for (const auto& [code, oc] : outcome_cols) {
      Outcome o;
      if (oc.label && !cells[*oc.label].empty()) {
        o.label = parse_flag(cells[*oc.label], row, "label_" + code) ? Label::diseased : Label::healthy;
      }
      if (oc.time && !cells[*oc.time].empty()) o.event_time = parse_number(cells[*oc.time], row, "event_time_" + code);
      if (oc.censored && !cells[*oc.censored].empty())
        o.censored = parse_flag(cells[*oc.censored], row, "censored_" + code);
      if (o.label || o.event_time || o.censored) ind.outcomes.emplace(code, o);
    }
    validate_individual(schema, ind, row);
    individuals.push_back(std::move(ind));
    ++row;
  }
  return CohortDataset(schema, std::move(individuals));
}

CohortDataset load_cohort_file(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open cohort file '" + path + "'");
  return load_cohort(in, schema);
}

void write_cohort(std::ostream& out, const CohortDataset& cohort) {
  const auto& schema = cohort.schema();
  auto codes = cohort.disease_codes();
  std::set<std::string> timed;
  for (const auto& ind : cohort.individuals())
    for (const auto& [code, o] : ind.outcomes)
      if (o.event_time) timed.insert(code);

  out << "id";
  for (const auto& f : schema) out << ',' << f.name;
  for (const auto& code : codes) {
    out << ",label_" << code;
    if (timed.count(code)) out << ",event_time_" << code << ",censored_" << code;
  }
  out << '\n';
  for (const auto& ind : cohort.individuals()) {
    if (ind.id.find_first_of(",\n\r") != std::string::npos)
      throw ValidationError(0, "id", "id '" + ind.id + "' cannot be written to CSV");
    out << ind.id;
    for (Eigen::Index f = 0; f < ind.values.size(); ++f) out << ',' << format_number(ind.values[f]);
    for (const auto& code : codes) {
      auto it = ind.outcomes.find(code);
      const Outcome* o = it == ind.outcomes.end() ? nullptr : &it->second;
      out << ',';
      if (o && o->label) out << (*o->label == Label::diseased ? '1' : '0');
      if (timed.count(code)) {
        out << ',';
        if (o && o->event_time) out << format_number(*o->event_time);
        out << ',';
        if (o && o->censored) out << (*o->censored ? '1' : '0');
      }
    }
    out << '\n';
  }
}

}  // namespace protopal
