#include "protopal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "protopal/standardizer.hpp"

namespace protopal {

using nlohmann::json;

namespace {

double upper_normal_quantile(double p) {
  // t with P(Z > t) = p, by bisection on the complementary error function.
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

FeatureProfile fallback_profile(const FeatureSpec& f) {
  const auto& d = f.domain;
  if (d.kind == DomainKind::binary) return {0.5, 0.5};
  return {0.5 * (d.lower() + d.upper()), (d.upper() - d.lower()) / 6.0};
}

std::vector<std::size_t> generation_order(const GeneratorConfig& cfg,
                                          const std::vector<std::vector<std::pair<std::size_t, double>>>& parents) {
  const std::size_t d = cfg.schema.size();
  std::vector<int> pending(d, 0);
  std::vector<std::vector<std::size_t>> children(d);
  for (std::size_t f = 0; f < d; ++f)
    for (auto [g, _] : parents[f]) {
      ++pending[f];
      children[g].push_back(f);
    }
  std::set<std::size_t> ready;
  for (std::size_t f = 0; f < d; ++f)
    if (pending[f] == 0) ready.insert(f);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto f = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(f);
    for (auto c : children[f])
      if (--pending[c] == 0) ready.insert(c);
  }
  if (order.size() != d) throw SchemaError("generator coupling contains a cycle");
  return order;
}

}  // namespace

SyntheticCohort generate_planted_cohort(const GeneratorConfig& cfg) {
  const auto& schema = cfg.schema;
  const std::size_t d = schema.size();
  if (cfg.n == 0) throw Error("generator needs n > 0");
  if (!(cfg.horizon_quantile > 0.0 && cfg.horizon_quantile <= 1.0))
    throw Error("horizon_quantile must lie in (0, 1]");

  std::vector<FeatureProfile> profile(d);
  for (std::size_t f = 0; f < d; ++f) {
    auto it = cfg.profiles.find(schema[f].name);
    profile[f] = it != cfg.profiles.end() ? it->second : fallback_profile(schema[f]);
    if (schema[f].domain.kind == DomainKind::binary) {
      if (!(profile[f].mean > 0.0 && profile[f].mean < 1.0))
        throw SchemaError("binary profile for '" + schema[f].name + "' needs prevalence in (0, 1)");
      profile[f].sd = std::sqrt(profile[f].mean * (1.0 - profile[f].mean));
    } else if (!(profile[f].sd > 0.0)) {
      throw SchemaError("profile for '" + schema[f].name + "' needs sd > 0");
    }
  }
  for (const auto& [name, _] : cfg.profiles) schema.require_index(name);

  std::vector<std::vector<std::pair<std::size_t, double>>> parents(d);
  for (const auto& [target, sources] : cfg.coupling) {
    auto t = schema.require_index(target);
    for (const auto& [source, w] : sources) parents[t].emplace_back(schema.require_index(source), w);
  }
  auto order = generation_order(cfg, parents);

  std::vector<double> threshold(d, 0.0);
  for (std::size_t f = 0; f < d; ++f)
    if (schema[f].domain.kind == DomainKind::binary) threshold[f] = upper_normal_quantile(profile[f].mean);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Individual> people(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    Eigen::VectorXd value(static_cast<Eigen::Index>(d));
    std::vector<double> z(d, 0.0);
    for (auto f : order) {
      const auto& dom = schema[f].domain;
      double latent = 0.0;
      for (auto [g, w] : parents[f]) latent += w * z[g];
      latent += (parents[f].empty() ? 1.0 : cfg.noise_scale) * normal(rng);
      double v = 0.0;
      switch (dom.kind) {
        case DomainKind::continuous:
          v = dom.clamp(std::round((profile[f].mean + profile[f].sd * latent) * 100.0) / 100.0);
          break;
        case DomainKind::ordinal: v = dom.clamp(profile[f].mean + profile[f].sd * latent); break;
        case DomainKind::binary: v = latent > threshold[f] ? 1.0 : 0.0; break;
      }
      value[static_cast<Eigen::Index>(f)] = v;
      z[f] = (v - profile[f].mean) / profile[f].sd;
    }
    people[i].id = "S" + std::to_string(i + 1);
    people[i].values = std::move(value);
  }

  SyntheticCohort out;
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(cfg.n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < cfg.n; ++i) raw.row(static_cast<Eigen::Index>(i)) = people[i].values.transpose();
  Eigen::MatrixXd zs = Standardizer::fit(raw).apply_rows(raw);

  std::set<std::string> seen;
  for (const auto& dis : cfg.diseases) {
    if (dis.code.empty() || !seen.insert(dis.code).second)
      throw SchemaError("disease codes must be non-empty and unique");
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (const auto& [name, w] : dis.beta) beta[static_cast<Eigen::Index>(schema.require_index(name))] = w;
    Eigen::VectorXd eta = (zs * beta).array() + dis.intercept;
    for (const auto& cl : dis.clusters) {
      if (!(cl.width > 0.0)) throw SchemaError("cluster width must be positive");
      for (const auto& [name, _] : cl.center) schema.require_index(name);
    }
    if (!dis.clusters.empty()) {
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double best = 0.0;
        for (const auto& cl : dis.clusters) {
          double sq = 0.0;
          for (const auto& [name, c] : cl.center) {
            double delta = zs(i, static_cast<Eigen::Index>(schema.require_index(name))) - c;
            sq += delta * delta;
          }
          best = std::max(best, std::exp(-sq / (2.0 * cl.width * cl.width)));
        }
        eta[i] += dis.cluster_gain * best;
      }
    }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> times(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      double e = eta[static_cast<Eigen::Index>(i)];
      double p = 1.0 / (1.0 + std::exp(-e));
      bool diseased = unif(rng) < p;
      std::exponential_distribution<double> expo(std::exp(e));
      times[i] = expo(rng);
      people[i].outcomes[dis.code].label = diseased ? Label::diseased : Label::healthy;
    }
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());
    auto q = static_cast<std::size_t>(std::ceil(cfg.horizon_quantile * static_cast<double>(cfg.n))) - 1;
    double horizon = sorted[std::min(q, cfg.n - 1)];
    for (std::size_t i = 0; i < cfg.n; ++i) {
      auto& o = people[i].outcomes[dis.code];
      o.censored = times[i] > horizon;
      o.event_time = std::min(times[i], horizon);
    }
    out.planted_scores[dis.code] = std::move(eta);
    out.horizons[dis.code] = horizon;
  }

  out.dataset = CohortDataset(schema, std::move(people));
  return out;
}

CohortDataset generate_synthetic_cohort(const GeneratorConfig& config) {
  return generate_planted_cohort(config).dataset;
}

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig c;
  c.profiles = {
      {"age", {52, 13}},        {"sex", {0.5, 0}},         {"height", {163, 9}},
      {"weight", {62, 11}},     {"bmi", {23, 3.4}},        {"waist", {82, 9}},
      {"sbp", {124, 16}},       {"dbp", {76, 11}},         {"ast", {23, 9}},
      {"alt", {22, 14}},        {"ggt", {35, 30}},         {"hdl", {62, 15}},
      {"ldl", {122, 30}},       {"tg", {105, 55}},         {"glucose", {98, 16}},
      {"hba1c", {5.7, 0.6}},    {"uric_acid", {5.3, 1.3}}, {"smoking", {0.6, 0.8}},
      {"exercise", {1.3, 1.0}}, {"walking", {0.45, 0}},    {"alcohol", {2.2, 2.2}},
      {"late_dinner", {0.3, 0}}, {"skip_breakfast", {0.2, 0}}, {"eating_speed", {1.0, 0.7}},
      {"sleep_ok", {0.65, 0}},  {"hx_stroke", {0.03, 0}},  {"hx_heart", {0.06, 0}},
      {"hx_kidney", {0.03, 0}}, {"hx_anemia", {0.08, 0}},  {"med_ht", {0.18, 0}},
      {"med_dm", {0.07, 0}},    {"med_hl", {0.15, 0}},
  };
  c.coupling = {
      {"height", {{"sex", 0.8}}},
      {"weight", {{"height", 0.5}, {"sex", 0.3}, {"exercise", -0.35}, {"walking", -0.15},
                  {"eating_speed", 0.25}, {"late_dinner", 0.2}, {"alcohol", 0.1}}},
      {"bmi", {{"weight", 1.0}, {"height", -0.45}}},
      {"waist", {{"bmi", 0.85}, {"exercise", -0.2}}},
      {"sbp", {{"age", 0.45}, {"bmi", 0.3}, {"alcohol", 0.25}, {"smoking", 0.1}, {"exercise", -0.2}}},
      {"dbp", {{"sbp", 0.8}}},
      {"ast", {{"alcohol", 0.45}, {"bmi", 0.2}}},
      {"alt", {{"ast", 0.6}, {"bmi", 0.3}}},
      {"ggt", {{"alcohol", 0.6}, {"bmi", 0.2}, {"smoking", 0.1}}},
      {"hdl", {{"exercise", 0.4}, {"smoking", -0.2}, {"bmi", -0.3}, {"sex", -0.35}, {"alcohol", 0.1}}},
      {"ldl", {{"bmi", 0.25}, {"age", 0.2}, {"late_dinner", 0.15}, {"exercise", -0.1}}},
      {"tg", {{"bmi", 0.35}, {"alcohol", 0.3}, {"exercise", -0.3}, {"skip_breakfast", 0.15}}},
      {"glucose", {{"bmi", 0.3}, {"age", 0.3}, {"exercise", -0.35}, {"late_dinner", 0.15},
                   {"sleep_ok", -0.1}}},
      {"hba1c", {{"glucose", 0.85}}},
      {"uric_acid", {{"sex", 0.4}, {"alcohol", 0.3}, {"bmi", 0.3}}},
      {"hx_stroke", {{"age", 0.6}, {"sbp", 0.3}}},
      {"hx_heart", {{"age", 0.6}, {"ldl", 0.2}}},
      {"hx_kidney", {{"age", 0.4}, {"sbp", 0.3}}},
      {"hx_anemia", {{"sex", -0.5}}},
      {"med_ht", {{"sbp", 0.9}}},
      {"med_dm", {{"hba1c", 0.9}}},
      {"med_hl", {{"ldl", 0.8}}},
  };
  c.diseases = {
      {"E11", disease_name("E11"), -2.2,
       {{"hba1c", 1.3}, {"glucose", 0.8}, {"bmi", 0.5}, {"age", 0.4}, {"exercise", -0.3}}, {}, 0.0},
      {"I10", disease_name("I10"), -1.6, {{"sbp", 1.5}, {"age", 0.6}, {"bmi", 0.4}, {"alcohol", 0.3}}, {}, 0.0},
      {"K70", disease_name("K70"), -2.6, {{"alcohol", 1.4}, {"ggt", 1.0}, {"ast", 0.5}}, {}, 0.0},
      {"E78", disease_name("E78"), -3.0, {{"ldl", 0.6}},
       {{{{"ldl", 1.4}, {"tg", 1.4}}, 0.9}, {{{"ldl", 1.4}, {"hdl", -1.4}}, 0.9}}, 5.0},
  };
  return c;
}

namespace {

json disease_json(const PlantedDisease& d) {
  json clusters = json::array();
  for (const auto& c : d.clusters) clusters.push_back({{"center", c.center}, {"width", c.width}});
  return {{"code", d.code},   {"name", d.name},         {"intercept", d.intercept},
          {"beta", d.beta},   {"clusters", clusters},   {"cluster_gain", d.cluster_gain}};
}

}  // namespace

GeneratorConfig GeneratorConfig::from_json(const std::string& text) {
  GeneratorConfig c = defaults();
  try {
    json j = json::parse(text);
    c.n = j.value("n", c.n);
    c.seed = j.value("seed", c.seed);
    c.noise_scale = j.value("noise_scale", c.noise_scale);
    c.horizon_quantile = j.value("horizon_quantile", c.horizon_quantile);
    if (j.contains("schema")) {
      c.schema = schema_from_json(j.at("schema").dump());
      std::erase_if(c.profiles, [&](const auto& kv) { return !c.schema.index_of(kv.first); });
      std::erase_if(c.coupling, [&](const auto& kv) { return !c.schema.index_of(kv.first); });
      for (auto& [_, sources] : c.coupling)
        std::erase_if(sources, [&](const auto& kv) { return !c.schema.index_of(kv.first); });
      std::erase_if(c.coupling, [](const auto& kv) { return kv.second.empty(); });
    }
    if (j.contains("profiles"))
      for (const auto& [name, p] : j.at("profiles").items())
        c.profiles[name] = {p.value("mean", 0.0), p.value("sd", 1.0)};
    if (j.contains("coupling"))
      c.coupling = j.at("coupling").get<std::map<std::string, std::map<std::string, double>>>();
    if (j.contains("diseases")) {
      c.diseases.clear();
      for (const auto& dj : j.at("diseases")) {
        PlantedDisease d;
        d.code = dj.at("code").get<std::string>();
        d.name = dj.value("name", disease_name(d.code));
        d.intercept = dj.value("intercept", 0.0);
        d.beta = dj.value("beta", std::map<std::string, double>{});
        d.cluster_gain = dj.value("cluster_gain", 0.0);
        if (dj.contains("clusters"))
          for (const auto& cj : dj.at("clusters"))
            d.clusters.push_back({cj.at("center").get<std::map<std::string, double>>(), cj.value("width", 1.0)});
        c.diseases.push_back(std::move(d));
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed generator config: ") + e.what());
  }
  return c;
}

std::string GeneratorConfig::to_json() const {
  json profiles_j = json::object();
  for (const auto& [name, p] : profiles) profiles_j[name] = {{"mean", p.mean}, {"sd", p.sd}};
  json diseases_j = json::array();
  for (const auto& d : diseases) diseases_j.push_back(disease_json(d));
  json j{{"n", n},
         {"seed", seed},
         {"noise_scale", noise_scale},
         {"horizon_quantile", horizon_quantile},
         {"schema", json::parse(schema_to_json(schema)).at("features")},
         {"profiles", profiles_j},
         {"coupling", coupling},
         {"diseases", diseases_j}};
  return j.dump(2);
}

std::string disease_name(const std::string& code) {
  static const std::map<std::string, std::string> names = {
      {"I10", "Essential (primary) hypertension"},
      {"I20", "Angina pectoris"},
      {"I21", "Acute myocardial infarction"},
      {"I42", "Cardiomyopathy"},
      {"I48", "Atrial fibrillation and flutter"},
      {"I50", "Heart failure"},
      {"I60", "Subarachnoid haemorrhage"},
      {"I61", "Intracerebral haemorrhage"},
      {"I63", "Cerebral infarction"},
      {"I70", "Atherosclerosis"},
      {"E11", "Type 2 diabetes mellitus"},
      {"E78", "Disorders of lipoprotein metabolism"},
      {"K70", "Alcoholic liver disease"},
      {"K74", "Fibrosis and cirrhosis of liver"},
      {"K75", "Other inflammatory liver diseases"},
      {"K76", "Other diseases of liver"},
      {"N18", "Chronic kidney disease"},
  };
  auto it = names.find(code);
  return it == names.end() ? code : it->second;
}

}  // namespace protopal
