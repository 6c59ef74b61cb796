#include <CLI11.hpp>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "protopal/bundle.hpp"
#include "protopal/cox.hpp"
#include "protopal/evaluation.hpp"
#include "protopal/json_io.hpp"
#include "protopal/lvq.hpp"
#include "protopal/service.hpp"
#include "protopal/synthetic.hpp"
#include "protopal/twin.hpp"

namespace {

using namespace protopal;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

struct GenerateArgs {
  std::string config, out, schema_out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
};

int run_generate(const GenerateArgs& a) {
  auto cfg = a.config.empty() ? GeneratorConfig::defaults() : GeneratorConfig::from_json(read_file(a.config));
  if (a.seed) cfg.seed = *a.seed;
  if (a.n) cfg.n = *a.n;
  auto cohort = generate_synthetic_cohort(cfg);
  auto out = open_out(a.out);
  write_cohort(out, cohort);
  if (!a.schema_out.empty()) open_out(a.schema_out) << schema_to_json(cfg.schema) << '\n';
  std::cout << "wrote " << cohort.size() << " individuals to " << a.out << '\n';
  return 0;
}

struct TrainArgs {
  std::string cohort, schema, diseases, config, out_bundle;
  double holdout = 0.2;
  std::uint64_t split_seed = 7;
  std::optional<std::size_t> epochs, prototypes_per_class, tangent_dim;
  std::optional<std::uint64_t> seed;
  std::string measure;
};

int run_train(const TrainArgs& a) {
  FeatureSchema schema = a.schema.empty() ? FeatureSchema::default_schema() : load_schema_file(a.schema);
  auto cohort = load_cohort_file(a.cohort, schema);
  TrainingConfig tc;
  AutoencoderConfig ac;
  if (!a.config.empty()) {
    auto j = json::parse(read_file(a.config));
    if (j.contains("training") || j.contains("autoencoder")) {
      if (j.contains("training")) tc = training_config_from_json(j["training"]);
      if (j.contains("autoencoder")) ac = autoencoder_config_from_json(j["autoencoder"]);
    } else {
      tc = training_config_from_json(j);
    }
  }
  if (a.epochs) tc.epochs = *a.epochs;
  if (a.prototypes_per_class) tc.prototypes_per_class = *a.prototypes_per_class;
  if (a.tangent_dim) tc.tangent_dim = *a.tangent_dim;
  if (a.seed) tc.seed = *a.seed;
  if (!a.measure.empty()) tc.measure = parse_measure(a.measure);
  if (a.holdout < 0.0 || a.holdout >= 1.0) throw Error("--holdout must lie in [0, 1)");

  auto split = split_indices(cohort.size(), a.holdout, a.split_seed);
  auto train_set = cohort.subset(split.train);
  auto codes = a.diseases.empty() ? train_set.disease_codes() : split_list(a.diseases);
  if (codes.empty()) throw Error("no disease labels found in cohort");

  ModelBundle bundle;
  bundle.schema = schema;
  bundle.standardizer = Standardizer::fit(train_set);
  for (const auto& code : codes) {
    std::cerr << "training " << code << "..." << std::endl;
    auto model = train(train_set, code, tc);
    ac.seed = tc.seed;
    bundle.models.push_back(fit_autoencoders(train_set, std::move(model), ac));
  }
  bundle.metadata["holdout"] = format_number(a.holdout);
  bundle.metadata["split_seed"] = std::to_string(a.split_seed);
  bundle.metadata["n_cohort"] = std::to_string(cohort.size());
  save_bundle_file(bundle, a.out_bundle);
  std::cout << "wrote " << bundle.models.size() << " models to " << a.out_bundle << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string bundle, cohort, out_table, out_trends, trend_disease, trend_features;
  std::optional<std::uint64_t> split_seed;
  std::optional<double> holdout;
};

int run_evaluate(const EvaluateArgs& a) {
  auto bundle = load_bundle_file(a.bundle);
  for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';
  auto cohort = load_cohort_file(a.cohort, bundle.schema);
  auto meta = [&](const std::string& key, const std::string& fallback) {
    auto it = bundle.metadata.find(key);
    return it == bundle.metadata.end() ? fallback : it->second;
  };
  double holdout = a.holdout ? *a.holdout : std::stod(meta("holdout", "0.2"));
  std::uint64_t seed = a.split_seed ? *a.split_seed : std::stoull(meta("split_seed", "7"));
  if (holdout <= 0.0) holdout = 0.2;
  auto split = split_indices(cohort.size(), holdout, seed);
  auto train_set = cohort.subset(split.train);
  auto test_set = cohort.subset(split.test);

  std::map<std::string, CoxBaseline> baselines;
  for (const auto& m : bundle.models) baselines.emplace(m.disease, fit_cox_baseline(train_set, m.disease));
  auto table = compare(bundle.models, baselines, test_set);
  auto out = open_out(a.out_table);
  write_comparison_csv(out, table);
  std::cout << "cox_wins=" << table.cox_wins << " gtlvq_wins=" << table.gtlvq_wins << " ties=" << table.ties << '\n';

  if (!a.out_trends.empty()) {
    const TrainedDiseaseModel* model =
        a.trend_disease.empty() ? (bundle.models.empty() ? nullptr : &bundle.models.front()) : bundle.find(a.trend_disease);
    if (!model) throw Error("no model for trend export");
    std::vector<std::string> features = split_list(a.trend_features);
    if (features.empty())
      for (const auto& f : bundle.schema) features.push_back(f.name);
    auto trends_out = open_out(a.out_trends);
    write_trends_csv(trends_out, export_prototype_trends(*model, features, &test_set));
  }
  return 0;
}

Service* active_service = nullptr;

extern "C" void handle_signal(int) {
  if (active_service) active_service->stop();
}

int run_serve(const std::string& bundle_path, std::string addr) {
  if (addr.empty()) {
    const char* env = std::getenv("PROTOPAL_ADDR");
    addr = env && *env ? env : "127.0.0.1:8080";
  }
  auto [host, port] = parse_address(addr);
  Api api = Api::from_file(bundle_path);
  for (const auto& w : api.snapshot()->bundle.warnings) std::cerr << "warning: " << w << '\n';
  Service service(api);
  int bound = service.bind(host, port);
  if (bound < 0) throw Error("cannot bind " + addr);
  std::cout << "listening on " << host << ':' << bound << std::endl;
  active_service = &service;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  bool ok = service.listen();
  active_service = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"protopal: prototype-based disease risk models with digital twins"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic cohort CSV");
  generate->add_option("--config", gen.config, "Generator config JSON (defaults if omitted)");
  generate->add_option("--seed", gen.seed, "Override the generator seed");
  generate->add_option("--n", gen.n, "Override the cohort size");
  generate->add_option("--out", gen.out, "Output cohort CSV")->required();
  generate->add_option("--schema-out", gen.schema_out, "Also write the schema JSON");

  TrainArgs tr;
  auto* trainc = app.add_subcommand("train", "Train per-disease models and write a bundle");
  trainc->add_option("--cohort", tr.cohort, "Cohort CSV")->required();
  trainc->add_option("--schema", tr.schema, "Schema JSON (default schema if omitted)");
  trainc->add_option("--diseases", tr.diseases, "Comma-separated ICD-10 codes (all labelled if omitted)");
  trainc->add_option("--config", tr.config, "Training config JSON");
  trainc->add_option("--out-bundle", tr.out_bundle, "Output bundle")->required();
  trainc->add_option("--holdout", tr.holdout, "Fraction held out for evaluation")->capture_default_str();
  trainc->add_option("--split-seed", tr.split_seed, "Seed of the train/test split")->capture_default_str();
  trainc->add_option("--epochs", tr.epochs);
  trainc->add_option("--prototypes-per-class", tr.prototypes_per_class);
  trainc->add_option("--tangent-dim", tr.tangent_dim);
  trainc->add_option("--measure", tr.measure, "euclidean, relevance or tangent");
  trainc->add_option("--seed", tr.seed);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compare against a Cox baseline on the held-out split");
  evaluate->add_option("--bundle", ev.bundle)->required();
  evaluate->add_option("--cohort", ev.cohort)->required();
  evaluate->add_option("--split-seed", ev.split_seed, "Defaults to the seed recorded in the bundle");
  evaluate->add_option("--holdout", ev.holdout, "Defaults to the fraction recorded in the bundle");
  evaluate->add_option("--out-table", ev.out_table)->required();
  evaluate->add_option("--out-trends", ev.out_trends, "Prototype trend CSV");
  evaluate->add_option("--trend-disease", ev.trend_disease);
  evaluate->add_option("--trend-features", ev.trend_features, "Comma-separated feature names");

  std::string serve_bundle, serve_addr;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--bundle", serve_bundle)->required();
  serve->add_option("--addr", serve_addr, "host:port (default $PROTOPAL_ADDR or 127.0.0.1:8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*trainc) return run_train(tr);
    if (*evaluate) return run_evaluate(ev);
    if (*serve) return run_serve(serve_bundle, serve_addr);
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
