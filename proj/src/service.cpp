#include "protopal/service.hpp"

#include <httplib.h>

#include "protopal/json_io.hpp"
#include "protopal/planner.hpp"
#include "protopal/risk.hpp"
#include "protopal/twin.hpp"

namespace protopal {

using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& message, const std::string& field = {}) {
  json body{{"error", message}};
  if (!field.empty()) body["field"] = field;
  return {status, body};
}

struct NotFound : Error {
  using Error::Error;
};

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw RequestError("body", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw RequestError("body", std::string("malformed JSON: ") + e.what());
  }
}

const TrainedDiseaseModel& require_model(const Snapshot& snap, const json& body) {
  if (!body.contains("disease") || !body["disease"].is_string()) throw RequestError("disease", "expected a disease code");
  auto code = body["disease"].get<std::string>();
  const auto* m = snap.bundle.find(code);
  if (!m) throw NotFound("unknown disease '" + code + "'");
  if (!m->autoencoders_fitted()) throw Error("model for '" + code + "' has no fitted autoencoders");
  return *m;
}

Individual require_individual(const Snapshot& snap, const json& body) {
  if (!body.contains("individual")) throw RequestError("individual", "missing individual");
  return individual_from_json(body["individual"], snap.bundle.schema);
}

std::map<std::string, std::string> parse_query(std::string_view q) {
  std::map<std::string, std::string> out;
  while (!q.empty()) {
    auto amp = q.find('&');
    auto part = q.substr(0, amp);
    auto eq = part.find('=');
    std::string key(part.substr(0, eq));
    std::string value = eq == std::string_view::npos ? "" : std::string(part.substr(eq + 1));
    out[httplib::detail::decode_url(key, true)] = httplib::detail::decode_url(value, true);
    if (amp == std::string_view::npos) break;
    q.remove_prefix(amp + 1);
  }
  return out;
}

json explain(const Snapshot& snap, const json& body) {
  const auto& model = require_model(snap, body);
  auto ind = require_individual(snap, body);
  const auto& schema = model.schema;
  auto risk = score_disease(ind.values, model);
  auto twins = make_full_twins(ind, model);
  auto profile = [&](std::size_t j) {
    return json{{"index", j},
                {"class", to_string(model.prototypes[j].label)},
                {"profile", values_json(model.standardizer.invert(model.prototypes[j].w), schema)},
                {"lifestyle", assignments_json(prototype_lifestyle(model, j))}};
  };
  json comparison = json::array();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto i = static_cast<Eigen::Index>(f);
    comparison.push_back({{"feature", schema[f].name},
                          {"group", to_string(schema[f].group)},
                          {"mutability", to_string(schema[f].mutability)},
                          {"individual", ind.values[i]},
                          {"healthy_twin", twins.healthy.values[i]},
                          {"diseased_twin", twins.diseased.values[i]}});
  }
  return {{"disease", model.disease},
          {"name", model.name},
          {"risk", to_json(risk)},
          {"nearest_healthy", profile(twins.nearest_healthy)},
          {"nearest_diseased", profile(twins.nearest_diseased)},
          {"healthy_twin", to_json(twins.healthy, schema)},
          {"diseased_twin", to_json(twins.diseased, schema)},
          {"comparison", comparison}};
}

json simulate_request(const Snapshot& snap, const json& body) {
  const auto& model = require_model(snap, body);
  auto ind = require_individual(snap, body);
  auto assignments = assignments_from_json(body.value("assignments", json::object()));
  std::size_t prototype = 0;
  if (body.contains("prototype")) {
    if (!body["prototype"].is_number_unsigned()) throw RequestError("prototype", "expected a prototype index");
    prototype = body["prototype"].get<std::size_t>();
    if (prototype >= model.prototypes.size()) throw RequestError("prototype", "prototype index out of range");
  } else {
    prototype = nearest_of_class(model.standardize(ind.values), model.prototypes, Label::healthy);
  }
  return to_json(simulate(ind, assignments, prototype, model), model.schema);
}

json plan_request(const Snapshot& snap, const json& body) {
  const auto& model = require_model(snap, body);
  auto ind = require_individual(snap, body);
  PlannerConfig cfg;
  try {
    if (body.contains("stop_policy")) cfg.stop_policy = parse_stop_policy(body["stop_policy"].get<std::string>());
    cfg.max_steps = body.value("max_steps", cfg.max_steps);
    cfg.step_size = body.value("step_size", cfg.step_size);
    cfg.recompute_target = body.value("recompute_target", cfg.recompute_target);
  } catch (const json::exception& e) {
    throw RequestError("plan", std::string("bad planner option: ") + e.what());
  } catch (const Error& e) {
    throw RequestError("stop_policy", e.what());
  }
  if (cfg.step_size < 1) throw RequestError("step_size", "must be at least 1");
  return to_json(plan(ind, model, cfg), model.schema);
}

json risk_request(const Snapshot& snap, const json& body) {
  auto ind = require_individual(snap, body);
  std::vector<TrainedDiseaseModel> selected;
  std::span<const TrainedDiseaseModel> models(snap.bundle.models);
  if (body.contains("diseases")) {
    if (!body["diseases"].is_array()) throw RequestError("diseases", "expected an array of codes");
    for (const auto& c : body["diseases"]) {
      if (!c.is_string()) throw RequestError("diseases", "expected an array of codes");
      const auto* m = snap.bundle.find(c.get<std::string>());
      if (!m) throw NotFound("unknown disease '" + c.get<std::string>() + "'");
      selected.push_back(*m);
    }
    models = selected;
  }
  return to_json(risk_report(ind, snap.bundle.schema, models));
}

json prototypes_request(const Snapshot& snap, const std::string& code, const std::map<std::string, std::string>& query) {
  const auto* m = snap.bundle.find(code);
  if (!m) throw NotFound("unknown disease '" + code + "'");
  std::vector<std::string> features;
  auto it = query.find("features");
  if (it != query.end()) {
    std::string_view rest = it->second;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string name(rest.substr(0, comma));
      if (!name.empty()) {
        if (!m->schema.index_of(name)) throw RequestError("features", "unknown feature '" + name + "'");
        features.push_back(name);
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  } else {
    for (const auto& f : m->schema) features.push_back(f.name);
  }
  json out = to_json(export_prototype_trends(*m, features));
  out["measure"] = to_string(m->prototypes.measure());
  return out;
}

}  // namespace

Api::Api(ModelBundle bundle, std::string source) {
  current_ = std::make_shared<const Snapshot>(Snapshot{std::move(bundle), std::move(source), 1});
}

Api Api::from_file(const std::string& path) { return Api(load_bundle_file(path), path); }

std::shared_ptr<const Snapshot> Api::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::uint64_t Api::swap(ModelBundle bundle, std::string source) {
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<const Snapshot>(Snapshot{std::move(bundle), std::move(source), current_->generation + 1});
  current_ = std::move(next);
  return current_->generation;
}

ApiResponse Api::reload(const json& body) {
  std::string path = snapshot()->source;
  if (body.contains("bundle")) {
    if (!body["bundle"].is_string()) throw RequestError("bundle", "expected a file path");
    path = body["bundle"].get<std::string>();
  }
  if (path.empty()) throw RequestError("bundle", "no bundle path to reload from");
  ModelBundle bundle;
  try {
    bundle = load_bundle_file(path);
  } catch (const BundleError& e) {
    return error(409, std::string("reload failed, keeping current snapshot: ") + e.what(), "bundle");
  }
  auto diseases = bundle.models.size();
  auto gen = swap(std::move(bundle), path);
  return {200, {{"status", "reloaded"}, {"generation", gen}, {"diseases", diseases}}};
}

ApiResponse Api::handle(std::string_view method, std::string_view target, std::string_view body) {
  std::string_view path = target, query;
  if (auto q = target.find('?'); q != std::string_view::npos) {
    path = target.substr(0, q);
    query = target.substr(q + 1);
  }
  auto snap = snapshot();
  try {
    if (path == "/v1/schema" || path == "/v1/diseases" || path.starts_with("/v1/prototypes/")) {
      if (method != "GET") return error(405, "method not allowed");
      if (path == "/v1/schema") return {200, schema_json(snap->bundle.schema)};
      if (path == "/v1/diseases") {
        json list = json::array();
        for (const auto& m : snap->bundle.models)
          list.push_back({{"code", m.disease},
                          {"name", m.name},
                          {"prototypes", m.prototypes.size()},
                          {"measure", to_string(m.prototypes.measure())}});
        return {200, {{"diseases", list}}};
      }
      std::string code = httplib::detail::decode_url(std::string(path.substr(15)), false);
      return {200, prototypes_request(*snap, code, parse_query(query))};
    }
    if (path == "/v1/risk" || path == "/v1/explain" || path == "/v1/simulate" || path == "/v1/plan" ||
        path == "/v1/reload") {
      if (method != "POST") return error(405, "method not allowed");
      json req = parse_body(body);
      if (path == "/v1/risk") return {200, risk_request(*snap, req)};
      if (path == "/v1/explain") return {200, explain(*snap, req)};
      if (path == "/v1/simulate") return {200, simulate_request(*snap, req)};
      if (path == "/v1/plan") return {200, plan_request(*snap, req)};
      return reload(req);
    }
    return error(404, "no such endpoint: " + std::string(path));
  } catch (const RequestError& e) {
    return error(400, e.what(), e.field());
  } catch (const NotFound& e) {
    return error(404, e.what(), "disease");
  } catch (const InterventionError& e) {
    return error(400, e.what(), "assignments");
  } catch (const json::exception& e) {
    return error(400, std::string("malformed request: ") + e.what(), "body");
  } catch (const Error& e) {
    return error(422, e.what());
  }
}

struct Service::Impl {
  explicit Impl(Api& a) : api(a) {}
  Api& api;
  httplib::Server server;
};

Service::Service(Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    auto out = impl_->api.handle(req.method, req.target, req.body);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  impl_->server.Get(R"(/v1/.*)", handler);
  impl_->server.Post(R"(/v1/.*)", handler);
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::pair<std::string, int> parse_address(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) return {addr, 8080};
  std::string host = addr.substr(0, colon);
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(addr.substr(colon + 1), &used);
    if (used != addr.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw Error("invalid bind address '" + addr + "'");
  }
  if (port < 0 || port > 65535) throw Error("invalid port in '" + addr + "'");
  return {host.empty() ? "127.0.0.1" : host, port};
}

}  // namespace protopal
