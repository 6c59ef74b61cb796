#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "protopal/bundle.hpp"

namespace protopal {

/// Immutable model state served to requests. Handlers hold a shared_ptr for
/// the whole request, so a reload never mixes two snapshots in one answer.
struct Snapshot {
  ModelBundle bundle;
  std::string source;
  std::uint64_t generation = 0;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Transport-independent implementation of the /v1 endpoints:
///   GET  /v1/schema, /v1/diseases, /v1/prototypes/{disease}[?features=a,b]
///   POST /v1/risk, /v1/explain, /v1/simulate, /v1/plan, /v1/reload
/// Individuals arrive in raw units and are standardized per model.
class Api {
 public:
  explicit Api(ModelBundle bundle, std::string source = {});
  static Api from_file(const std::string& path);

  /// `target` is the request path including any query string.
  ApiResponse handle(std::string_view method, std::string_view target, std::string_view body);

  std::shared_ptr<const Snapshot> snapshot() const;
  /// Atomically replaces the served snapshot.
  std::uint64_t swap(ModelBundle bundle, std::string source);

 private:
  ApiResponse reload(const nlohmann::json& body);

  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> current_;
};

/// HTTP/1.1 front end over an Api.
class Service {
 public:
  explicit Service(Api& api);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds host:port (port 0 picks a free port); returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Splits "host:port"; a bare host uses port 8080.
std::pair<std::string, int> parse_address(const std::string& addr);

}  // namespace protopal
