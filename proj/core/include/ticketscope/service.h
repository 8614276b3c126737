#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ticketscope/corpus.h"
#include "ticketscope/pipeline.h"

namespace httplib {
class Server;
}

namespace ticketscope {

struct ServiceOptions {
  PipelineConfig config;
  ContentScope similar_scope = ContentScope::Combined;
  std::size_t max_k = 100;
  // Receives one JSON object per request; defaults to a line on stderr.
  std::function<void(const nlohmann::json&)> request_log;
};

struct HttpRequest {
  std::string method;  // "GET" or "POST"
  std::string path;
  std::map<std::string, std::string> params;  // query string
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceSnapshot;

// Read-only JSON API over a model store. Requests run against an immutable
// snapshot; reload() builds a new snapshot and swaps it in whole. When the
// store was built from a different corpus the service still starts, but every
// endpoint answers 409 with the mismatch.
class Service {
 public:
  Service(std::filesystem::path store, std::shared_ptr<const Corpus> corpus, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void reload();
  // Empty when the store matches the corpus.
  std::string store_mismatch() const;

  HttpResponse handle(const HttpRequest& request) const;

  // Binds to host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  void run();  // blocks until stop()
  void stop();

 private:
  std::shared_ptr<const ServiceSnapshot> snapshot() const;
  HttpResponse dispatch(const ServiceSnapshot& snap, const HttpRequest& request) const;

  ModelStore store_;
  std::shared_ptr<const Corpus> corpus_;
  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::shared_ptr<const ServiceSnapshot> snapshot_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace ticketscope
