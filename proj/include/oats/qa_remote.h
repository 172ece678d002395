#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "json.hpp"
#include "oats/parallel.h"
#include "oats/qa.h"

namespace httplib {
class Server;
}

namespace oats {

struct RemoteQaOptions {
  std::chrono::milliseconds timeout{30000};
  int max_inflight = 4;
  int retries = 1;  // extra attempts after a transport failure
};

// Client for the QA wire protocol (POST /v1/answer, GET /v1/health).
class RemoteQaBackend : public QaBackend {
 public:
  explicit RemoteQaBackend(std::string base_url, RemoteQaOptions options = {});
  ~RemoteQaBackend() override;

  // Throws kBackendUnreachable after the retry budget is spent, and
  // kProtocolViolation on non-200 status or unparsable bodies.
  BackendResponse Answer(std::string_view question, std::string_view context) const override;
  nlohmann::json Health() const;

  const std::string &base_url() const { return base_url_; }

 private:
  std::string base_url_;
  RemoteQaOptions options_;
  std::unique_ptr<InflightLimit> slots_;
};

// Serves the QA wire protocol over any backend (the stub in practice).
class QaServer {
 public:
  QaServer(std::shared_ptr<const QaBackend> backend, std::string model_name);
  ~QaServer();

  // Returns false when the port cannot be bound.
  bool Bind(const std::string &host, int port);
  // Binds an ephemeral port and returns it, or -1.
  int BindAnyPort(const std::string &host);
  // Blocks until Stop().
  bool Listen();
  void Stop();
  void WaitUntilReady() const;

 private:
  std::shared_ptr<const QaBackend> backend_;
  std::string model_name_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace oats
