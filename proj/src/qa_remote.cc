#include "oats/qa_remote.h"

#include "httplib.h"
#include "oats/error.h"
#include "oats/log.h"

namespace oats {

namespace {

template <typename Rep, typename Period>
void ConfigureTimeouts(httplib::Client &client, std::chrono::duration<Rep, Period> timeout) {
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
}

}  // namespace

RemoteQaBackend::RemoteQaBackend(std::string base_url, RemoteQaOptions options)
    : base_url_(std::move(base_url)),
      options_(options),
      slots_(std::make_unique<InflightLimit>(std::clamp(options.max_inflight, 1, 1024))) {}

RemoteQaBackend::~RemoteQaBackend() = default;

BackendResponse RemoteQaBackend::Answer(std::string_view question,
                                        std::string_view context) const {
  const std::string body =
      nlohmann::json{{"question", question}, {"context", context}}.dump();
  httplib::Result res;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    SlotGuard slot(*slots_);
    httplib::Client client(base_url_);
    ConfigureTimeouts(client, options_.timeout);
    res = client.Post("/v1/answer", body, "application/json");
    if (res) break;
    LogDebug("qa request to " + base_url_ + " failed (attempt " + std::to_string(attempt + 1) +
             "): " + httplib::to_string(res.error()));
  }
  if (!res) {
    throw Error(ErrorCode::kBackendUnreachable,
                base_url_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProtocolViolation,
                base_url_ + ": HTTP " + std::to_string(res->status) + " " + res->body);
  }
  try {
    return ResponseFromJson(nlohmann::json::parse(res->body));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kProtocolViolation, base_url_ + ": " + e.what());
  }
}

nlohmann::json RemoteQaBackend::Health() const {
  httplib::Client client(base_url_);
  ConfigureTimeouts(client, options_.timeout);
  auto res = client.Get("/v1/health");
  if (!res) {
    throw Error(ErrorCode::kBackendUnreachable,
                base_url_ + ": " + httplib::to_string(res.error()));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kProtocolViolation, base_url_ + ": " + e.what());
  }
}

QaServer::QaServer(std::shared_ptr<const QaBackend> backend, std::string model_name)
    : backend_(std::move(backend)),
      model_name_(std::move(model_name)),
      server_(std::make_unique<httplib::Server>()) {
  // SO_REUSEPORT (httplib's default) would let a second server share a busy port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void *>(&yes),
               sizeof(yes));
  });
  server_->Get("/v1/health", [this](const httplib::Request &, httplib::Response &res) {
    res.set_content(nlohmann::json{{"status", "ok"}, {"model", model_name_}}.dump(),
                    "application/json");
  });
  server_->Post("/v1/answer", [this](const httplib::Request &req, httplib::Response &res) {
    auto bad_request = [&res](const std::string &why) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", why}}.dump(), "application/json");
    };
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception &e) {
      return bad_request(std::string("malformed JSON: ") + e.what());
    }
    if (!body.is_object() || !body.contains("question") || !body["question"].is_string() ||
        !body.contains("context") || !body["context"].is_string()) {
      return bad_request("expected {\"question\": str, \"context\": str}");
    }
    const auto question = body["question"].get<std::string>();
    const auto context = body["context"].get<std::string>();
    if (context.empty()) return bad_request("empty context");
    try {
      const BackendResponse answer = backend_->Answer(question, context);
      // Never send a span that does not slice the received context.
      ValidateResponse("", answer, DecodeUtf8(context));
      res.set_content(ResponseToJson(answer).dump(), "application/json");
    } catch (const Error &e) {
      res.status = 500;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });
}

QaServer::~QaServer() { Stop(); }

bool QaServer::Bind(const std::string &host, int port) {
  return server_->bind_to_port(host, port);
}

int QaServer::BindAnyPort(const std::string &host) { return server_->bind_to_any_port(host); }

bool QaServer::Listen() { return server_->listen_after_bind(); }

void QaServer::Stop() {
  if (server_ && server_->is_running()) server_->stop();
}

void QaServer::WaitUntilReady() const { server_->wait_until_ready(); }

}  // namespace oats
