// Command-line entry point: identify, summarize, eval and stub-serve.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oats/error.h"
#include "oats/log.h"
#include "oats/parallel.h"
#include "oats/pipeline.h"
#include "oats/qa_remote.h"

namespace {

oats::QaServer *g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int StubServe(const std::string &rules, const std::string &host, int port) {
  auto backend = std::make_shared<oats::StubBackend>(oats::LoadStubRules(rules));
  oats::QaServer server(backend, "stub");
  if (!server.Bind(host, port)) {
    oats::LogError("cannot bind " + host + ":" + std::to_string(port));
    return 2;
  }
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  oats::LogInfo("stub QA server listening on " + host + ":" + std::to_string(port));
  const bool ok = server.Listen();
  g_server = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Ontology-guided, question-driven extractive summarization"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = oats::DefaultJobs();

  auto *identify = app.add_subcommand("identify", "Judge document relevance per risk factor");
  identify->add_option("--config", config_path, "Pipeline config JSON")->required();
  identify->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string filter;
  auto *summarize = app.add_subcommand("summarize", "Build question-driven summaries");
  summarize->add_option("--config", config_path, "Pipeline config JSON")->required();
  summarize->add_option("--filter", filter, "Verdicts JSONL; summarize relevant docs only");
  summarize->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string pred, gold, rubric, out;
  auto *eval = app.add_subcommand("eval", "Precision/recall and rubric aggregation");
  eval->add_option("--pred", pred, "Predicted verdicts JSONL");
  eval->add_option("--gold", gold, "Gold labels JSON");
  eval->add_option("--rubric", rubric, "Rubric sheet CSV");
  eval->add_option("--out", out, "Write the report here instead of stdout");

  std::string rules, host = "127.0.0.1";
  int port = 0;
  auto *serve = app.add_subcommand("stub-serve", "Serve the QA protocol from stub rules");
  serve->add_option("--rules", rules, "Stub rules JSON")->required();
  serve->add_option("--port", port, "TCP port")->required()->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*identify) {
      auto result = oats::RunIdentify(oats::LoadPipelineConfig(config_path), jobs);
      oats::LogInfo("wrote " + std::to_string(result.verdicts.size()) + " verdicts");
      return 0;
    }
    if (*summarize) {
      std::optional<std::filesystem::path> filter_path;
      if (!filter.empty()) filter_path = filter;
      auto result = oats::RunSummarize(oats::LoadPipelineConfig(config_path), filter_path, jobs);
      oats::LogInfo("summarized " + std::to_string(result.summaries.size()) + " of " +
                    std::to_string(result.attempted) + " documents");
      return result.exit_code;
    }
    if (*eval) {
      auto opt = [](const std::string &s) {
        return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
      };
      const auto report = oats::RunEval(opt(pred), opt(gold), opt(rubric)).dump(2) + "\n";
      if (out.empty()) {
        std::cout << report;
      } else {
        std::ofstream file(out, std::ios::binary | std::ios::trunc);
        file << report;
        if (!file) throw oats::Error(oats::ErrorCode::kIo, "cannot write " + out);
      }
      return 0;
    }
    if (*serve) return StubServe(rules, host, port);
  } catch (const oats::Error &e) {
    oats::LogError(e.what());
    return 1;
  } catch (const std::exception &e) {
    oats::LogError(std::string("unexpected failure: ") + e.what());
    return 1;
  }
  return 0;
}
