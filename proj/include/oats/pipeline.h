#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oats/corpus.h"
#include "oats/embeddings.h"
#include "oats/qa.h"
#include "oats/summarizer.h"
#include "oats/topicid.h"

namespace oats {

struct StubQaConfig {
  std::filesystem::path rules;
};

struct RemoteQaConfig {
  std::string url;
  double timeout_s = 30.0;
  int max_inflight = 4;
};

// Everything one pipeline run reads. Paths in the JSON file are resolved
// against the config file's directory.
struct PipelineConfig {
  std::filesystem::path source;  // the config file itself
  std::filesystem::path corpus;
  CorpusFormat corpus_format = CorpusFormat::kJsonl;
  std::filesystem::path embeddings;
  EmbeddingFormat embeddings_format = EmbeddingFormat::kText;
  std::filesystem::path lexicons;
  std::filesystem::path risk_factors;
  std::filesystem::path questions;
  std::optional<std::filesystem::path> stopwords;
  std::variant<StubQaConfig, RemoteQaConfig> qa;
  std::optional<std::string> extractor_url;
  bool cooccurrence_all_health_status = true;
  std::size_t max_items = 0;  // 0: one item per question
  AskOptions ask;
  std::filesystem::path output_dir;
};

// Throws kConfig for schema problems and kIo naming any referenced path that
// does not exist.
PipelineConfig LoadPipelineConfig(const std::filesystem::path &path);

std::string Sha256Hex(std::string_view bytes);
// Hash of a file, or of every .json file (name and content) in a directory.
std::string Sha256Path(const std::filesystem::path &path);

std::unique_ptr<QaBackend> MakeQaBackend(const PipelineConfig &config);

// Ingest -> extract -> graph -> judge. Writes verdicts.jsonl and
// identify_manifest.json into the output directory.
struct IdentifyResult {
  std::vector<RelevanceVerdict> verdicts;
  nlohmann::ordered_json manifest;
};
IdentifyResult RunIdentify(const PipelineConfig &config, std::size_t jobs);

// Writes summaries.jsonl (doc_id order) and summarize_manifest.json. When a
// verdicts file is given only documents with a relevant verdict are
// summarized.
struct SummarizeResult {
  std::vector<Summary> summaries;
  std::size_t attempted = 0;
  std::size_t failed = 0;
  int exit_code = 0;  // nonzero when documents were attempted and none succeeded
};
SummarizeResult RunSummarize(const PipelineConfig &config,
                             const std::optional<std::filesystem::path> &filter,
                             std::size_t jobs);

// Report JSON with "topic_identification" and/or "qa_rubric" sections.
nlohmann::ordered_json RunEval(const std::optional<std::filesystem::path> &predicted,
                               const std::optional<std::filesystem::path> &gold,
                               const std::optional<std::filesystem::path> &rubric);

}  // namespace oats
