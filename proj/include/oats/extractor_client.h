#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "oats/corpus.h"
#include "oats/ontology.h"
#include "oats/parallel.h"

namespace oats {

struct ExtractionResult {
  std::vector<EntityMention> mentions;
  std::vector<Triple> triples;
  std::vector<std::string> diagnostics;  // one per rejected item
};

// Checks an extractor response against the schema and the document's
// offsets. Invalid items are dropped with a diagnostic; only a response
// whose overall shape is wrong raises kSchemaViolation.
ExtractionResult ValidateExtraction(const Document &doc, const OntologySchema &schema,
                                    const nlohmann::json &response);

struct RemoteExtractorOptions {
  std::chrono::seconds timeout{30};
  int max_inflight = 4;
};

// Client for POST /v1/extract. Safe to call from several threads; at most
// `max_inflight` requests are outstanding at once.
class RemoteExtractor {
 public:
  explicit RemoteExtractor(std::string base_url, RemoteExtractorOptions options = {});
  ~RemoteExtractor();

  ExtractionResult Extract(const Document &doc, const OntologySchema &schema) const;

 private:
  std::string base_url_;
  RemoteExtractorOptions options_;
  std::unique_ptr<InflightLimit> slots_;
};

}  // namespace oats
