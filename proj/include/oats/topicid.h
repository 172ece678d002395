#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oats/embeddings.h"
#include "oats/ontology.h"

namespace oats {

inline constexpr double kDefaultThreshold = 0.5;

struct RiskFactorSpec {
  std::string name;
  // Alternative query phrases, e.g. {"copd"} and its expansion.
  std::vector<Phrase> query_phrases;
  double threshold = kDefaultThreshold;
};

struct RelevanceVerdict {
  std::string doc_id;
  std::string risk_factor;
  bool relevant = false;
  std::optional<double> min_distance;
  std::optional<std::string> matched_graph_term;
  bool has_covid_triple = false;

  friend bool operator==(const RelevanceVerdict &, const RelevanceVerdict &) = default;
};

// JSON list of {"name": str, "terms": [[str]], "threshold": float}. Each
// inner list is one phrase; its strings are tokenized and normalized.
std::vector<RiskFactorSpec> ParseRiskFactorSpecs(std::string_view json_text);
std::vector<RiskFactorSpec> LoadRiskFactorSpecs(const std::filesystem::path &path);

// Normalized term lists of every HealthStatus node other than the COVID-19
// node, one per distinct surface form, in graph order.
std::vector<Phrase> CandidateTerms(const ConceptGraph &graph,
                                   std::string_view covid_label = kCovidLabel);

bool HasCovidTriple(const ConceptGraph &graph, std::string_view covid_label = kCovidLabel);

// A document is relevant to a risk factor when its graph holds a COVID-19
// triple and some HealthStatus term lies strictly closer than the threshold
// to one of the factor's query phrases.
RelevanceVerdict Judge(const ConceptGraph &graph, const RiskFactorSpec &spec,
                       const EmbeddingStore &store,
                       std::string_view covid_label = kCovidLabel);

// One verdict per (graph, spec), sorted by (risk_factor, doc_id).
std::vector<RelevanceVerdict> JudgeCorpus(const std::vector<ConceptGraph> &graphs,
                                          const std::vector<RiskFactorSpec> &specs,
                                          const EmbeddingStore &store, std::size_t jobs = 1,
                                          std::string_view covid_label = kCovidLabel);

nlohmann::ordered_json VerdictToJson(const RelevanceVerdict &verdict);
RelevanceVerdict VerdictFromJson(const nlohmann::json &j);
std::string VerdictsToJsonl(const std::vector<RelevanceVerdict> &verdicts);
std::vector<RelevanceVerdict> ReadVerdicts(const std::filesystem::path &path);

}  // namespace oats
