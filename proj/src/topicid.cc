#include "oats/topicid.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "oats/corpus.h"
#include "oats/error.h"
#include "oats/parallel.h"

namespace oats {

namespace {

std::vector<std::string> SplitSpaces(const std::string &s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = s.find(' ', i);
    if (j == std::string::npos) j = s.size();
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

std::string JoinSpaces(const Phrase &terms) {
  std::string out;
  for (const auto &t : terms) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

std::vector<RiskFactorSpec> ParseRiskFactorSpecs(std::string_view json_text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("risk factors: ") + e.what());
  }
  if (!root.is_array()) throw Error(ErrorCode::kConfig, "risk factors: expected a list");
  std::vector<RiskFactorSpec> specs;
  for (const auto &item : root) {
    RiskFactorSpec spec;
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
      throw Error(ErrorCode::kConfig, "risk factor without a name");
    }
    spec.name = item["name"].get<std::string>();
    auto fail = [&spec](const std::string &why) {
      return Error(ErrorCode::kConfig, "risk factor '" + spec.name + "': " + why);
    };
    if (!item.contains("terms") || !item["terms"].is_array()) throw fail("missing \"terms\"");
    for (const auto &phrase : item["terms"]) {
      if (!phrase.is_array()) throw fail("each term must be a list of strings");
      Phrase terms;
      for (const auto &word : phrase) {
        if (!word.is_string()) throw fail("each term must be a list of strings");
        for (auto &t : NormalizePhrase(word.get<std::string>())) terms.push_back(std::move(t));
      }
      if (terms.empty()) throw fail("empty query phrase");
      spec.query_phrases.push_back(std::move(terms));
    }
    if (spec.query_phrases.empty()) throw fail("needs at least one query phrase");
    if (item.contains("threshold") && !item["threshold"].is_null()) {
      if (!item["threshold"].is_number()) throw fail("threshold is not a number");
      spec.threshold = item["threshold"].get<double>();
    }
    if (!std::isfinite(spec.threshold) || spec.threshold <= 0 || spec.threshold >= 2) {
      throw fail("threshold must lie in (0, 2)");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<RiskFactorSpec> LoadRiskFactorSpecs(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseRiskFactorSpecs(content);
}

std::vector<Phrase> CandidateTerms(const ConceptGraph &graph, std::string_view covid_label) {
  std::vector<Phrase> candidates;
  for (const auto &node : graph.nodes) {
    if (node.concept_name != kHealthStatus || node.key == covid_label) continue;
    for (const auto &surface : node.surfaces) {
      auto terms = SplitSpaces(surface);
      if (!terms.empty()) candidates.push_back(std::move(terms));
    }
  }
  return candidates;
}

bool HasCovidTriple(const ConceptGraph &graph, std::string_view covid_label) {
  return std::any_of(graph.edges.begin(), graph.edges.end(), [&](const GraphEdge &e) {
    const GraphNode &tail = graph.nodes[e.tail];
    return tail.concept_name == kHealthStatus && tail.key == covid_label;
  });
}

RelevanceVerdict Judge(const ConceptGraph &graph, const RiskFactorSpec &spec,
                       const EmbeddingStore &store, std::string_view covid_label) {
  RelevanceVerdict verdict;
  verdict.doc_id = graph.doc_id;
  verdict.risk_factor = spec.name;
  verdict.has_covid_triple = HasCovidTriple(graph, covid_label);

  const auto candidates = CandidateTerms(graph, covid_label);
  std::optional<PhraseMatch> best;
  for (const Phrase &query : spec.query_phrases) {
    auto match = MinDistanceToTerm(store, candidates, query);
    if (match && (!best || match->distance < best->distance)) best = match;
  }
  if (best) {
    verdict.min_distance = best->distance;
    verdict.matched_graph_term = JoinSpaces(candidates[best->candidate]);
  }
  verdict.relevant =
      verdict.has_covid_triple && best.has_value() && best->distance < spec.threshold;
  return verdict;
}

std::vector<RelevanceVerdict> JudgeCorpus(const std::vector<ConceptGraph> &graphs,
                                          const std::vector<RiskFactorSpec> &specs,
                                          const EmbeddingStore &store, std::size_t jobs,
                                          std::string_view covid_label) {
  std::vector<RelevanceVerdict> verdicts(graphs.size() * specs.size());
  ParallelFor(verdicts.size(), jobs, [&](std::size_t i) {
    verdicts[i] = Judge(graphs[i / specs.size()], specs[i % specs.size()], store, covid_label);
  });
  std::stable_sort(verdicts.begin(), verdicts.end(),
                   [](const RelevanceVerdict &a, const RelevanceVerdict &b) {
                     return std::tie(a.risk_factor, a.doc_id) < std::tie(b.risk_factor, b.doc_id);
                   });
  return verdicts;
}

nlohmann::ordered_json VerdictToJson(const RelevanceVerdict &v) {
  nlohmann::ordered_json j;
  j["doc_id"] = v.doc_id;
  j["risk_factor"] = v.risk_factor;
  j["relevant"] = v.relevant;
  j["min_distance"] = v.min_distance ? nlohmann::ordered_json(*v.min_distance) : nullptr;
  j["matched_graph_term"] =
      v.matched_graph_term ? nlohmann::ordered_json(*v.matched_graph_term) : nullptr;
  j["has_covid_triple"] = v.has_covid_triple;
  return j;
}

RelevanceVerdict VerdictFromJson(const nlohmann::json &j) {
  try {
    RelevanceVerdict v;
    v.doc_id = j.at("doc_id").get<std::string>();
    v.risk_factor = j.at("risk_factor").get<std::string>();
    v.relevant = j.at("relevant").get<bool>();
    if (j.contains("min_distance") && !j["min_distance"].is_null()) {
      v.min_distance = j["min_distance"].get<double>();
    }
    if (j.contains("matched_graph_term") && !j["matched_graph_term"].is_null()) {
      v.matched_graph_term = j["matched_graph_term"].get<std::string>();
    }
    v.has_covid_triple = j.value("has_covid_triple", false);
    return v;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("verdict: ") + e.what());
  }
}

std::string VerdictsToJsonl(const std::vector<RelevanceVerdict> &verdicts) {
  std::string out;
  for (const auto &v : verdicts) {
    out += VerdictToJson(v).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<RelevanceVerdict> ReadVerdicts(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<RelevanceVerdict> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(VerdictFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace oats
