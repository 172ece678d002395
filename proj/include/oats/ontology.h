#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oats/corpus.h"
#include "oats/text.h"

namespace oats {

inline constexpr std::string_view kPopulation = "Population";
inline constexpr std::string_view kHealthStatus = "HealthStatus";
inline constexpr std::string_view kIsMadeUpOf = "IsMadeUpOf";
inline constexpr std::string_view kCovidLabel = "COVID-19";

struct Relation {
  std::string name;
  std::string domain;
  std::string range;

  friend bool operator==(const Relation &, const Relation &) = default;
};

// Concepts and typed relations that extracted knowledge must conform to.
struct OntologySchema {
  std::vector<std::string> concepts;
  std::vector<Relation> relations;

  // Population --IsMadeUpOf--> HealthStatus.
  static OntologySchema Default();

  bool HasConcept(std::string_view name) const;
  const Relation *FindRelation(std::string_view name) const;
  // Throws kConfig when a relation references an undeclared concept.
  void Validate() const;
};

enum class MentionSource { kGazetteer, kRemoteNer };

std::string_view MentionSourceName(MentionSource source);

struct EntityMention {
  std::string concept_name;
  std::string surface;
  CharRange range;  // into Document::full_text
  std::size_t sentence_index = 0;
  MentionSource source = MentionSource::kGazetteer;
  std::string label;  // canonical label, may be empty for remote mentions

  friend bool operator==(const EntityMention &, const EntityMention &) = default;
};

// Graph identity of a mention: its label, or the normalized surface when
// there is no label.
std::string NodeKey(const EntityMention &mention);

struct Triple {
  EntityMention head;
  std::string relation;
  EntityMention tail;
  std::size_t sentence_index = 0;

  friend bool operator==(const Triple &, const Triple &) = default;
};

struct LexiconEntry {
  std::string label;
  std::string concept_name;
  std::vector<std::string> phrases;
};

using Lexicon = std::vector<LexiconEntry>;

// {"label": {"concept": str, "phrases": [str]}}, entries kept in file order.
Lexicon ParseLexicon(std::string_view json_text);
Lexicon LoadLexicon(const std::filesystem::path &path);

// Dictionary matcher over normalized token sequences. Matches never cross a
// sentence boundary; at each position the longest phrase wins and scanning
// resumes after it.
class Gazetteer {
 public:
  explicit Gazetteer(const Lexicon &lexicon);

  std::vector<EntityMention> Extract(const Document &doc) const;

 private:
  struct Entry {
    std::vector<std::string> terms;
    std::size_t lexicon_index;
  };

  std::vector<LexiconEntry> lexicon_;
  // First term -> phrases starting with it, longest first.
  std::unordered_map<std::string, std::vector<Entry>> by_first_term_;
};

std::vector<EntityMention> GazetteerExtract(const Document &doc, const Lexicon &lexicon);

struct CooccurrenceOptions {
  // When false only tails labelled `covid_label` form triples; when true any
  // gazetteer HealthStatus mention does as well.
  bool all_gazetteer_health_status = false;
  std::string covid_label = std::string(kCovidLabel);
};

// Adds IsMadeUpOf between every Population and qualifying HealthStatus
// mention that share a sentence. Ordered by (sentence, head start, tail start).
std::vector<Triple> FormCooccurrenceTriples(const std::vector<EntityMention> &mentions,
                                            const CooccurrenceOptions &options = {});

struct GraphNode {
  std::string concept_name;
  std::string key;
  std::vector<std::string> surfaces;  // distinct normalized surface forms, sorted

  friend bool operator==(const GraphNode &, const GraphNode &) = default;
};

struct Provenance {
  std::size_t sentence_index = 0;
  CharRange head_range;
  CharRange tail_range;

  friend bool operator==(const Provenance &, const Provenance &) = default;
  friend auto operator<=>(const Provenance &, const Provenance &) = default;
};

struct GraphEdge {
  std::size_t head = 0;  // node index
  std::string relation;
  std::size_t tail = 0;
  std::vector<Provenance> provenance;  // sorted, distinct

  friend bool operator==(const GraphEdge &, const GraphEdge &) = default;
};

// Per-document concept graph. Nodes are sorted by (concept, key) and edges by
// (head, relation, tail), so equal triple sets give equal graphs.
struct ConceptGraph {
  std::string doc_id;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  const GraphNode *FindNode(std::string_view concept_name, std::string_view key) const;

  friend bool operator==(const ConceptGraph &, const ConceptGraph &) = default;
};

ConceptGraph BuildGraph(std::string doc_id, const std::vector<Triple> &triples);

}  // namespace oats
