#include "oats/ontology.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "json.hpp"
#include "oats/error.h"

namespace oats {

OntologySchema OntologySchema::Default() {
  return OntologySchema{
      {std::string(kPopulation), std::string(kHealthStatus)},
      {Relation{std::string(kIsMadeUpOf), std::string(kPopulation),
                std::string(kHealthStatus)}}};
}

bool OntologySchema::HasConcept(std::string_view name) const {
  return std::find(concepts.begin(), concepts.end(), name) != concepts.end();
}

const Relation *OntologySchema::FindRelation(std::string_view name) const {
  for (const auto &r : relations) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

void OntologySchema::Validate() const {
  for (const auto &r : relations) {
    if (!HasConcept(r.domain) || !HasConcept(r.range)) {
      throw Error(ErrorCode::kConfig,
                  "relation " + r.name + " uses an undeclared concept");
    }
  }
}

std::string_view MentionSourceName(MentionSource source) {
  return source == MentionSource::kGazetteer ? "gazetteer" : "remote-ner";
}

namespace {

std::string JoinTerms(const std::vector<std::string> &terms) {
  std::string out;
  for (const auto &t : terms) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string NormalizedSurface(const EntityMention &m) {
  return JoinTerms(NormalizePhrase(m.surface));
}

}  // namespace

std::string NodeKey(const EntityMention &mention) {
  return mention.label.empty() ? NormalizedSurface(mention) : mention.label;
}

Lexicon ParseLexicon(std::string_view json_text) {
  using nlohmann::ordered_json;
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const ordered_json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("lexicon: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kConfig, "lexicon: expected an object");
  Lexicon lexicon;
  for (const auto &[label, spec] : root.items()) {
    LexiconEntry entry;
    entry.label = label;
    if (!spec.is_object() || !spec.contains("concept") || !spec["concept"].is_string() ||
        !spec.contains("phrases") || !spec["phrases"].is_array()) {
      throw Error(ErrorCode::kConfig,
                  "lexicon entry '" + label + "' needs \"concept\" and \"phrases\"");
    }
    entry.concept_name = spec["concept"].get<std::string>();
    for (const auto &p : spec["phrases"]) {
      if (!p.is_string() || NormalizePhrase(p.get<std::string>()).empty()) {
        throw Error(ErrorCode::kConfig, "lexicon entry '" + label + "' has an empty phrase");
      }
      entry.phrases.push_back(p.get<std::string>());
    }
    lexicon.push_back(std::move(entry));
  }
  return lexicon;
}

Lexicon LoadLexicon(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseLexicon(content);
}

Gazetteer::Gazetteer(const Lexicon &lexicon) : lexicon_(lexicon) {
  for (std::size_t i = 0; i < lexicon_.size(); ++i) {
    for (const auto &phrase : lexicon_[i].phrases) {
      auto terms = NormalizePhrase(phrase);
      if (terms.empty()) {
        throw Error(ErrorCode::kConfig, "empty phrase for '" + lexicon_[i].label + "'");
      }
      by_first_term_[terms.front()].push_back(Entry{std::move(terms), i});
    }
  }
  for (auto &[first, entries] : by_first_term_) {
    std::stable_sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
      return a.terms.size() > b.terms.size();
    });
  }
}

std::vector<EntityMention> Gazetteer::Extract(const Document &doc) const {
  std::vector<EntityMention> mentions;
  for (const Sentence &sentence : doc.sentences) {
    const auto &tokens = sentence.tokens;
    std::size_t i = 0;
    while (i < tokens.size()) {
      const Entry *match = nullptr;
      if (auto it = by_first_term_.find(tokens[i].normalized); it != by_first_term_.end()) {
        for (const Entry &entry : it->second) {
          const auto &terms = entry.terms;
          if (i + terms.size() > tokens.size()) continue;
          bool ok = true;
          for (std::size_t k = 1; k < terms.size() && ok; ++k) {
            ok = tokens[i + k].normalized == terms[k];
          }
          if (ok) {
            match = &entry;
            break;
          }
        }
      }
      if (match == nullptr) {
        ++i;
        continue;
      }
      const std::size_t last = i + match->terms.size() - 1;
      const LexiconEntry &lex = lexicon_[match->lexicon_index];
      EntityMention m;
      m.concept_name = lex.concept_name;
      m.range = CharRange{tokens[i].range.start, tokens[last].range.end};
      m.surface = doc.Slice(m.range);
      m.sentence_index = sentence.index;
      m.source = MentionSource::kGazetteer;
      m.label = lex.label;
      mentions.push_back(std::move(m));
      i = last + 1;
    }
  }
  return mentions;
}

std::vector<EntityMention> GazetteerExtract(const Document &doc, const Lexicon &lexicon) {
  return Gazetteer(lexicon).Extract(doc);
}

std::vector<Triple> FormCooccurrenceTriples(const std::vector<EntityMention> &mentions,
                                            const CooccurrenceOptions &options) {
  std::map<std::size_t, std::pair<std::vector<const EntityMention *>,
                                  std::vector<const EntityMention *>>>
      by_sentence;
  for (const auto &m : mentions) {
    if (m.concept_name == kPopulation) {
      by_sentence[m.sentence_index].first.push_back(&m);
    } else if (m.concept_name == kHealthStatus) {
      const bool qualifies =
          m.label == options.covid_label ||
          (options.all_gazetteer_health_status && m.source == MentionSource::kGazetteer);
      if (qualifies) by_sentence[m.sentence_index].second.push_back(&m);
    }
  }

  auto by_start = [](const EntityMention *a, const EntityMention *b) {
    return a->range < b->range;
  };
  std::vector<Triple> triples;
  for (auto &[sentence, group] : by_sentence) {
    auto &[heads, tails] = group;
    std::stable_sort(heads.begin(), heads.end(), by_start);
    std::stable_sort(tails.begin(), tails.end(), by_start);
    for (const EntityMention *h : heads) {
      for (const EntityMention *t : tails) {
        triples.push_back(Triple{*h, std::string(kIsMadeUpOf), *t, sentence});
      }
    }
  }
  return triples;
}

const GraphNode *ConceptGraph::FindNode(std::string_view concept_name,
                                        std::string_view key) const {
  for (const auto &n : nodes) {
    if (n.concept_name == concept_name && n.key == key) return &n;
  }
  return nullptr;
}

ConceptGraph BuildGraph(std::string doc_id, const std::vector<Triple> &triples) {
  using NodeId = std::pair<std::string, std::string>;
  std::map<NodeId, std::set<std::string>> node_surfaces;
  for (const auto &t : triples) {
    for (const EntityMention *m : {&t.head, &t.tail}) {
      node_surfaces[{m->concept_name, NodeKey(*m)}].insert(NormalizedSurface(*m));
    }
  }

  ConceptGraph graph;
  graph.doc_id = std::move(doc_id);
  std::map<NodeId, std::size_t> index;
  for (auto &[id, surfaces] : node_surfaces) {
    index[id] = graph.nodes.size();
    graph.nodes.push_back(GraphNode{id.first, id.second,
                                    std::vector<std::string>(surfaces.begin(), surfaces.end())});
  }

  std::map<std::tuple<std::size_t, std::string, std::size_t>, std::set<Provenance>> edges;
  for (const auto &t : triples) {
    const std::size_t h = index.at({t.head.concept_name, NodeKey(t.head)});
    const std::size_t r = index.at({t.tail.concept_name, NodeKey(t.tail)});
    edges[{h, t.relation, r}].insert(Provenance{t.sentence_index, t.head.range, t.tail.range});
  }
  for (auto &[key, prov] : edges) {
    graph.edges.push_back(GraphEdge{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                                    std::vector<Provenance>(prov.begin(), prov.end())});
  }
  return graph;
}

}  // namespace oats
