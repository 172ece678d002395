#include "oats/extractor_client.h"

#include "httplib.h"
#include "oats/error.h"

namespace oats {

namespace {

bool ReadOffset(const nlohmann::json &item, const char *key, std::size_t *out) {
  auto it = item.find(key);
  if (it == item.end() || !it->is_number_integer()) return false;
  const auto v = it->get<long long>();
  if (v < 0) return false;
  *out = static_cast<std::size_t>(v);
  return true;
}

}  // namespace

ExtractionResult ValidateExtraction(const Document &doc, const OntologySchema &schema,
                                    const nlohmann::json &response) {
  if (!response.is_object() || !response.contains("mentions") ||
      !response["mentions"].is_array() ||
      (response.contains("triples") && !response["triples"].is_array())) {
    throw Error(ErrorCode::kSchemaViolation,
                doc.doc_id + ": response lacks a \"mentions\" array");
  }

  ExtractionResult result;
  const auto &raw_mentions = response["mentions"];
  // Response index -> kept mention index, -1 when rejected.
  std::vector<long> kept(raw_mentions.size(), -1);
  for (std::size_t i = 0; i < raw_mentions.size(); ++i) {
    const auto &item = raw_mentions[i];
    auto reject = [&](const std::string &why) {
      result.diagnostics.push_back(doc.doc_id + ": mention " + std::to_string(i) + ": " + why);
    };
    if (!item.is_object()) {
      reject("not an object");
      continue;
    }
    if (!item.contains("concept") || !item["concept"].is_string() ||
        !schema.HasConcept(item["concept"].get<std::string>())) {
      reject("missing or undeclared concept");
      continue;
    }
    if (item.contains("label") && !item["label"].is_string()) {
      reject("label is not a string");
      continue;
    }
    CharRange range;
    if (!ReadOffset(item, "start", &range.start) || !ReadOffset(item, "end", &range.end)) {
      reject("missing or negative offsets");
      continue;
    }
    if (range.start >= range.end || range.end > doc.length()) {
      reject("range [" + std::to_string(range.start) + "," + std::to_string(range.end) +
             ") outside document of length " + std::to_string(doc.length()));
      continue;
    }
    auto sentence = doc.SentenceContaining(range);
    if (!sentence) {
      reject("range does not lie within a single sentence");
      continue;
    }
    EntityMention m;
    m.concept_name = item["concept"].get<std::string>();
    m.range = range;
    m.surface = doc.Slice(range);
    m.sentence_index = *sentence;
    m.source = MentionSource::kRemoteNer;
    m.label = item.value("label", std::string());
    kept[i] = static_cast<long>(result.mentions.size());
    result.mentions.push_back(std::move(m));
  }

  if (!response.contains("triples")) return result;
  const auto &raw_triples = response["triples"];
  for (std::size_t i = 0; i < raw_triples.size(); ++i) {
    const auto &item = raw_triples[i];
    auto reject = [&](const std::string &why) {
      result.diagnostics.push_back(doc.doc_id + ": triple " + std::to_string(i) + ": " + why);
    };
    std::size_t h = 0, t = 0;
    if (!item.is_object() || !ReadOffset(item, "head", &h) || !ReadOffset(item, "tail", &t) ||
        !item.contains("relation") || !item["relation"].is_string()) {
      reject("malformed triple");
      continue;
    }
    if (h >= kept.size() || t >= kept.size()) {
      reject("head/tail index out of range");
      continue;
    }
    if (kept[h] < 0 || kept[t] < 0) {
      reject("references a rejected mention");
      continue;
    }
    const Relation *rel = schema.FindRelation(item["relation"].get<std::string>());
    if (rel == nullptr) {
      reject("undeclared relation");
      continue;
    }
    const EntityMention &head = result.mentions[kept[h]];
    const EntityMention &tail = result.mentions[kept[t]];
    if (head.concept_name != rel->domain || tail.concept_name != rel->range) {
      reject("concepts do not match " + rel->name + " domain/range");
      continue;
    }
    if (head.sentence_index != tail.sentence_index) {
      reject("head and tail are in different sentences");
      continue;
    }
    result.triples.push_back(Triple{head, rel->name, tail, head.sentence_index});
  }
  return result;
}

RemoteExtractor::RemoteExtractor(std::string base_url, RemoteExtractorOptions options)
    : base_url_(std::move(base_url)),
      options_(options),
      slots_(std::make_unique<InflightLimit>(
          std::clamp(options.max_inflight, 1, 1024))) {}

RemoteExtractor::~RemoteExtractor() = default;

ExtractionResult RemoteExtractor::Extract(const Document &doc,
                                          const OntologySchema &schema) const {
  const nlohmann::json request = {{"doc_id", doc.doc_id}, {"text", doc.full_text}};
  httplib::Result res;
  {
    SlotGuard slot(*slots_);
    httplib::Client client(base_url_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    res = client.Post("/v1/extract", request.dump(), "application/json");
  }
  if (!res) {
    throw Error(ErrorCode::kEndpointUnreachable,
                base_url_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kSchemaViolation,
                base_url_ + ": HTTP " + std::to_string(res->status));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kSchemaViolation, base_url_ + ": " + e.what());
  }
  return ValidateExtraction(doc, schema, body);
}

}  // namespace oats
