#include "oats/pipeline.h"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "oats/error.h"
#include "oats/evalkit.h"
#include "oats/extractor_client.h"
#include "oats/log.h"
#include "oats/ontology.h"
#include "oats/parallel.h"
#include "oats/qa_remote.h"

namespace oats {

namespace fs = std::filesystem;

namespace {

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void WriteFile(const fs::path &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

fs::path Resolve(const fs::path &base, const std::string &value) {
  fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

void RequireExists(const fs::path &path, const std::string &what) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(ErrorCode::kIo, what + " not found: " + path.string());
  }
}

}  // namespace

PipelineConfig LoadPipelineConfig(const fs::path &path) {
  using nlohmann::json;
  RequireExists(path, "config");
  json root;
  try {
    root = json::parse(ReadFile(path));
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  auto fail = [&path](const std::string &why) {
    return Error(ErrorCode::kConfig, path.string() + ": " + why);
  };
  if (!root.is_object()) throw fail("expected an object");

  const fs::path base = path.parent_path();
  PipelineConfig config;
  config.source = path;

  auto string_at = [&](const json &obj, const char *key) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
      throw fail(std::string("missing string \"") + key + "\"");
    }
    return obj[key].get<std::string>();
  };
  auto file_at = [&](const json &obj, const char *key) {
    return Resolve(base, string_at(obj, key));
  };

  try {
    const json &corpus = root.value("corpus", json());
    config.corpus = file_at(corpus, "path");
    config.corpus_format = ParseCorpusFormat(corpus.value("format", "jsonl"));

    const json &embeddings = root.value("embeddings", json());
    config.embeddings = file_at(embeddings, "path");
    config.embeddings_format = ParseEmbeddingFormat(embeddings.value("format", "text"));

    config.lexicons = file_at(root, "lexicons");
    config.risk_factors = file_at(root, "risk_factors");
    config.questions = file_at(root, "questions");
    if (root.contains("stopwords") && !root["stopwords"].is_null()) {
      config.stopwords = file_at(root, "stopwords");
    }

    const json &qa = root.value("qa", json());
    const bool has_stub = qa.is_object() && qa.contains("stub");
    const bool has_remote = qa.is_object() && qa.contains("remote");
    if (has_stub == has_remote) {
      throw fail("\"qa\" must set exactly one of \"stub\" or \"remote\"");
    }
    if (has_stub) {
      config.qa = StubQaConfig{file_at(qa["stub"], "rules")};
    } else {
      RemoteQaConfig remote;
      remote.url = string_at(qa["remote"], "url");
      remote.timeout_s = qa["remote"].value("timeout_s", remote.timeout_s);
      remote.max_inflight = qa["remote"].value("max_inflight", remote.max_inflight);
      if (remote.timeout_s <= 0 || remote.max_inflight < 1) {
        throw fail("remote qa needs positive timeout_s and max_inflight");
      }
      config.qa = remote;
    }

    if (root.contains("extractor") && !root["extractor"].is_null()) {
      config.extractor_url = string_at(root["extractor"], "url");
    }
    config.cooccurrence_all_health_status =
        root.value("cooccurrence_all_health_status", config.cooccurrence_all_health_status);
    config.max_items = root.value("max_items", std::size_t{0});
    if (root.contains("context")) {
      const json &ctx = root["context"];
      config.ask.context_budget = ctx.value("budget", config.ask.context_budget);
      config.ask.window = ctx.value("window", config.ask.window);
      config.ask.stride = ctx.value("stride", config.ask.stride);
      if (config.ask.window == 0 || config.ask.stride == 0 ||
          config.ask.stride > config.ask.window) {
        throw fail("context window and stride must be positive with stride <= window");
      }
    }
    config.output_dir = file_at(root, "output_dir");
  } catch (const json::exception &e) {
    throw fail(e.what());
  }

  RequireExists(config.corpus, "corpus");
  RequireExists(config.embeddings, "embeddings file");
  RequireExists(config.lexicons, "lexicon file");
  RequireExists(config.risk_factors, "risk factor file");
  RequireExists(config.questions, "questions file");
  if (config.stopwords) RequireExists(*config.stopwords, "stopword file");
  if (auto *stub = std::get_if<StubQaConfig>(&config.qa)) {
    RequireExists(stub->rules, "stub rules file");
  }
  return config;
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string Sha256Path(const fs::path &path) {
  if (!fs::is_directory(path)) return Sha256Hex(ReadFile(path));
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path &a, const fs::path &b) {
    return a.filename().string() < b.filename().string();
  });
  std::string all;
  for (const auto &f : files) {
    all += f.filename().string();
    all.push_back('\0');
    all += Sha256Hex(ReadFile(f));
    all.push_back('\n');
  }
  return Sha256Hex(all);
}

std::unique_ptr<QaBackend> MakeQaBackend(const PipelineConfig &config) {
  if (auto *stub = std::get_if<StubQaConfig>(&config.qa)) {
    return std::make_unique<StubBackend>(LoadStubRules(stub->rules));
  }
  const auto &remote = std::get<RemoteQaConfig>(config.qa);
  RemoteQaOptions options;
  options.timeout = std::chrono::milliseconds(static_cast<long long>(remote.timeout_s * 1000));
  options.max_inflight = remote.max_inflight;
  return std::make_unique<RemoteQaBackend>(remote.url, options);
}

namespace {

nlohmann::ordered_json InputEntry(const fs::path &path) {
  return {{"path", path.filename().string()}, {"sha256", Sha256Path(path)}};
}

nlohmann::ordered_json InputManifest(const PipelineConfig &config, bool summarize) {
  nlohmann::ordered_json inputs;
  inputs["corpus"] = InputEntry(config.corpus);
  if (!summarize) {
    inputs["embeddings"] = InputEntry(config.embeddings);
    inputs["lexicons"] = InputEntry(config.lexicons);
    inputs["risk_factors"] = InputEntry(config.risk_factors);
  } else {
    inputs["questions"] = InputEntry(config.questions);
    if (config.stopwords) inputs["stopwords"] = InputEntry(*config.stopwords);
    if (auto *stub = std::get_if<StubQaConfig>(&config.qa)) {
      inputs["stub_rules"] = InputEntry(stub->rules);
    }
  }
  return inputs;
}

}  // namespace

IdentifyResult RunIdentify(const PipelineConfig &config, std::size_t jobs) {
  const auto docs = IngestCorpus(config.corpus, config.corpus_format);
  LogInfo("ingested " + std::to_string(docs.size()) + " documents");
  const EmbeddingStore store = LoadEmbeddings(config.embeddings, config.embeddings_format);
  LogInfo("loaded " + std::to_string(store.size()) + " embeddings of dimension " +
          std::to_string(store.dim()));
  const Gazetteer gazetteer(LoadLexicon(config.lexicons));
  const auto specs = LoadRiskFactorSpecs(config.risk_factors);
  const OntologySchema schema = OntologySchema::Default();

  std::unique_ptr<RemoteExtractor> extractor;
  if (config.extractor_url) extractor = std::make_unique<RemoteExtractor>(*config.extractor_url);

  CooccurrenceOptions cooc;
  cooc.all_gazetteer_health_status = config.cooccurrence_all_health_status;

  std::vector<ConceptGraph> graphs(docs.size());
  ParallelFor(docs.size(), jobs, [&](std::size_t i) {
    const Document &doc = docs[i];
    auto mentions = gazetteer.Extract(doc);
    std::vector<Triple> remote_triples;
    if (extractor) {
      auto remote = extractor->Extract(doc, schema);
      for (const auto &d : remote.diagnostics) LogWarn(d);
      mentions.insert(mentions.end(), remote.mentions.begin(), remote.mentions.end());
      remote_triples = std::move(remote.triples);
    }
    auto triples = FormCooccurrenceTriples(mentions, cooc);
    triples.insert(triples.end(), remote_triples.begin(), remote_triples.end());
    graphs[i] = BuildGraph(doc.doc_id, triples);
  });

  IdentifyResult result;
  result.verdicts = JudgeCorpus(graphs, specs, store, jobs);

  fs::create_directories(config.output_dir);
  WriteFile(config.output_dir / "verdicts.jsonl", VerdictsToJsonl(result.verdicts));

  std::map<std::string, std::size_t> relevant;
  for (const auto &spec : specs) relevant[spec.name] = 0;
  for (const auto &v : result.verdicts) {
    if (v.relevant) ++relevant[v.risk_factor];
  }
  auto &m = result.manifest;
  m["command"] = "identify";
  m["config_sha256"] = Sha256Path(config.source);
  m["inputs"] = InputManifest(config, false);
  m["counts"] = {{"documents", docs.size()},
                 {"risk_factors", specs.size()},
                 {"verdicts", result.verdicts.size()}};
  nlohmann::ordered_json fractions = nlohmann::ordered_json::object();
  for (const auto &[name, count] : relevant) {
    fractions[name] = docs.empty() ? 0.0
                                   : static_cast<double>(count) / static_cast<double>(docs.size());
  }
  m["relevant_fraction"] = fractions;
  WriteFile(config.output_dir / "identify_manifest.json", m.dump(2) + "\n");
  return result;
}

SummarizeResult RunSummarize(const PipelineConfig &config,
                             const std::optional<fs::path> &filter, std::size_t jobs) {
  auto docs = IngestCorpus(config.corpus, config.corpus_format);
  const auto questions = LoadQuestions(config.questions);
  const StopwordSet stopwords =
      config.stopwords ? LoadStopwords(*config.stopwords) : DefaultStopwords();
  const auto backend = MakeQaBackend(config);

  if (filter) {
    std::set<std::string> keep;
    for (const auto &v : ReadVerdicts(*filter)) {
      if (v.relevant) keep.insert(v.doc_id);
    }
    std::erase_if(docs, [&keep](const Document &d) { return keep.count(d.doc_id) == 0; });
  }
  std::sort(docs.begin(), docs.end(),
            [](const Document &a, const Document &b) { return a.doc_id < b.doc_id; });

  SummarizeResult result;
  result.attempted = docs.size();
  std::vector<std::optional<Summary>> slots(docs.size());
  ParallelFor(docs.size(), jobs, [&](std::size_t i) {
    const Document &doc = docs[i];
    if (doc.full_text.empty()) {
      LogWarn(doc.doc_id + ": empty document, skipped");
      return;
    }
    AskAllResult answers = AskAll(*backend, questions, doc.full_text, config.ask);
    for (const auto &d : answers.diagnostics) LogWarn(doc.doc_id + ": " + d);
    if (!questions.empty() && answers.failed == questions.size()) {
      LogError(doc.doc_id + ": every question failed");
      return;
    }
    const auto scores = ScoreSentences(doc, stopwords);
    slots[i] = BuildSummary(doc, questions, answers.answers, scores, config.max_items);
  });

  std::string out;
  for (auto &slot : slots) {
    if (!slot) {
      ++result.failed;
      continue;
    }
    out += SummaryToJson(*slot).dump();
    out.push_back('\n');
    result.summaries.push_back(std::move(*slot));
  }
  fs::create_directories(config.output_dir);
  WriteFile(config.output_dir / "summaries.jsonl", out);

  nlohmann::ordered_json manifest;
  manifest["command"] = "summarize";
  manifest["config_sha256"] = Sha256Path(config.source);
  manifest["inputs"] = InputManifest(config, true);
  if (filter) manifest["filter_sha256"] = Sha256Path(*filter);
  manifest["stopword_list"] =
      config.stopwords ? std::string("file") : std::string(kStopwordListVersion);
  manifest["counts"] = {{"attempted", result.attempted},
                        {"summarized", result.summaries.size()},
                        {"failed", result.failed}};
  WriteFile(config.output_dir / "summarize_manifest.json", manifest.dump(2) + "\n");

  result.exit_code = (result.attempted > 0 && result.summaries.empty()) ? 1 : 0;
  return result;
}

nlohmann::ordered_json RunEval(const std::optional<fs::path> &predicted,
                               const std::optional<fs::path> &gold,
                               const std::optional<fs::path> &rubric) {
  if (predicted.has_value() != gold.has_value()) {
    throw Error(ErrorCode::kConfig, "--pred and --gold must be given together");
  }
  if (!predicted && !rubric) {
    throw Error(ErrorCode::kConfig, "nothing to evaluate: pass --pred/--gold or --rubric");
  }
  nlohmann::ordered_json report = nlohmann::ordered_json::object();
  if (predicted) {
    const auto verdicts = ReadVerdicts(*predicted);
    const auto labels = LoadGoldLabels(*gold);
    std::set<std::string> evaluated;
    for (const auto &v : verdicts) evaluated.insert(v.doc_id);
    for (const auto &[factor, docs] : labels) {
      for (const auto &d : docs) {
        if (!evaluated.empty() && !evaluated.count(d)) {
          LogWarn("gold doc '" + d + "' for " + factor + " has no verdict");
        }
      }
    }
    report["topic_identification"] =
        TopicReportToJson(EvaluateTopicIdentification(verdicts, labels));
  }
  if (rubric) report["qa_rubric"] = RubricReportToJson(AggregateRubric(LoadRubricCsv(*rubric)));
  return report;
}

}  // namespace oats
