#pragma once

// Shared test fixtures and independent oracles. Nothing here calls into the
// code paths it is used to check.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oats::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::filesystem::path &path, const std::string &content);
std::string ReadText(const std::filesystem::path &path);

// Cosine distance with long double accumulation and no clamping.
double BruteCosineDistance(const std::vector<double> &a, const std::vector<double> &b);

// Document made of known words: the oracle counts from `words`, never from
// the tokenizer. Sentences are rendered "Word word, word." joined by " ".
struct WordDocument {
  std::vector<std::vector<std::string>> words;  // lowercase, per sentence
  std::string text;
};
WordDocument MakeWordDocument(std::uint32_t seed, int max_sentences, int max_words,
                              const std::vector<std::string> &vocab);
std::vector<long> BruteTfScores(const WordDocument &doc, const std::set<std::string> &stopwords);

// A short imaging-study abstract used for golden summaries.
struct ImagingFixture {
  std::string doc_id;
  std::string title;
  std::string abstract;
  std::vector<std::pair<std::string, std::string>> body;  // (section, text)
  std::string record_json;   // one corpus record
  std::string questions_json;  // the eight shipped questions
  std::string rules_json;      // stub rules answering Q1 to Q5
};
const ImagingFixture &Imaging();

// Synthetic corpus whose relevance is known by construction.
struct PlantedCorpus {
  std::string corpus_jsonl;
  std::string embeddings_text;  // word2vec text format
  std::string lexicon_json;
  std::string risk_factors_json;
  std::string questions_json;
  std::string rules_json;
  std::string gold_json;
  std::map<std::string, std::set<std::string>> gold;  // factor -> doc ids
  std::vector<std::string> doc_ids;
  std::vector<std::string> factors;
};
PlantedCorpus MakePlantedCorpus(int num_docs, std::uint32_t seed);

// Writes the corpus inputs plus a config.json into `dir`; returns the config
// path. `qa_url` empty selects the stub backend.
std::filesystem::path WritePlantedWorkspace(const std::filesystem::path &dir,
                                            const PlantedCorpus &corpus,
                                            const std::string &qa_url = "");

}  // namespace oats::testing
