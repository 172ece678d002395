#include "fixtures.h"

#include <stdlib.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace oats::testing {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "oats-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void WriteText(const fs::path &path, const std::string &content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string ReadText(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double BruteCosineDistance(const std::vector<double> &a, const std::vector<double> &b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(1.0L - dot / (std::sqrt(na) * std::sqrt(nb)));
}

WordDocument MakeWordDocument(std::uint32_t seed, int max_sentences, int max_words,
                              const std::vector<std::string> &vocab) {
  std::mt19937 rng(seed);
  auto pick = [&rng](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  WordDocument doc;
  const int sentences = 1 + static_cast<int>(pick(static_cast<std::size_t>(max_sentences)));
  for (int s = 0; s < sentences; ++s) {
    const int words = 1 + static_cast<int>(pick(static_cast<std::size_t>(max_words)));
    std::vector<std::string> list;
    std::string rendered;
    for (int w = 0; w < words; ++w) {
      std::string word = vocab[pick(vocab.size())];
      list.push_back(word);
      std::string shown = word;
      if (w == 0) shown[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(shown[0])));
      else if (pick(5) == 0) shown[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(shown[0])));
      if (w > 0) rendered += ' ';
      if (w > 0 && pick(10) == 0) shown = "(" + shown + ")";
      rendered += shown;
      if (w + 1 < words && pick(6) == 0) rendered += ',';
    }
    rendered += '.';
    if (!doc.text.empty()) doc.text += ' ';
    doc.text += rendered;
    doc.words.push_back(std::move(list));
  }
  return doc;
}

std::vector<long> BruteTfScores(const WordDocument &doc, const std::set<std::string> &stopwords) {
  std::map<std::string, long> freq;
  for (const auto &sentence : doc.words) {
    for (const auto &w : sentence) {
      if (!stopwords.count(w)) ++freq[w];
    }
  }
  std::vector<long> scores;
  for (const auto &sentence : doc.words) {
    long total = 0;
    for (const auto &w : sentence) {
      if (!stopwords.count(w)) total += freq[w];
    }
    scores.push_back(total);
  }
  return scores;
}

const ImagingFixture &Imaging() {
  static const ImagingFixture fixture = [] {
    ImagingFixture f;
    f.doc_id = "imaging-645";
    f.title =
        "Epidemiological, clinical characteristics of cases of SARS-CoV-2 infection with "
        "abnormal imaging findings";
    f.abstract =
        "Patients with at least one coexisting underlying conditions and patients with "
        "hypertension were observed in 28.8% and 16.8% of the 573 patients respectively, which "
        "was significantly higher than the non-pneumonia patients all P < 0.05. For this "
        "retrospective study, 645 patients confirmed with SARS-CoV-2 infection between January "
        "17 and February 8, 2020 underwent a CT examination or X-ray, in Zhejiang, China. "
        "Patients confirmed with SARS-CoV-2 infection in Zhejiang province from January 17 to "
        "February 8 who had undergone CT or X-ray were enrolled. In our retrospective study, we "
        "evaluated and compared the epidemiological clinical features and laboratory data of "
        "those with abnormal imaging findings.";
    f.body = {
        {"Results",
         "The imaging findings of SARS-CoV-2 pneumonia are similar to acute respiratory "
         "syndrome SARS and Middle East respiratory syndrome MERS which are characterized as "
         "pulmonary ground-glass opacities and consolidation (Das et al. 2016). 139 (21.5%) "
         "patients of the total 645 patients had one affected lobe, 204 (31.6%) patients had "
         "two affected lobes, 136 (21.1%) patients had three lobes affected, 66 (10.2%) had "
         "four affected lobes, and (28 4.4%) patients had five affected lobes."},
        {"Discussion",
         "Finally, according to the admission data risk factors for severe critical type of "
         "COVID-19 were identified; however, we still lack a prediction model for disease "
         "progression. In conclusion there are certain characteristics of the chest imaging of "
         "COVID-19 patients we reported the differences in specific epidemiological and "
         "clinical features between patients with abnormal or normal imaging including fever "
         "cough and sputum production and relatively poor laboratory results."},
    };
    ordered_json record;
    record["doc_id"] = f.doc_id;
    record["title"] = f.title;
    record["abstract"] = f.abstract;
    record["body"] = ordered_json::array();
    for (const auto &[section, text] : f.body) {
      record["body"].push_back({{"section", section}, {"text", text}});
    }
    f.record_json = record.dump();

    ordered_json questions = ordered_json::array();
    auto add = [&questions](const char *id, const char *text, std::vector<std::string> variants) {
      ordered_json q{{"id", id}, {"text", text}};
      if (!variants.empty()) q["variants"] = variants;
      questions.push_back(q);
    };
    add("Q1", "Are patients with hypertension?", {});
    add("Q2", "Which hospital is studied?", {});
    add("Q3", "What is the date of the study?", {});
    add("Q4",
        "Is this a prospective observational study, retrospective observational study, or "
        "systematic study?",
        {});
    add("Q5", "How many patients are in this study?", {});
    add("Q6", "How many studies are in this article?", {});
    add("Q7", "Is there a hypertension odds ratio for fatality patients?",
        {"Is there an odds ratio for fatality patients?"});
    add("Q8", "Is there a hypertension odds ratio for severe patients?",
        {"Is there an odds ratio for severe patients?"});
    f.questions_json = questions.dump(2);

    ordered_json rules = ordered_json::array();
    rules.push_back({{"question", "Are patients with hypertension"},
                     {"pattern",
                      "Patients with at least one coexisting underlying conditions and "
                      "patients with hypertension were observed in 28.8% and 16.8%"},
                     {"regex", false}});
    rules.push_back({{"question", "Which hospital"}, {"pattern", "Zhejiang,? China"}});
    rules.push_back({{"question", "date of the study"},
                     {"pattern", "January 17 to February 8"},
                     {"regex", false}});
    rules.push_back({{"question", "prospective observational"}, {"pattern", "retrospective"}});
    rules.push_back({{"question", "How many patients"}, {"pattern", "\\b645\\b"}});
    f.rules_json = rules.dump(2);
    return f;
  }();
  return fixture;
}

namespace {

struct FactorDef {
  std::string name;
  std::string primary;
  std::string synonym;
};

const std::vector<FactorDef> &Factors() {
  static const std::vector<FactorDef> factors = {
      {"hypertension", "hypertension", "hypertensive"},
      {"diabetes", "diabetes", "diabetic"},
      {"obesity", "obesity", "obese"},
      {"copd", "copd", "emphysema"},
  };
  return factors;
}

const std::vector<std::string> kDistractors = {"fever", "cough", "pneumonia", "asthma"};
const std::vector<std::string> kPopulations = {"patients", "adults", "children"};
const std::vector<std::string> kCovid = {"COVID-19", "SARS-CoV-2", "novel coronavirus"};

std::string Capitalize(std::string s) {
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

PlantedCorpus MakePlantedCorpus(int num_docs, std::uint32_t seed) {
  std::mt19937 rng(seed);
  auto pick = [&rng](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  PlantedCorpus out;
  for (const auto &f : Factors()) {
    out.factors.push_back(f.name);
    out.gold[f.name];
  }

  for (int d = 0; d < num_docs; ++d) {
    char id[32];
    std::snprintf(id, sizeof id, "planted-%03d", d);
    const std::string doc_id = id;
    out.doc_ids.push_back(doc_id);

    std::vector<std::string> sentences;
    const bool covid_triple = pick(10) < 7;
    if (covid_triple) {
      sentences.push_back(Capitalize(kPopulations[pick(kPopulations.size())]) + " with " +
                          kCovid[pick(kCovid.size())] + " were admitted to the ward.");
    } else if (pick(2) == 0) {
      sentences.push_back("The " + kCovid[pick(kCovid.size())] +
                          " outbreak was declared in January.");
    }
    for (const auto &f : Factors()) {
      const std::string &term = pick(2) == 0 ? f.primary : f.synonym;
      switch (pick(3)) {
        case 0:
          sentences.push_back("Several " + kPopulations[pick(kPopulations.size())] + " had " +
                              term + " at admission.");
          if (covid_triple) out.gold[f.name].insert(doc_id);
          break;
        case 1:
          sentences.push_back("The prevalence of " + term + " remains unclear.");
          break;
        default:
          break;
      }
    }
    if (pick(2) == 0) {
      sentences.push_back("Some " + kPopulations[pick(kPopulations.size())] + " reported " +
                          kDistractors[pick(kDistractors.size())] + ".");
    }
    sentences.push_back("In total " + std::to_string(20 + pick(900)) + " " +
                        kPopulations[pick(kPopulations.size())] + " were enrolled.");
    sentences.push_back("Data were analysed with standard methods.");
    std::shuffle(sentences.begin(), sentences.end(), rng);

    ordered_json record;
    record["doc_id"] = doc_id;
    record["title"] = "Planted study " + std::to_string(d);
    std::string abstract;
    ordered_json body = ordered_json::array();
    const std::size_t split = sentences.size() / 2;
    std::string para;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      std::string &target = i < split ? abstract : para;
      if (!target.empty()) target += ' ';
      target += sentences[i];
    }
    record["abstract"] = abstract;
    body.push_back({{"section", "Results"}, {"text", para}});
    record["body"] = body;
    out.corpus_jsonl += record.dump() + "\n";
  }

  // Embeddings: each factor owns one axis; its synonym leans slightly toward
  // a spare axis. Distractors own the remaining axes.
  const int dim = 12;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (std::size_t i = 0; i < Factors().size(); ++i) {
    std::vector<double> primary(dim, 0.0), synonym(dim, 0.0);
    primary[i] = 1.0;
    synonym[i] = 1.0;
    synonym[8 + i] = 0.1;
    rows.emplace_back(Factors()[i].primary, primary);
    rows.emplace_back(Factors()[i].synonym, synonym);
  }
  for (std::size_t i = 0; i < kDistractors.size(); ++i) {
    std::vector<double> v(dim, 0.0);
    v[4 + i] = 1.0;
    rows.emplace_back(kDistractors[i], v);
  }
  std::ostringstream emb;
  emb << rows.size() << ' ' << dim << '\n';
  for (const auto &[term, v] : rows) {
    emb << term;
    for (double x : v) emb << ' ' << x;
    emb << '\n';
  }
  out.embeddings_text = emb.str();

  ordered_json lexicon;
  lexicon["COVID-19"] = {{"concept", "HealthStatus"},
                         {"phrases", {"COVID-19", "SARS-CoV-2", "novel coronavirus"}}};
  for (const auto &p : kPopulations) lexicon[p] = {{"concept", "Population"}, {"phrases", {p}}};
  for (const auto &f : Factors()) {
    lexicon[f.primary] = {{"concept", "HealthStatus"}, {"phrases", {f.primary}}};
    lexicon[f.synonym] = {{"concept", "HealthStatus"}, {"phrases", {f.synonym}}};
  }
  for (const auto &t : kDistractors) lexicon[t] = {{"concept", "HealthStatus"}, {"phrases", {t}}};
  out.lexicon_json = lexicon.dump(2);

  ordered_json factors = ordered_json::array();
  for (const auto &f : Factors()) {
    factors.push_back({{"name", f.name}, {"terms", {{f.primary}}}, {"threshold", 0.2}});
  }
  out.risk_factors_json = factors.dump(2);

  out.questions_json = R"([
  {"id": "Q1", "text": "How many patients are in this study?"},
  {"id": "Q2", "text": "Which conditions were recorded at admission?"}
])";
  out.rules_json = R"json([
  {"question": "How many patients", "pattern": "[0-9]+ (patients|adults|children)"},
  {"question": "conditions", "pattern": "(hypertension|hypertensive|diabetes|diabetic|obesity|obese|copd|emphysema)"}
])json";

  ordered_json gold = ordered_json::object();
  for (const auto &[factor, docs] : out.gold) gold[factor] = docs;
  out.gold_json = gold.dump(2);
  return out;
}

fs::path WritePlantedWorkspace(const fs::path &dir, const PlantedCorpus &corpus,
                               const std::string &qa_url) {
  WriteText(dir / "corpus.jsonl", corpus.corpus_jsonl);
  WriteText(dir / "embeddings.txt", corpus.embeddings_text);
  WriteText(dir / "lexicon.json", corpus.lexicon_json);
  WriteText(dir / "risk_factors.json", corpus.risk_factors_json);
  WriteText(dir / "questions.json", corpus.questions_json);
  WriteText(dir / "rules.json", corpus.rules_json);
  WriteText(dir / "gold.json", corpus.gold_json);

  ordered_json config;
  config["corpus"] = {{"path", "corpus.jsonl"}, {"format", "jsonl"}};
  config["embeddings"] = {{"path", "embeddings.txt"}, {"format", "text"}};
  config["lexicons"] = "lexicon.json";
  config["risk_factors"] = "risk_factors.json";
  config["questions"] = "questions.json";
  if (qa_url.empty()) {
    config["qa"] = {{"stub", {{"rules", "rules.json"}}}};
  } else {
    config["qa"] = {{"remote", {{"url", qa_url}, {"timeout_s", 10}, {"max_inflight", 2}}}};
  }
  config["max_items"] = 0;
  config["output_dir"] = "out";
  const fs::path path = dir / "config.json";
  WriteText(path, config.dump(2));
  return path;
}

}  // namespace oats::testing
