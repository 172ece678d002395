#include "oats/evalkit.h"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "oats/error.h"

namespace oats {

namespace {

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

nlohmann::ordered_json OptionalNumber(const std::optional<double> &v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

PRResult PrecisionRecall(const std::set<std::string> &predicted,
                         const std::set<std::string> &gold, std::string risk_factor) {
  PRResult r;
  r.risk_factor = std::move(risk_factor);
  for (const auto &doc : predicted) {
    if (gold.count(doc)) {
      ++r.tp;
    } else {
      ++r.fp;
    }
  }
  r.fn = gold.size() - r.tp;
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  return r;
}

GoldLabels ParseGoldLabels(std::string_view json_text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("gold labels: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kMalformedRecord, "gold labels: expected an object");
  GoldLabels gold;
  for (const auto &[factor, docs] : root.items()) {
    if (!docs.is_array()) {
      throw Error(ErrorCode::kMalformedRecord, "gold labels for '" + factor + "' are not a list");
    }
    auto &set = gold[factor];
    for (const auto &d : docs) {
      if (!d.is_string()) {
        throw Error(ErrorCode::kMalformedRecord, "gold labels for '" + factor + "': non-string id");
      }
      set.insert(d.get<std::string>());
    }
  }
  return gold;
}

GoldLabels LoadGoldLabels(const std::filesystem::path &path) {
  return ParseGoldLabels(ReadFile(path));
}

std::vector<PRResult> EvaluateTopicIdentification(const std::vector<RelevanceVerdict> &verdicts,
                                                  const GoldLabels &gold) {
  std::map<std::string, std::set<std::string>> predicted;
  for (const auto &[factor, docs] : gold) predicted[factor];
  for (const auto &v : verdicts) {
    auto &set = predicted[v.risk_factor];
    if (v.relevant) set.insert(v.doc_id);
  }
  static const std::set<std::string> kNone;
  std::vector<PRResult> results;
  for (const auto &[factor, docs] : predicted) {
    auto it = gold.find(factor);
    results.push_back(PrecisionRecall(docs, it == gold.end() ? kNone : it->second, factor));
  }
  return results;
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;  // current row has content
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::kMalformedRecord, "csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

RubricSheet ParseRubricCsv(std::string_view csv) {
  const auto rows = ParseCsv(csv);
  if (rows.empty()) throw Error(ErrorCode::kMalformedRecord, "rubric: missing header");
  static const char *kColumns[] = {"doc_id",  "question_id", "rater1",
                                   "rater2",  "consensus",   "summary_score"};
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    std::string name = rows[0][i];
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    column[name] = i;
  }
  for (const char *name : kColumns) {
    if (!column.count(name)) {
      throw Error(ErrorCode::kMalformedRecord, std::string("rubric: missing column ") + name);
    }
  }

  RubricSheet sheet;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto &cells = rows[r];
    const std::string where = "rubric row " + std::to_string(r + 1);
    auto cell = [&](const char *name) -> std::string {
      const std::size_t i = column.at(name);
      return i < cells.size() ? cells[i] : std::string();
    };
    auto score = [&](const char *name, bool required) -> std::optional<int> {
      std::string v = cell(name);
      v.erase(0, v.find_first_not_of(" \t"));
      v.erase(v.find_last_not_of(" \t") + 1);
      if (v.empty()) {
        if (required) throw Error(ErrorCode::kMalformedRecord, where + ": empty " + name);
        return std::nullopt;
      }
      if (v != "0" && v != "1") {
        throw Error(ErrorCode::kMalformedRecord, where + ": " + name + " must be 0 or 1");
      }
      return v == "1" ? 1 : 0;
    };
    RubricRow row;
    row.doc_id = cell("doc_id");
    row.question_id = cell("question_id");
    if (row.doc_id.empty() || row.question_id.empty()) {
      throw Error(ErrorCode::kMalformedRecord, where + ": empty doc_id or question_id");
    }
    row.rater1 = *score("rater1", true);
    row.rater2 = *score("rater2", true);
    row.consensus = score("consensus", false);
    row.summary_score = score("summary_score", false);
    sheet.rows.push_back(std::move(row));
  }
  return sheet;
}

RubricSheet LoadRubricCsv(const std::filesystem::path &path) {
  return ParseRubricCsv(ReadFile(path));
}

RubricReport AggregateRubric(const RubricSheet &sheet) {
  std::vector<std::string> unresolved;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto &row : sheet.rows) {
    if (!seen.insert({row.doc_id, row.question_id}).second) {
      throw Error(ErrorCode::kMalformedRecord,
                  "rubric: duplicate cell (" + row.doc_id + ", " + row.question_id + ")");
    }
    if (row.rater1 != row.rater2 && !row.consensus) {
      unresolved.push_back("(" + row.doc_id + ", " + row.question_id + ")");
    }
  }
  if (!unresolved.empty()) {
    std::string cells;
    for (const auto &c : unresolved) cells += (cells.empty() ? "" : " ") + c;
    throw Error(ErrorCode::kUnresolvedDisagreement, cells);
  }

  RubricReport report;
  std::map<std::string, std::size_t> question_index;
  std::map<std::string, int> summary_by_doc;
  std::size_t agree = 0;
  for (const auto &row : sheet.rows) {
    auto [it, inserted] = question_index.emplace(row.question_id, report.questions.size());
    if (inserted) report.questions.push_back(QuestionAccuracy{row.question_id});
    QuestionAccuracy &q = report.questions[it->second];
    ++q.documents;
    q.correct += static_cast<std::size_t>(row.consensus.value_or(row.rater1));
    if (row.rater1 == row.rater2) ++agree;
    if (row.summary_score) {
      auto [s, fresh] = summary_by_doc.emplace(row.doc_id, *row.summary_score);
      if (!fresh && s->second != *row.summary_score) {
        throw Error(ErrorCode::kMalformedRecord,
                    "rubric: conflicting summary_score for " + row.doc_id);
      }
    }
  }
  for (auto &q : report.questions) {
    q.accuracy = static_cast<double>(q.correct) / static_cast<double>(q.documents);
  }
  if (!sheet.rows.empty()) {
    report.inter_rater_agreement =
        static_cast<double>(agree) / static_cast<double>(sheet.rows.size());
  }
  report.summary_documents = summary_by_doc.size();
  if (!summary_by_doc.empty()) {
    std::size_t good = 0;
    for (const auto &[doc, s] : summary_by_doc) good += static_cast<std::size_t>(s);
    report.summary_accuracy =
        static_cast<double>(good) / static_cast<double>(summary_by_doc.size());
  }
  return report;
}

nlohmann::ordered_json TopicReportToJson(const std::vector<PRResult> &results) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto &r : results) {
    nlohmann::ordered_json j;
    j["risk_factor"] = r.risk_factor;
    j["precision"] = OptionalNumber(r.precision);
    j["recall"] = OptionalNumber(r.recall);
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    rows.push_back(std::move(j));
  }
  return rows;
}

nlohmann::ordered_json RubricReportToJson(const RubricReport &report) {
  nlohmann::ordered_json j;
  j["questions"] = nlohmann::ordered_json::array();
  for (const auto &q : report.questions) {
    j["questions"].push_back({{"question_id", q.question_id},
                              {"documents", q.documents},
                              {"correct", q.correct},
                              {"accuracy", q.accuracy}});
  }
  j["summary_accuracy"] = OptionalNumber(report.summary_accuracy);
  j["summary_documents"] = report.summary_documents;
  j["inter_rater_agreement"] = OptionalNumber(report.inter_rater_agreement);
  return j;
}

}  // namespace oats
