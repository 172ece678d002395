#include "oats/embeddings.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "oats/error.h"
#include "oats/text.h"

namespace oats {

namespace {

std::string NormalizeTerm(std::string_view term) {
  try {
    return FoldCaseUtf8(term);
  } catch (const Error &) {
    throw Error(ErrorCode::kParse, "term is not valid UTF-8");
  }
}

std::uint32_t LoadLe32(const char *p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof v);
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  return v;
}

void StoreLe32(std::uint32_t v, char *p) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  std::memcpy(p, &v, sizeof v);
}

// Parses "V D" (optionally followed by trailing whitespace).
bool ParseHeader(std::string_view line, std::size_t *vocab, std::size_t *dim) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
  auto sp = line.find(' ');
  if (sp == std::string_view::npos) return false;
  auto a = line.substr(0, sp);
  auto b = line.substr(sp + 1);
  auto r1 = std::from_chars(a.data(), a.data() + a.size(), *vocab);
  auto r2 = std::from_chars(b.data(), b.data() + b.size(), *dim);
  return r1.ec == std::errc() && r1.ptr == a.data() + a.size() &&
         r2.ec == std::errc() && r2.ptr == b.data() + b.size() && *dim > 0;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::kDimensionMismatch, "dimension must be positive");
}

void EmbeddingStore::Add(std::string_view term, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector for '" + std::string(term) + "' has " +
                    std::to_string(values.size()) + " components, expected " +
                    std::to_string(dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteComponent,
                  "non-finite component for '" + std::string(term) + "'");
    }
  }
  std::string key = NormalizeTerm(term);
  if (key.empty()) throw Error(ErrorCode::kParse, "empty term");
  auto [it, inserted] = index_.emplace(key, terms_.size());
  if (!inserted) {
    throw Error(ErrorCode::kDuplicateTerm, "duplicate term '" + key + "'");
  }
  terms_.push_back(std::move(key));
  data_.insert(data_.end(), values.begin(), values.end());
}

bool EmbeddingStore::Contains(std::string_view normalized_term) const {
  return index_.find(std::string(normalized_term)) != index_.end();
}

std::span<const float> EmbeddingStore::Find(std::string_view normalized_term) const {
  auto it = index_.find(std::string(normalized_term));
  if (it == index_.end()) return {};
  return row(it->second);
}

std::optional<Vector> EmbeddingStore::Lookup(std::string_view normalized_term) const {
  auto values = Find(normalized_term);
  if (values.empty()) return std::nullopt;
  return Vector(values.begin(), values.end());
}

bool operator==(const EmbeddingStore &a, const EmbeddingStore &b) {
  if (a.dim() != b.dim() || a.terms() != b.terms()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto x = a.row(i), y = b.row(i);
    if (!std::equal(x.begin(), x.end(), y.begin())) return false;
  }
  return true;
}

EmbeddingStore LoadTextFormat(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParse, path.string() + ":1: missing header");
  }
  std::size_t vocab = 0, dim = 0;
  if (!ParseHeader(line, &vocab, &dim)) {
    throw Error(ErrorCode::kParse, path.string() + ":1: malformed header '" + line + "'");
  }

  EmbeddingStore store(dim);
  std::vector<float> values(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' ')) rest.remove_suffix(1);
    if (rest.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (store.size() == vocab) {
      throw Error(ErrorCode::kHeaderMismatch,
                  where + ": more rows than the declared " + std::to_string(vocab));
    }

    auto sp = rest.find(' ');
    if (sp == std::string_view::npos || sp == 0) {
      throw Error(ErrorCode::kParse, where + ": expected word followed by components");
    }
    std::string_view word = rest.substr(0, sp);
    rest.remove_prefix(sp + 1);

    std::size_t count = 0;
    while (!rest.empty()) {
      auto next = rest.find(' ');
      std::string_view field = rest.substr(0, next);
      rest = next == std::string_view::npos ? std::string_view() : rest.substr(next + 1);
      if (count == dim) {
        ++count;
        break;
      }
      float v = 0;
      auto r = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || r.ec != std::errc() || r.ptr != field.data() + field.size()) {
        throw Error(ErrorCode::kParse,
                    where + ": non-numeric component '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteComponent, where + ": non-finite component");
      }
      values[count++] = v;
    }
    if (count != dim) {
      throw Error(ErrorCode::kParse, where + ": expected " + std::to_string(dim) +
                                         " components");
    }
    try {
      store.Add(word, values);
    } catch (const Error &e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  if (store.size() != vocab) {
    throw Error(ErrorCode::kHeaderMismatch,
                path.string() + ": header declares " + std::to_string(vocab) +
                    " rows, file has " + std::to_string(store.size()));
  }
  return store;
}

EmbeddingStore LoadBinaryFormat(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  std::string header;
  if (!std::getline(in, header)) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": missing header");
  }
  std::size_t vocab = 0, dim = 0;
  if (!ParseHeader(header, &vocab, &dim)) {
    throw Error(ErrorCode::kHeaderMismatch,
                path.string() + ": malformed header '" + header + "'");
  }

  EmbeddingStore store(dim);
  std::vector<char> raw(dim * sizeof(float));
  std::vector<float> values(dim);
  std::string word;
  for (std::size_t i = 0; i < vocab; ++i) {
    const std::string where = path.string() + ": record " + std::to_string(i);
    int c = in.get();
    while (c == '\n') c = in.get();
    if (c == EOF) {
      throw Error(ErrorCode::kHeaderMismatch,
                  path.string() + ": header declares " + std::to_string(vocab) +
                      " records, file has " + std::to_string(i));
    }
    word.clear();
    while (c != ' ') {
      if (c == EOF) throw Error(ErrorCode::kTruncatedFile, where + ": EOF inside word");
      word.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (word.empty()) throw Error(ErrorCode::kParse, where + ": empty word");
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw Error(ErrorCode::kTruncatedFile, where + ": EOF inside vector");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      values[d] = std::bit_cast<float>(LoadLe32(raw.data() + d * sizeof(float)));
      if (!std::isfinite(values[d])) {
        throw Error(ErrorCode::kNonFiniteComponent,
                    where + " ('" + word + "'): non-finite component");
      }
    }
    if (in.peek() == '\n') in.get();
    try {
      store.Add(word, values);
    } catch (const Error &e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  for (int c = in.get(); c != EOF; c = in.get()) {
    if (c != '\n' && c != ' ' && c != '\r') {
      throw Error(ErrorCode::kHeaderMismatch,
                  path.string() + ": data after the declared " +
                      std::to_string(vocab) + " records");
    }
  }
  return store;
}

void WriteTextFormat(const EmbeddingStore &store, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << store.size() << ' ' << store.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.terms()[i];
    for (float v : store.row(i)) {
      auto r = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ';
      out.write(buf, r.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

void WriteBinaryFormat(const EmbeddingStore &store, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << store.size() << ' ' << store.dim() << '\n';
  std::vector<char> raw(store.dim() * sizeof(float));
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.terms()[i] << ' ';
    auto row = store.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) {
      StoreLe32(std::bit_cast<std::uint32_t>(row[d]), raw.data() + d * sizeof(float));
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

EmbeddingFormat ParseEmbeddingFormat(std::string_view name) {
  if (name == "text") return EmbeddingFormat::kText;
  if (name == "binary") return EmbeddingFormat::kBinary;
  throw Error(ErrorCode::kConfig, "unknown embeddings format '" + std::string(name) + "'");
}

EmbeddingStore LoadEmbeddings(const std::filesystem::path &path, EmbeddingFormat format) {
  return format == EmbeddingFormat::kText ? LoadTextFormat(path) : LoadBinaryFormat(path);
}

double CosineDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw Error(ErrorCode::kZeroNorm, "zero-norm vector");
  const double d = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(d, 0.0, 2.0);
}

std::optional<Vector> PhraseVector(const EmbeddingStore &store, const Phrase &terms) {
  Vector sum(store.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto &term : terms) {
    auto values = store.Find(term);
    if (values.empty()) continue;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += values[d];
    ++hits;
  }
  if (hits == 0) return std::nullopt;
  if (hits > 1) {
    for (double &v : sum) v /= static_cast<double>(hits);
  }
  return sum;
}

namespace {

bool IsZero(const Vector &v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

std::optional<PhraseMatch> MinDistanceToTerm(const EmbeddingStore &store,
                                             const std::vector<Phrase> &candidates,
                                             const Phrase &target) {
  auto target_vec = PhraseVector(store, target);
  if (!target_vec || IsZero(*target_vec)) return std::nullopt;
  std::optional<PhraseMatch> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto vec = PhraseVector(store, candidates[i]);
    if (!vec || IsZero(*vec)) continue;
    const double d = CosineDistance(*vec, *target_vec);
    if (!best || d < best->distance) best = PhraseMatch{d, i};
  }
  return best;
}

}  // namespace oats
