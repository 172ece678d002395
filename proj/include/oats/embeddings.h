#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace oats {

// Vectors are kept as float32 (the on-disk precision) and promoted to double
// for every computation.
using Vector = std::vector<double>;
using Phrase = std::vector<std::string>;  // normalized terms

// Vocabulary -> vector map loaded from a word2vec file. Immutable after
// construction; terms are case-folded on insertion.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Adds a term. Throws kDuplicateTerm if its normalized form is present and
  // kDimensionMismatch / kNonFiniteComponent on bad vectors.
  void Add(std::string_view term, std::span<const float> values);

  bool Contains(std::string_view normalized_term) const;
  // Raw float32 components, empty span when absent.
  std::span<const float> Find(std::string_view normalized_term) const;
  std::optional<Vector> Lookup(std::string_view normalized_term) const;

  // Terms in insertion (file) order.
  const std::vector<std::string> &terms() const { return terms_; }
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::size_t dim_;
  std::vector<std::string> terms_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

bool operator==(const EmbeddingStore &a, const EmbeddingStore &b);

// Text format: header "V D", then "word v1 ... vD" per line.
EmbeddingStore LoadTextFormat(const std::filesystem::path &path);
// Classic word2vec binary: "V D\n" then V records of word bytes, a space, D
// little-endian float32 values and an optional '\n'.
EmbeddingStore LoadBinaryFormat(const std::filesystem::path &path);

void WriteTextFormat(const EmbeddingStore &store, const std::filesystem::path &path);
void WriteBinaryFormat(const EmbeddingStore &store, const std::filesystem::path &path);

enum class EmbeddingFormat { kText, kBinary };
EmbeddingFormat ParseEmbeddingFormat(std::string_view name);
EmbeddingStore LoadEmbeddings(const std::filesystem::path &path, EmbeddingFormat format);

// 1 - cos(a, b), clamped to [0, 2]. Throws kDimensionMismatch or kZeroNorm.
double CosineDistance(std::span<const double> a, std::span<const double> b);

// Component-wise mean of in-vocabulary term vectors; nullopt when no term is
// in the vocabulary.
std::optional<Vector> PhraseVector(const EmbeddingStore &store, const Phrase &terms);

struct PhraseMatch {
  double distance = 0.0;
  std::size_t candidate = 0;  // index into the candidate list
};

// Smallest cosine distance between the target phrase and any candidate.
// Candidates (or a target) that resolve to no vector, or to a zero vector,
// are skipped. Ties keep the earliest candidate.
std::optional<PhraseMatch> MinDistanceToTerm(const EmbeddingStore &store,
                                             const std::vector<Phrase> &candidates,
                                             const Phrase &target);

}  // namespace oats
