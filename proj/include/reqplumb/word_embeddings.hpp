#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace reqplumb {

struct WordEmbeddingConfig {
  int dim = 50;
  int window = 5;
  std::size_t min_count = 2;
  int epochs = 5;
  int negative = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 42;
};

using Sentence = std::vector<std::string>;

// Normalized word sequences, one per line-delimited sentence, from every
// regular file under `dir` (sorted by path).
std::vector<Sentence> load_corpus(const std::filesystem::path& dir);
std::vector<Sentence> corpus_sentences(std::string_view text);

class WordEmbeddings {
 public:
  int dim = 0;
  std::map<std::string, std::vector<double>> vectors;
  std::map<std::string, std::size_t> counts;

  const std::vector<double>* find(const std::string& word) const;
  // Mean of the in-vocabulary word vectors; nullopt when none are covered.
  std::optional<std::vector<double>> term_vector(const std::vector<std::string>& words) const;
  std::size_t vocabulary_size() const { return vectors.size(); }
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Skip-gram with negative sampling; single-threaded and deterministic for a
// given seed.
WordEmbeddings train_word_embeddings(const std::vector<Sentence>& sentences, const WordEmbeddingConfig& cfg);

WordEmbeddings build_corpus_embeddings(const std::filesystem::path& corpus_dir, const WordEmbeddingConfig& cfg);

nlohmann::json to_json(const WordEmbeddings& e);
WordEmbeddings word_embeddings_from_json(const nlohmann::json& j);

}  // namespace reqplumb
