#include "reqplumb/word_embeddings.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/requirements.hpp"

namespace reqplumb {

std::vector<Sentence> corpus_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::string piece;
  auto flush = [&] {
    Sentence s;
    for (auto& tok : tokenize(piece)) s.push_back(tok.norm);
    if (!s.empty()) out.push_back(std::move(s));
    piece.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool terminator = c == '\n' || ((c == '.' || c == '!' || c == '?') &&
                                    (i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\n'));
    if (terminator) flush();
    else piece += c;
  }
  flush();
  return out;
}

std::vector<Sentence> load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(fmt::format("corpus directory {} does not exist", dir.string()));
  std::vector<fs::path> files;
  for (auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<Sentence> out;
  for (auto& f : files) {
    auto sentences = corpus_sentences(read_file(f));
    out.insert(out.end(), std::make_move_iterator(sentences.begin()), std::make_move_iterator(sentences.end()));
  }
  if (out.empty()) throw Error(fmt::format("corpus directory {} contains no text", dir.string()));
  return out;
}

const std::vector<double>* WordEmbeddings::find(const std::string& word) const {
  auto it = vectors.find(word);
  return it == vectors.end() ? nullptr : &it->second;
}

std::optional<std::vector<double>> WordEmbeddings::term_vector(const std::vector<std::string>& words) const {
  std::vector<double> sum(static_cast<std::size_t>(dim), 0.0);
  std::size_t n = 0;
  for (auto& w : words) {
    auto* v = find(w);
    if (!v) continue;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*v)[k];
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (auto& x : sum) x /= static_cast<double>(n);
  return sum;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("cosine of vectors with different dimensions");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

namespace {

double sigmoid(double x) {
  if (x > 30) return 1.0;
  if (x < -30) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

WordEmbeddings train_word_embeddings(const std::vector<Sentence>& sentences, const WordEmbeddingConfig& cfg) {
  if (cfg.dim < 1) throw Error("embedding dimension must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (auto& s : sentences)
    for (auto& w : s) ++counts[w];
  if (counts.empty()) throw Error("cannot train word embeddings on an empty corpus");

  std::vector<std::string> vocab;
  std::map<std::string, std::size_t> index;
  for (auto& [w, c] : counts)
    if (c >= cfg.min_count) {
      index[w] = vocab.size();
      vocab.push_back(w);
    }
  if (vocab.empty()) throw Error(fmt::format("no corpus word occurs at least {} times", cfg.min_count));

  const auto V = vocab.size();
  const auto d = static_cast<std::size_t>(cfg.dim);
  std::vector<std::vector<std::size_t>> corpus;
  std::size_t total = 0;
  for (auto& s : sentences) {
    std::vector<std::size_t> ids;
    for (auto& w : s)
      if (auto it = index.find(w); it != index.end()) ids.push_back(it->second);
    total += ids.size();
    if (!ids.empty()) corpus.push_back(std::move(ids));
  }

  // Noise distribution: unigram counts raised to 3/4.
  std::vector<double> cdf(V);
  double acc = 0;
  for (std::size_t i = 0; i < V; ++i) {
    acc += std::pow(static_cast<double>(counts[vocab[i]]), 0.75);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;

  Rng rng(mix_seed(cfg.seed, 0));
  std::vector<double> in(V * d), out(V * d, 0.0);
  for (auto& x : in) x = (uniform01(rng) - 0.5) / static_cast<double>(d);

  std::vector<double> grad(d);
  const double steps = static_cast<double>(std::max<std::size_t>(1, total * static_cast<std::size_t>(std::max(cfg.epochs, 0))));
  double done = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& sent : corpus) {
      for (std::size_t pos = 0; pos < sent.size(); ++pos, ++done) {
        double lr = std::max(cfg.learning_rate * (1.0 - done / steps), cfg.learning_rate * 1e-4);
        auto shrink = uniform_index(rng, static_cast<std::size_t>(std::max(cfg.window, 1)));
        auto win = static_cast<std::size_t>(std::max(cfg.window, 1)) - shrink;
        auto lo = pos >= win ? pos - win : 0;
        auto hi = std::min(sent.size() - 1, pos + win);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          double* v = &in[sent[c] * d];
          std::fill(grad.begin(), grad.end(), 0.0);
          for (int k = 0; k <= cfg.negative; ++k) {
            std::size_t target;
            double label;
            if (k == 0) {
              target = sent[pos];
              label = 1;
            } else {
              target = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), uniform01(rng)) - cdf.begin());
              if (target >= V) target = V - 1;
              if (target == sent[pos]) continue;
              label = 0;
            }
            double* u = &out[target * d];
            double dot = 0;
            for (std::size_t i = 0; i < d; ++i) dot += v[i] * u[i];
            double g = (label - sigmoid(dot)) * lr;
            for (std::size_t i = 0; i < d; ++i) {
              grad[i] += g * u[i];
              u[i] += g * v[i];
            }
          }
          for (std::size_t i = 0; i < d; ++i) v[i] += grad[i];
        }
      }
    }
  }

  // Small corpora push every vector along one shared direction; removing the
  // mean leaves the part that distinguishes words.
  std::vector<double> mean(d, 0.0);
  for (std::size_t w = 0; w < V; ++w)
    for (std::size_t i = 0; i < d; ++i) mean[i] += in[w * d + i] / static_cast<double>(V);
  if (V > 1)
    for (std::size_t w = 0; w < V; ++w)
      for (std::size_t i = 0; i < d; ++i) in[w * d + i] -= mean[i];

  WordEmbeddings e;
  e.dim = cfg.dim;
  for (std::size_t w = 0; w < V; ++w) {
    e.vectors[vocab[w]] = std::vector<double>(in.begin() + static_cast<std::ptrdiff_t>(w * d),
                                              in.begin() + static_cast<std::ptrdiff_t>((w + 1) * d));
    e.counts[vocab[w]] = counts[vocab[w]];
  }
  return e;
}

WordEmbeddings build_corpus_embeddings(const std::filesystem::path& corpus_dir, const WordEmbeddingConfig& cfg) {
  return train_word_embeddings(load_corpus(corpus_dir), cfg);
}

nlohmann::json to_json(const WordEmbeddings& e) {
  nlohmann::json vecs = nlohmann::json::object();
  for (auto& [w, v] : e.vectors) vecs[w] = v;
  return {{"schema", kSchemaVersion}, {"dim", e.dim}, {"counts", e.counts}, {"vectors", vecs}};
}

WordEmbeddings word_embeddings_from_json(const nlohmann::json& j) {
  WordEmbeddings e;
  e.dim = j.at("dim").get<int>();
  e.counts = j.value("counts", std::map<std::string, std::size_t>{});
  for (auto& [w, v] : j.at("vectors").items()) {
    auto vec = v.get<std::vector<double>>();
    if (static_cast<int>(vec.size()) != e.dim) throw Error(fmt::format("vector for '{}' has wrong dimension", w));
    e.vectors[w] = std::move(vec);
  }
  return e;
}

}  // namespace reqplumb
