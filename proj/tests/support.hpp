#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "reqplumb/common.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/rdf.hpp"
#include "reqplumb/requirements.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return REQPLUMB_DATA_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return data_dir() / "fixtures" / name; }

inline reqplumb::PosLexicon lexicon() { return reqplumb::PosLexicon::load(data_dir() / "lexicon" / "pos_lexicon.tsv"); }

inline reqplumb::RequirementSet requirements(const std::string& text, const std::string& name = "t") {
  return reqplumb::annotate(reqplumb::parse_requirements(text, name, reqplumb::RequirementFormat::OnePerLine),
                            lexicon());
}

inline reqplumb::DomainModel turtle_model(const std::string& ttl) {
  return reqplumb::build_model(reqplumb::rdf::parse_turtle(ttl));
}

// Fixture configuration with absolute paths, a private curation directory and
// `extra` appended (later keys in the same section must not repeat earlier ones).
inline std::string fixture_config(const std::string& name, const std::filesystem::path& curation,
                                  const std::string& extra = {}) {
  auto dir = fixture(name);
  auto lex = data_dir() / "lexicon";
  bool uav = name == "uav";
  std::string s;
  s += "[paths]\n";
  s += "model = \"" + (dir / (uav ? "model.ttl" : "model.rdf")).string() + "\"\n";
  s += "requirements = \"" + (dir / "requirements.txt").string() + "\"\n";
  s += "corpus = \"" + (dir / "corpus").string() + "\"\n";
  s += "pos_lexicon = \"" + (lex / "pos_lexicon.tsv").string() + "\"\n";
  s += "stopwords = \"" + (lex / "stopwords.txt").string() + "\"\n";
  s += "synonym_lexicon = \"" + (lex / "synonyms.tsv").string() + "\"\n";
  s += "curation = \"" + curation.string() + "\"\n";
  s += "[model]\nhierarchy_predicates = [\"";
  s += uav ? "hasSubClasses=parent-to-child" : "rdfs:subClassOf";
  s += "\"]\n";
  s += "[word_embeddings]\nepochs = 100\n";
  s += "[split]\nratio = 0.7\nseed = 7\n";
  s += "[families]\nrule = \"relative(0.5)\"\n";
  s += extra;
  return s;
}

// Copies the committed decisions of a fixture into `dir`.
inline void copy_curation(const std::string& name, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (auto& e : std::filesystem::directory_iterator(fixture(name) / "curation"))
    std::filesystem::copy_file(e.path(), dir / e.path().filename(),
                               std::filesystem::copy_options::overwrite_existing);
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("reqplumb-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
