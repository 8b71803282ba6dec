#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reqplumb/common.hpp"

namespace reqplumb::rdf {

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline const std::string kType = std::string(kRdf) + "type";
inline const std::string kFirst = std::string(kRdf) + "first";
inline const std::string kRest = std::string(kRdf) + "rest";
inline const std::string kNil = std::string(kRdf) + "nil";
inline const std::string kLabel = std::string(kRdfs) + "label";
inline const std::string kSubClassOf = std::string(kRdfs) + "subClassOf";
}  // namespace vocab

enum class TermKind { Iri, Blank, Literal };

struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;     // IRI, blank node label, or lexical form
  std::string datatype;  // literals only
  std::string lang;      // literals only

  static Term iri(std::string v) { return {TermKind::Iri, std::move(v), {}, {}}; }
  static Term blank(std::string v) { return {TermKind::Blank, std::move(v), {}, {}}; }
  static Term literal(std::string v, std::string dt = {}, std::string lang = {}) {
    return {TermKind::Literal, std::move(v), std::move(dt), std::move(lang)};
  }
  bool operator==(const Term&) const = default;
};

struct Statement {
  Term subject;
  std::string predicate;
  Term object;
  bool operator==(const Statement&) const = default;
};

enum class Syntax { RdfXml, Turtle };

std::optional<Syntax> parse_syntax(std::string_view name);
// ".ttl"/".n3"/".nt" -> Turtle, everything else RDF/XML.
Syntax syntax_for_path(const std::filesystem::path& path);

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

std::vector<Statement> parse_turtle(std::string_view content, std::string base = {});
std::vector<Statement> parse_rdfxml(std::string_view content, std::string base = {});
std::vector<Statement> parse_file(const std::filesystem::path& path, Syntax syntax);

// Fragment or last path segment of an IRI.
std::string local_name(std::string_view iri);

// Expands "rdfs:", "rdf:", "owl:", "xsd:" prefixes; other strings pass through.
std::string expand_well_known(std::string_view name);

}  // namespace reqplumb::rdf
