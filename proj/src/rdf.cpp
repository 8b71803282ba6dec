#include "reqplumb/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

namespace reqplumb::rdf {

namespace {

bool has_scheme(std::string_view iri) {
  auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    char c = iri[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.'))
      return false;
  }
  return true;
}

std::string resolve(std::string_view base, std::string_view ref) {
  if (has_scheme(ref) || base.empty()) return std::string(ref);
  if (ref.empty()) {
    auto hash = base.find('#');
    return std::string(base.substr(0, hash));
  }
  if (ref.front() == '#') {
    auto hash = base.find('#');
    return std::string(base.substr(0, hash)) + std::string(ref);
  }
  if (ref.front() == '/') {
    auto scheme_end = base.find("://");
    if (scheme_end != std::string_view::npos) {
      auto path_start = base.find('/', scheme_end + 3);
      return std::string(base.substr(0, path_start)) + std::string(ref);
    }
  }
  auto slash = base.rfind('/');
  if (slash == std::string_view::npos) return std::string(base) + std::string(ref);
  return std::string(base.substr(0, slash + 1)) + std::string(ref);
}

// ---------------------------------------------------------------------------
// Turtle

class TurtleParser {
 public:
  TurtleParser(std::string_view src, std::string base) : src_(src), base_(std::move(base)) {}

  std::vector<Statement> parse() {
    skip_ws();
    while (!eof()) {
      statement();
      skip_ws();
    }
    return std::move(out_);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::string base_;
  std::map<std::string, std::string, std::less<>> prefixes_;
  std::vector<Statement> out_;
  std::size_t blank_counter_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(fmt::format("turtle syntax error at line {}, column {}: {}", line_, col_, msg),
                      line_, col_);
  }

  bool eof() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char get() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void expect(char c) {
    skip_ws();
    if (eof() || peek() != c) fail(fmt::format("expected '{}'", c));
    get();
  }
  bool accept(char c) {
    skip_ws();
    if (!eof() && peek() == c) {
      get();
      return true;
    }
    return false;
  }
  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else {
        break;
      }
    }
  }
  bool starts_with_keyword(std::string_view kw, bool case_insensitive) const {
    if (src_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      char a = src_[pos_ + i];
      char b = kw[i];
      if (case_insensitive ? std::tolower(static_cast<unsigned char>(a)) != std::tolower(static_cast<unsigned char>(b))
                           : a != b)
        return false;
    }
    char after = pos_ + kw.size() < src_.size() ? src_[pos_ + kw.size()] : ' ';
    return std::isspace(static_cast<unsigned char>(after)) || after == '<';
  }

  std::string fresh_blank() { return fmt::format("genid{}", ++blank_counter_); }

  void emit(const Term& s, const std::string& p, const Term& o) { out_.push_back({s, p, o}); }

  void statement() {
    if (peek() == '@') {
      if (starts_with_keyword("@prefix", false)) {
        for (int i = 0; i < 7; ++i) get();
        prefix_decl();
        expect('.');
        return;
      }
      if (starts_with_keyword("@base", false)) {
        for (int i = 0; i < 5; ++i) get();
        skip_ws();
        base_ = resolve(base_, iriref());
        expect('.');
        return;
      }
      fail("unknown directive");
    }
    if (starts_with_keyword("PREFIX", true)) {
      for (int i = 0; i < 6; ++i) get();
      prefix_decl();
      return;
    }
    if (starts_with_keyword("BASE", true)) {
      for (int i = 0; i < 4; ++i) get();
      skip_ws();
      base_ = resolve(base_, iriref());
      return;
    }
    triples();
    expect('.');
  }

  void prefix_decl() {
    skip_ws();
    std::string name;
    while (!eof() && peek() != ':') {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) fail("bad prefix name");
      name += get();
    }
    if (eof()) fail("unterminated prefix declaration");
    get();  // ':'
    skip_ws();
    prefixes_[name] = resolve(base_, iriref());
  }

  std::string iriref() {
    if (peek() != '<') fail("expected IRI");
    get();
    std::string v;
    while (!eof() && peek() != '>') {
      char c = get();
      if (c == '\n') fail("newline in IRI");
      if (c == '\\') v += unicode_escape();
      else v += c;
    }
    if (eof()) fail("unterminated IRI");
    get();
    return v;
  }

  std::string unicode_escape() {
    char k = get();
    std::size_t n = k == 'u' ? 4 : k == 'U' ? 8 : 0;
    if (n == 0) fail("bad escape in IRI");
    std::string hex;
    for (std::size_t i = 0; i < n; ++i) hex += get();
    return encode_utf8(static_cast<unsigned>(std::stoul(hex, nullptr, 16)));
  }

  static std::string encode_utf8(unsigned cp) {
    std::string s;
    if (cp < 0x80) {
      s += static_cast<char>(cp);
    } else if (cp < 0x800) {
      s += static_cast<char>(0xC0 | (cp >> 6));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      s += static_cast<char>(0xE0 | (cp >> 12));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      s += static_cast<char>(0xF0 | (cp >> 18));
      s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return s;
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':' || c == '%' || static_cast<unsigned char>(c) >= 0x80;
  }

  std::string prefixed_name() {
    std::string prefix;
    while (!eof() && peek() != ':' && name_char(peek())) prefix += get();
    if (peek() != ':') fail(fmt::format("expected prefixed name, found '{}'", prefix));
    get();
    std::string local;
    while (!eof()) {
      char c = peek();
      if (c == '\\') {
        get();
        local += get();
      } else if (name_char(c)) {
        // A trailing '.' terminates the statement rather than belonging to the name.
        if (c == '.' && !name_char(peek(1))) break;
        local += get();
      } else {
        break;
      }
    }
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail(fmt::format("undeclared prefix '{}:'", prefix));
    return it->second + local;
  }

  std::string iri() {
    skip_ws();
    if (peek() == '<') return resolve(base_, iriref());
    return prefixed_name();
  }

  Term subject() {
    skip_ws();
    char c = peek();
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '(') return collection();
    if (c == '[') fail("unexpected '['");
    return Term::iri(iri());
  }

  Term blank_label() {
    get();
    get();
    std::string label;
    while (!eof() && name_char(peek()) && peek() != ':') {
      if (peek() == '.' && !name_char(peek(1))) break;
      label += get();
    }
    if (label.empty()) fail("empty blank node label");
    return Term::blank("b_" + label);
  }

  std::string verb() {
    skip_ws();
    if (peek() == 'a' && (std::isspace(static_cast<unsigned char>(peek(1))) || peek(1) == '<' ||
                          peek(1) == '[' || peek(1) == '"'))
    {
      get();
      return vocab::kType;
    }
    return iri();
  }

  void triples() {
    skip_ws();
    if (peek() == '[') {
      Term s = blank_property_list();
      skip_ws();
      if (peek() != '.') predicate_object_list(s);
      return;
    }
    Term s = subject();
    predicate_object_list(s);
  }

  void predicate_object_list(const Term& s) {
    for (;;) {
      std::string p = verb();
      object_list(s, p);
      if (!accept(';')) break;
      // Repeated or trailing ';' are legal.
      while (accept(';')) {
      }
      skip_ws();
      if (peek() == '.' || peek() == ']' || eof()) break;
    }
  }

  void object_list(const Term& s, const std::string& p) {
    do {
      emit(s, p, object());
    } while (accept(','));
  }

  Term blank_property_list() {
    expect('[');
    Term b = Term::blank(fresh_blank());
    skip_ws();
    if (peek() != ']') predicate_object_list(b);
    expect(']');
    return b;
  }

  Term collection() {
    expect('(');
    std::vector<Term> items;
    skip_ws();
    while (!eof() && peek() != ')') {
      items.push_back(object());
      skip_ws();
    }
    expect(')');
    if (items.empty()) return Term::iri(vocab::kNil);
    Term head = Term::blank(fresh_blank());
    Term cur = head;
    for (std::size_t i = 0; i < items.size(); ++i) {
      emit(cur, vocab::kFirst, items[i]);
      Term next = i + 1 < items.size() ? Term::blank(fresh_blank()) : Term::iri(vocab::kNil);
      emit(cur, vocab::kRest, next);
      cur = next;
    }
    return head;
  }

  Term object() {
    skip_ws();
    char c = peek();
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return blank_property_list();
    if (c == '(') return collection();
    if (c == '"' || c == '\'') return string_literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
      return numeric_literal();
    if (starts_with_word("true")) return bool_literal("true");
    if (starts_with_word("false")) return bool_literal("false");
    return Term::iri(iri());
  }

  bool starts_with_word(std::string_view w) const {
    if (src_.substr(pos_, w.size()) != w) return false;
    char after = pos_ + w.size() < src_.size() ? src_[pos_ + w.size()] : ' ';
    return !name_char(after) || after == '.';
  }

  Term bool_literal(std::string_view w) {
    for (std::size_t i = 0; i < w.size(); ++i) get();
    return Term::literal(std::string(w), std::string(vocab::kXsd) + "boolean");
  }

  Term numeric_literal() {
    std::string v;
    bool dot = false, exp = false;
    if (peek() == '+' || peek() == '-') v += get();
    while (!eof()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        v += get();
      } else if (c == '.' && !dot && !exp && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        dot = true;
        v += get();
      } else if ((c == 'e' || c == 'E') && !exp) {
        exp = true;
        v += get();
        if (peek() == '+' || peek() == '-') v += get();
      } else {
        break;
      }
    }
    std::string dt = exp ? "double" : dot ? "decimal" : "integer";
    return Term::literal(v, std::string(vocab::kXsd) + dt);
  }

  Term string_literal() {
    char q = get();
    bool long_form = peek() == q && peek(1) == q;
    if (long_form) {
      get();
      get();
    } else if (peek() == q) {
      get();
      return literal_suffix("");
    }
    std::string v;
    for (;;) {
      if (eof()) fail("unterminated string literal");
      char c = get();
      if (c == '\\') {
        char e = get();
        switch (e) {
          case 't': v += '\t'; break;
          case 'n': v += '\n'; break;
          case 'r': v += '\r'; break;
          case 'b': v += '\b'; break;
          case 'f': v += '\f'; break;
          case 'u':
          case 'U':
            --pos_;
            --col_;
            v += unicode_escape();
            break;
          default: v += e;
        }
        continue;
      }
      if (c == q) {
        if (!long_form) break;
        if (peek() == q && peek(1) == q) {
          get();
          get();
          break;
        }
      }
      if (!long_form && c == '\n') fail("newline in string literal");
      v += c;
    }
    return literal_suffix(std::move(v));
  }

  Term literal_suffix(std::string v) {
    if (peek() == '@') {
      get();
      std::string lang;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-'))
        lang += get();
      return Term::literal(std::move(v), {}, std::move(lang));
    }
    if (peek() == '^' && peek(1) == '^') {
      get();
      get();
      return Term::literal(std::move(v), iri());
    }
    return Term::literal(std::move(v));
  }
};

// ---------------------------------------------------------------------------
// RDF/XML

using boost::property_tree::ptree;

class RdfXmlParser {
 public:
  explicit RdfXmlParser(std::string base) : base_(std::move(base)) {}

  std::vector<Statement> parse(const ptree& doc) {
    for (auto& [name, child] : doc) {
      if (name == "<xmlcomment>" || name == "<xmldecl>") continue;
      Scope scope = child_scope(Scope{{}, base_, {}}, child);
      if (qualify(scope, name) == std::string(vocab::kRdf) + "RDF") {
        for (auto& [n, c] : child) {
          if (n == "<xmlattr>" || n == "<xmlcomment>") continue;
          node_element(scope, n, c);
        }
      } else {
        node_element(scope, name, child);
      }
    }
    return std::move(out_);
  }

 private:
  struct Scope {
    std::map<std::string, std::string> ns;
    std::string base;
    std::string lang;
  };

  std::string base_;
  std::vector<Statement> out_;
  std::size_t blank_counter_ = 0;

  static std::string rdf(std::string_view local) { return std::string(vocab::kRdf) + std::string(local); }

  std::string fresh_blank() { return fmt::format("genid{}", ++blank_counter_); }

  static Scope child_scope(Scope scope, const ptree& node) {
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
      for (auto& [k, v] : *attrs) {
        if (k == "xmlns") scope.ns[""] = v.data();
        else if (k.rfind("xmlns:", 0) == 0) scope.ns[k.substr(6)] = v.data();
        else if (k == "xml:base") scope.base = resolve(scope.base, v.data());
        else if (k == "xml:lang") scope.lang = v.data();
      }
    }
    return scope;
  }

  static std::string qualify(const Scope& scope, std::string_view qname) {
    auto colon = qname.find(':');
    std::string prefix = colon == std::string_view::npos ? "" : std::string(qname.substr(0, colon));
    std::string local(colon == std::string_view::npos ? qname : qname.substr(colon + 1));
    auto it = scope.ns.find(prefix);
    if (it == scope.ns.end()) {
      if (prefix == "xml") return "http://www.w3.org/XML/1998/namespace" + local;
      throw Error(fmt::format("rdf/xml: undeclared namespace prefix '{}' in <{}>", prefix, qname));
    }
    return it->second + local;
  }

  static std::optional<std::string> attr(const ptree& node, const Scope& scope, std::string_view want) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return std::nullopt;
    for (auto& [k, v] : *attrs) {
      if (k.rfind("xmlns", 0) == 0 || k.rfind("xml:", 0) == 0) continue;
      if (k.find(':') == std::string::npos) continue;
      if (qualify(scope, k) == want) return v.data();
    }
    return std::nullopt;
  }

  static bool is_syntax_attr(const std::string& iri) {
    static const std::vector<std::string> names = {
        rdf("about"), rdf("ID"), rdf("nodeID"), rdf("resource"), rdf("datatype"),
        rdf("parseType"), rdf("bagID"), rdf("aboutEach"), rdf("aboutEachPrefix")};
    return std::find(names.begin(), names.end(), iri) != names.end();
  }

  Term node_element(const Scope& outer, const std::string& name, const ptree& node) {
    Scope scope = child_scope(outer, node);
    Term subject;
    if (auto about = attr(node, scope, rdf("about"))) {
      subject = Term::iri(resolve(scope.base, *about));
    } else if (auto id = attr(node, scope, rdf("ID"))) {
      subject = Term::iri(resolve(scope.base, "#" + *id));
    } else if (auto nid = attr(node, scope, rdf("nodeID"))) {
      subject = Term::blank("b_" + *nid);
    } else {
      subject = Term::blank(fresh_blank());
    }
    std::string type = qualify(scope, name);
    if (type != rdf("Description")) out_.push_back({subject, vocab::kType, Term::iri(type)});

    property_attributes(scope, node, subject);

    int li = 0;
    for (auto& [n, c] : node) {
      if (n == "<xmlattr>" || n == "<xmlcomment>") continue;
      property_element(scope, n, c, subject, li);
    }
    return subject;
  }

  void property_attributes(const Scope& scope, const ptree& node, const Term& subject) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return;
    for (auto& [k, v] : *attrs) {
      if (k.rfind("xmlns", 0) == 0 || k.rfind("xml:", 0) == 0 || k.find(':') == std::string::npos)
        continue;
      std::string p = qualify(scope, k);
      if (is_syntax_attr(p)) continue;
      if (p == vocab::kType)
        out_.push_back({subject, p, Term::iri(resolve(scope.base, v.data()))});
      else
        out_.push_back({subject, p, Term::literal(v.data(), {}, scope.lang)});
    }
  }

  void property_element(const Scope& outer, const std::string& name, const ptree& node,
                        const Term& subject, int& li) {
    Scope scope = child_scope(outer, node);
    std::string p = qualify(scope, name);
    if (p == rdf("li")) p = rdf(fmt::format("_{}", ++li));

    std::vector<std::pair<std::string, const ptree*>> children;
    for (auto& [n, c] : node)
      if (n != "<xmlattr>" && n != "<xmlcomment>") children.emplace_back(n, &c);

    auto parse_type = attr(node, scope, rdf("parseType"));
    if (parse_type && *parse_type == "Resource") {
      Term b = Term::blank(fresh_blank());
      out_.push_back({subject, p, b});
      int inner_li = 0;
      for (auto& [n, c] : children) property_element(scope, n, *c, b, inner_li);
      return;
    }
    if (parse_type && *parse_type == "Collection") {
      std::vector<Term> items;
      for (auto& [n, c] : children) items.push_back(node_element(scope, n, *c));
      Term head = items.empty() ? Term::iri(vocab::kNil) : Term::blank(fresh_blank());
      out_.push_back({subject, p, head});
      Term cur = head;
      for (std::size_t i = 0; i < items.size(); ++i) {
        out_.push_back({cur, vocab::kFirst, items[i]});
        Term next = i + 1 < items.size() ? Term::blank(fresh_blank()) : Term::iri(vocab::kNil);
        out_.push_back({cur, vocab::kRest, next});
        cur = next;
      }
      return;
    }
    if (parse_type && *parse_type == "Literal") {
      std::ostringstream xml;
      for (auto& [n, c] : children) {
        ptree wrapper;
        wrapper.add_child(n, *c);
        boost::property_tree::write_xml(xml, wrapper);
      }
      std::string text = children.empty() ? node.data() : xml.str();
      out_.push_back({subject, p, Term::literal(text, rdf("XMLLiteral"))});
      return;
    }
    if (auto res = attr(node, scope, rdf("resource"))) {
      out_.push_back({subject, p, Term::iri(resolve(scope.base, *res))});
      return;
    }
    if (auto nid = attr(node, scope, rdf("nodeID"))) {
      out_.push_back({subject, p, Term::blank("b_" + *nid)});
      return;
    }
    if (!children.empty()) {
      if (children.size() != 1)
        throw Error(fmt::format("rdf/xml: property <{}> holds {} node elements, expected one", name,
                                children.size()));
      Term obj = node_element(scope, children[0].first, *children[0].second);
      out_.push_back({subject, p, obj});
      return;
    }
    // Property attributes on an empty property element describe a blank node.
    bool has_prop_attrs = false;
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
      for (auto& [k, v] : *attrs) {
        if (k.rfind("xmlns", 0) == 0 || k.rfind("xml:", 0) == 0 || k.find(':') == std::string::npos)
          continue;
        if (!is_syntax_attr(qualify(scope, k))) has_prop_attrs = true;
      }
    }
    if (has_prop_attrs) {
      Term b = Term::blank(fresh_blank());
      out_.push_back({subject, p, b});
      property_attributes(scope, node, b);
      return;
    }
    auto dt = attr(node, scope, rdf("datatype"));
    out_.push_back({subject, p,
                    Term::literal(node.data(), dt ? resolve(scope.base, *dt) : std::string{},
                                  dt ? std::string{} : scope.lang)});
  }
};

// Expands internal DTD entities (<!ENTITY owl "...">), which the XML reader
// leaves untouched.
std::string expand_entities(std::string_view content) {
  static const std::regex decl(R"re(<!ENTITY\s+([A-Za-z_][\w.-]*)\s+(?:"([^"]*)"|'([^']*)')\s*>)re");
  std::map<std::string, std::string> entities;
  std::string text(content);
  for (std::sregex_iterator it(text.begin(), text.end(), decl), end; it != end; ++it)
    entities[(*it)[1]] = (*it)[2].matched ? (*it)[2].str() : (*it)[3].str();
  if (entities.empty()) return text;
  // Drop the DOCTYPE block so the XML reader does not trip over it.
  auto doctype = text.find("<!DOCTYPE");
  if (doctype != std::string::npos) {
    auto close = text.find("]>", doctype);
    if (close != std::string::npos) {
      std::size_t removed_lines = 0;
      for (std::size_t i = doctype; i < close + 2; ++i) removed_lines += text[i] == '\n';
      text.replace(doctype, close + 2 - doctype, std::string(removed_lines, '\n'));
    }
  }
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '&') {
      auto semi = text.find(';', i);
      if (semi != std::string::npos) {
        auto it = entities.find(text.substr(i + 1, semi - i - 1));
        if (it != entities.end()) {
          out += it->second;
          i = semi + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

}  // namespace

std::optional<Syntax> parse_syntax(std::string_view name) {
  if (name == "turtle" || name == "ttl") return Syntax::Turtle;
  if (name == "rdf-xml" || name == "rdfxml" || name == "xml" || name == "owl") return Syntax::RdfXml;
  return std::nullopt;
}

Syntax syntax_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".ttl" || ext == ".n3" || ext == ".nt") return Syntax::Turtle;
  return Syntax::RdfXml;
}

std::vector<Statement> parse_turtle(std::string_view content, std::string base) {
  return TurtleParser(content, std::move(base)).parse();
}

std::vector<Statement> parse_rdfxml(std::string_view content, std::string base) {
  std::istringstream in(expand_entities(content));
  ptree doc;
  try {
    boost::property_tree::read_xml(in, doc);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw SyntaxError(fmt::format("rdf/xml syntax error at line {}: {}", e.line(), e.message()),
                      e.line(), 0);
  }
  return RdfXmlParser(std::move(base)).parse(doc);
}

std::vector<Statement> parse_file(const std::filesystem::path& path, Syntax syntax) {
  std::string content = read_file(path);
  std::string base = "file://" + std::filesystem::absolute(path).string();
  try {
    return syntax == Syntax::Turtle ? parse_turtle(content, base) : parse_rdfxml(content, base);
  } catch (const SyntaxError& e) {
    throw SyntaxError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

std::string local_name(std::string_view iri) {
  auto cut = iri.find_last_of("#/:");
  if (cut == std::string_view::npos) return std::string(iri);
  if (cut + 1 == iri.size()) return local_name(iri.substr(0, cut));
  return std::string(iri.substr(cut + 1));
}

std::string expand_well_known(std::string_view name) {
  static const std::pair<std::string_view, std::string_view> known[] = {
      {"rdf:", vocab::kRdf}, {"rdfs:", vocab::kRdfs}, {"owl:", vocab::kOwl}, {"xsd:", vocab::kXsd}};
  for (auto& [prefix, ns] : known)
    if (name.substr(0, prefix.size()) == prefix) return std::string(ns) + std::string(name.substr(prefix.size()));
  return std::string(name);
}

}  // namespace reqplumb::rdf
