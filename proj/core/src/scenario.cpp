#include "tgd/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>

#include "json.hpp"
#include "tgd/error.hpp"

namespace tgd {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident,
  Number,  // unsigned integer or integer/integer
  Str,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Colon,
  Semi,
  Comma,
  Equals,
  Star,
  Caret,
  Plus,
  Minus,
  Tensor,  // (x)
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 0;
  int col = 0;
};

[[noreturn]] void fail_at(const Token& t, const std::string& msg) {
  fail_input("line " + std::to_string(t.line) + ", column " + std::to_string(t.col) + ": " + msg);
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') bump(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (c == '(' && i + 2 < text.size() && text[i + 1] == 'x' && text[i + 2] == ')') {
      t.kind = Tok::Tensor;
      t.text = "(x)";
      bump(3);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') fail_at(t, "unterminated string");
      t.kind = Tok::Str;
      t.text = text.substr(i + 1, j - i - 1);
      bump(j - i + 1);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '/' && j + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      t.kind = Tok::Number;
      t.text = text.substr(i, j - i);
      bump(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (ident_char(c) && !std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Tok::Ident;
      t.text = text.substr(i, j - i);
      bump(j - i);
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case '[': t.kind = Tok::LBracket; break;
      case ']': t.kind = Tok::RBracket; break;
      case ':': t.kind = Tok::Colon; break;
      case ';': t.kind = Tok::Semi; break;
      case ',': t.kind = Tok::Comma; break;
      case '=': t.kind = Tok::Equals; break;
      case '*': t.kind = Tok::Star; break;
      case '^': t.kind = Tok::Caret; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      default: fail_at(t, std::string("unexpected character '") + c + "'");
    }
    t.text = std::string(1, c);
    bump(1);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(std::move(end));
  return out;
}

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : toks(lex(text)) {}

  const Token& peek() const { return toks[pos]; }
  const Token& peek2() const { return toks[std::min(pos + 1, toks.size() - 1)]; }
  Token next() { return toks[std::min(pos++, toks.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos;
    return true;
  }
  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail_at(peek(), "expected " + what);
    return next();
  }
  bool at_keyword(const std::string& kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  bool accept_keyword(const std::string& kw) {
    if (!at_keyword(kw)) return false;
    ++pos;
    return true;
  }
  void expect_keyword(const std::string& kw) {
    if (!accept_keyword(kw)) fail_at(peek(), "expected '" + kw + "'");
  }
};

Scalar parse_rational(Parser& p) {
  Token t = p.expect(Tok::Number, "a number");
  return scalar_from_string(t.text);
}

int parse_int(Parser& p, const std::string& what) {
  Token t = p.expect(Tok::Number, what);
  if (t.text.find('/') != std::string::npos) fail_at(t, "expected an integer");
  return std::stoi(t.text);
}

// Optional leading sign of a sum term; +1 / -1.
int term_sign(Parser& p, bool first) {
  if (p.accept(Tok::Minus)) return -1;
  if (p.accept(Tok::Plus)) return 1;
  if (!first) fail_at(p.peek(), "expected '+' or '-' between terms");
  return 1;
}

bool sum_continues(const Parser& p) {
  return p.peek().kind == Tok::Plus || p.peek().kind == Tok::Minus;
}

// ---------------------------------------------------------------------------
// Expressions

// Base-level sum as label/coefficient pairs, usable before the algebra
// exists.  A bare number is a multiple of the unit, addressed by an empty
// label resolved later.
using RawSum = std::vector<std::pair<std::string, Scalar>>;

RawSum parse_raw_base_sum(Parser& p) {
  RawSum out;
  bool first = true;
  do {
    int sign = term_sign(p, first);
    first = false;
    Scalar coeff = sign;
    bool have_coeff = false;
    bool starred = false;
    if (p.peek().kind == Tok::Number) {
      coeff = sign * parse_rational(p);
      have_coeff = true;
      starred = p.accept(Tok::Star);
    }
    // A label follows a coefficient only through '*'; a bare number is a
    // unit multiple, so the next identifier can open the next entry.
    if (p.peek().kind == Tok::Ident && (!have_coeff || starred)) {
      out.emplace_back(p.next().text, coeff);
    } else if (starred) {
      fail_at(p.peek(), "expected a label after '*'");
    } else if (have_coeff) {
      out.emplace_back(std::string(), coeff);  // unit multiple
    } else {
      fail_at(p.peek(), "expected a term");
    }
  } while (sum_continues(p));
  return out;
}

BaseElement realize_base(const CDGAPtr& base, const RawSum& sum, const Token& where) {
  BaseElement out(base);
  for (const auto& [label, coeff] : sum) {
    int idx = label.empty() ? base->unit : base->index_of(label);
    if (idx < 0) fail_at(where, "unknown base label '" + label + "'");
    out.add_term(idx, coeff);
  }
  return out;
}

BaseElement parse_base_sum(Parser& p, const CDGAPtr& base) {
  Token where = p.peek();
  return realize_base(base, parse_raw_base_sum(p), where);
}

TCElement parse_model_sum(Parser& p, const ModelPtr& m) {
  TCElement out(m);
  bool first = true;
  do {
    int sign = term_sign(p, first);
    first = false;
    Scalar coeff = sign;
    bool have_any = false;
    bool starred = false;
    if (p.peek().kind == Tok::Number) {
      coeff = sign * parse_rational(p);
      have_any = true;
      starred = p.accept(Tok::Star);
    }
    TCElement term = TCElement::unit(m);
    bool word_seen = false;
    if (starred && p.peek().kind != Tok::Ident)
      fail_at(p.peek(), "expected a term after '*'");
    if (p.peek().kind == Tok::Ident && (!have_any || starred)) {
      Token t = p.peek();
      int gi = m->gen_index(t.text);
      if (gi >= 0) {
        // Wedge the generators in written order; signs and repetition
        // come out of the product.
        while (true) {
          Token g = p.expect(Tok::Ident, "a generator label");
          int idx = m->gen_index(g.text);
          if (idx < 0) fail_at(g, "unknown generator '" + g.text + "'");
          term = term * TCElement::generator(m, idx);
          word_seen = true;
          if (!p.accept(Tok::Caret)) break;
        }
        if (p.accept(Tok::Tensor)) {
          Token b = p.expect(Tok::Ident, "a base label");
          int bi = m->base->index_of(b.text);
          if (bi < 0) fail_at(b, "unknown base label '" + b.text + "'");
          term = term * TCElement::from_base(m, BaseElement::basis(m->base, bi));
        }
      } else {
        int bi = m->base->index_of(t.text);
        if (bi < 0) fail_at(t, "unknown label '" + t.text + "'");
        p.next();
        term = TCElement::from_base(m, BaseElement::basis(m->base, bi));
        word_seen = true;
      }
      have_any = true;
    }
    if (!have_any) fail_at(p.peek(), "expected a term");
    (void)word_seen;
    out += coeff * term;
  } while (sum_continues(p));
  return out;
}

CliffordSection parse_section_sum(Parser& p, const ModelPtr& m) {
  std::vector<Scalar> vec(m->base->contractions.size(), Scalar(0));
  CliffordElement cl(m);
  bool saw_part = false;
  if (p.peek().kind == Tok::Number && p.peek().text == "0" && p.peek2().kind != Tok::Star &&
      p.peek2().kind != Tok::Caret) {
    p.next();
    return make_section(m, std::move(vec), std::move(cl));
  }
  if (p.at_keyword("X")) {
    p.next();
    p.expect(Tok::Colon, "':' after X");
    bool first = true;
    do {
      int sign = term_sign(p, first);
      first = false;
      Scalar coeff = sign;
      if (p.peek().kind == Tok::Number) {
        coeff = sign * parse_rational(p);
        p.accept(Tok::Star);
      }
      Token t = p.expect(Tok::Ident, "a contraction name");
      int k = m->base->contraction_index(t.text);
      if (k < 0) fail_at(t, "unknown contraction '" + t.text + "'");
      vec[std::size_t(k)] += coeff;
    } while (sum_continues(p));
    saw_part = true;
    p.accept(Tok::Semi);
  }
  if (p.at_keyword("C")) {
    p.next();
    p.expect(Tok::Colon, "':' after C");
    bool first = true;
    do {
      int sign = term_sign(p, first);
      first = false;
      Scalar coeff = sign;
      bool have_coeff = false;
      bool starred = false;
      if (p.peek().kind == Tok::Number) {
        coeff = sign * parse_rational(p);
        have_coeff = true;
        starred = p.accept(Tok::Star);
      }
      CliffordElement word = CliffordElement::identity(m);
      bool have_word = false;
      const bool term_open = !have_coeff || starred;
      if (starred && p.peek().kind != Tok::Ident)
        fail_at(p.peek(), "expected a term after '*'");
      if (term_open && p.peek().kind == Tok::Ident &&
          (p.peek().text == "psi" || p.peek().text == "dpsi") &&
          p.peek2().kind == Tok::LBracket) {
        while (true) {
          Token f = p.expect(Tok::Ident, "psi or dpsi");
          bool create = f.text == "psi";
          if (!create && f.text != "dpsi") fail_at(f, "expected psi or dpsi");
          p.expect(Tok::LBracket, "'['");
          int idx = parse_int(p, "a generator number");
          p.expect(Tok::RBracket, "']'");
          if (idx < 1 || idx > m->n()) fail_at(f, "generator number out of range");
          word = word * (create ? CliffordElement::creation(m, idx - 1)
                                : CliffordElement::annihilation(m, idx - 1));
          have_word = true;
          if (!p.accept(Tok::Caret)) break;
        }
        if (p.accept(Tok::Tensor)) {
          Token b = p.expect(Tok::Ident, "a base label");
          int bi = m->base->index_of(b.text);
          if (bi < 0) fail_at(b, "unknown base label '" + b.text + "'");
          word = word.tensor(BaseElement::basis(m->base, bi));
        }
      } else if (term_open && p.peek().kind == Tok::Ident) {
        Token b = p.next();
        int bi = m->base->index_of(b.text);
        if (bi < 0) fail_at(b, "unknown base label '" + b.text + "'");
        word = word.tensor(BaseElement::basis(m->base, bi));
        have_word = true;
      }
      if (!have_word && !have_coeff) fail_at(p.peek(), "expected a clifford term");
      cl += coeff * word;
    } while (sum_continues(p));
    saw_part = true;
  }
  if (!saw_part) fail_at(p.peek(), "expected 'X:', 'C:' or 0");
  return make_section(m, std::move(vec), std::move(cl));
}

void expect_end(Parser& p) {
  if (p.peek().kind != Tok::End) fail_at(p.peek(), "trailing input after expression");
}

// ---------------------------------------------------------------------------
// Scenario text parsing

struct PendingContraction {
  std::string name;
  std::vector<std::pair<std::string, RawSum>> images;
  Token where;
};

CDGAPtr parse_base_block(Parser& p) {
  p.expect(Tok::LBrace, "'{' after base");
  CDGABuilder b;
  bool have_unit = false;
  std::string unit_label;
  std::vector<PendingContraction> contractions;
  Token block_start = p.peek();
  while (!p.accept(Tok::RBrace)) {
    if (p.accept_keyword("basis")) {
      do {
        Token l = p.expect(Tok::Ident, "a basis label");
        p.expect(Tok::Colon, "':' after basis label");
        int deg = parse_int(p, "a degree");
        b.element(l.text, deg);
      } while (p.peek().kind == Tok::Ident && p.peek2().kind == Tok::Colon);
    } else if (p.accept_keyword("unit")) {
      Token l = p.expect(Tok::Ident, "the unit label");
      b.unit(l.text);
      have_unit = true;
      unit_label = l.text;
    } else if (p.accept_keyword("product")) {
      if (!have_unit) fail_at(p.peek(), "declare the unit before products");
      Token a = p.expect(Tok::Ident, "a basis label");
      p.expect(Tok::Star, "'*'");
      Token c = p.expect(Tok::Ident, "a basis label");
      p.expect(Tok::Equals, "'='");
      RawSum sum = parse_raw_base_sum(p);
      std::vector<std::pair<std::string, Scalar>> val;
      for (auto& [label, coeff] : sum)
        if (!is_zero(coeff)) val.emplace_back(label.empty() ? unit_label : label, coeff);
      b.product(a.text, c.text, val);
    } else if (p.accept_keyword("d")) {
      if (!have_unit) fail_at(p.peek(), "declare the unit before differentials");
      Token l = p.expect(Tok::Ident, "a basis label");
      p.expect(Tok::Equals, "'='");
      RawSum sum = parse_raw_base_sum(p);
      std::vector<std::pair<std::string, Scalar>> val;
      for (auto& [label, coeff] : sum)
        if (!is_zero(coeff)) val.emplace_back(label.empty() ? unit_label : label, coeff);
      b.differential(l.text, val);
    } else if (p.accept_keyword("contraction")) {
      if (!have_unit) fail_at(p.peek(), "declare the unit before contractions");
      Token n = p.expect(Tok::Ident, "a contraction name");
      Token l = p.expect(Tok::Ident, "a basis label");
      p.expect(Tok::Equals, "'='");
      RawSum sum = parse_raw_base_sum(p);
      auto it = std::find_if(contractions.begin(), contractions.end(),
                             [&](const PendingContraction& c) { return c.name == n.text; });
      if (it == contractions.end()) {
        contractions.push_back({n.text, {}, n});
        it = contractions.end() - 1;
      }
      it->images.emplace_back(l.text, std::move(sum));
    } else if (p.peek().kind == Tok::End) {
      fail_at(p.peek(), "unterminated base block");
    } else {
      fail_at(p.peek(), "unknown entry in base block");
    }
  }
  for (const PendingContraction& c : contractions) {
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, Scalar>>>> images;
    for (const auto& [label, sum] : c.images) {
      std::vector<std::pair<std::string, Scalar>> val;
      for (const auto& [il, coeff] : sum)
        if (!is_zero(coeff)) val.emplace_back(il.empty() ? unit_label : il, coeff);
      images.emplace_back(label, std::move(val));
    }
    b.contraction(c.name, images);
  }
  try {
    CDGAPtr alg = b.build();
    // Scenario files must carry an actual algebra, not just well-formed
    // tables; the axiom check names the first offending entry.
    ValidationReport rep = validate(*alg);
    if (!rep.ok())
      fail_input(rep.violations.front().axiom + ": " + rep.violations.front().detail);
    return alg;
  } catch (const Error& e) {
    fail_input("base block at line " + std::to_string(block_start.line) + ": " + e.what());
  }
}

ModelPtr parse_fibration_block(Parser& p, const CDGAPtr& base, const std::string& which) {
  p.expect(Tok::LBrace, "'{' after fibration name");
  std::vector<OddGenerator> gens;
  while (!p.accept(Tok::RBrace)) {
    if (p.accept_keyword("gen")) {
      Token l = p.expect(Tok::Ident, "a generator label");
      p.expect(Tok::Colon, "':' after generator label");
      int deg = parse_int(p, "a degree");
      p.expect(Tok::Equals, "'='");
      Token where = p.peek();
      BaseElement tr = parse_base_sum(p, base);
      OddGenerator g;
      g.label = l.text;
      g.degree = deg;
      g.transgression = std::move(tr);
      gens.push_back(std::move(g));
      (void)where;
    } else if (p.peek().kind == Tok::End) {
      fail_at(p.peek(), "unterminated fibration block");
    } else {
      fail_at(p.peek(), "unknown entry in fibration block");
    }
  }
  try {
    return make_model(base, std::move(gens));
  } catch (const Error& e) {
    fail_input("fibration " + which + ": " + e.what());
  }
}

ParsedScenario parse_text_scenario(const std::string& text) {
  Parser p(text);
  p.expect_keyword("scenario");
  Token name = p.expect(Tok::Str, "a quoted scenario name");

  CDGAPtr base;
  ModelPtr e, ehat;
  bool have_h = false, have_hhat = false, have_f = false;
  TCElement h, hhat, f;
  ModelPtr corr_total;
  std::map<std::string, CliffordSection> sections;

  while (p.peek().kind != Tok::End) {
    if (p.accept_keyword("base")) {
      if (base) fail_at(p.peek(), "duplicate base block");
      base = parse_base_block(p);
    } else if (p.accept_keyword("fibration")) {
      Token which = p.expect(Tok::Ident, "'E' or 'Ehat'");
      if (!base) fail_at(which, "the base block must come first");
      if (which.text == "E") {
        if (e) fail_at(which, "duplicate fibration E");
        e = parse_fibration_block(p, base, "E");
      } else if (which.text == "Ehat") {
        if (ehat) fail_at(which, "duplicate fibration Ehat");
        ehat = parse_fibration_block(p, base, "Ehat");
      } else {
        fail_at(which, "fibration must be 'E' or 'Ehat'");
      }
    } else if (p.accept_keyword("twist")) {
      Token which = p.expect(Tok::Ident, "'H' or 'Hhat'");
      p.expect(Tok::Equals, "'='");
      if (which.text == "H") {
        if (!e) fail_at(which, "fibration E must come before twist H");
        if (have_h) fail_at(which, "duplicate twist H");
        h = parse_model_sum(p, e);
        have_h = true;
      } else if (which.text == "Hhat") {
        if (!ehat) fail_at(which, "fibration Ehat must come before twist Hhat");
        if (have_hhat) fail_at(which, "duplicate twist Hhat");
        hhat = parse_model_sum(p, ehat);
        have_hhat = true;
      } else {
        fail_at(which, "twist must be 'H' or 'Hhat'");
      }
    } else if (p.accept_keyword("kernel")) {
      Token which = p.expect(Tok::Ident, "'F'");
      if (which.text != "F") fail_at(which, "kernel must be 'F'");
      if (!e || !ehat) fail_at(which, "both fibrations must come before the kernel");
      if (have_f) fail_at(which, "duplicate kernel F");
      p.expect(Tok::Equals, "'='");
      if (!corr_total) corr_total = make_correspondence(e, ehat).total;
      f = parse_model_sum(p, corr_total);
      have_f = true;
    } else if (p.accept_keyword("sections")) {
      if (!e) fail_at(p.peek(), "fibration E must come before sections");
      p.expect(Tok::LBrace, "'{' after sections");
      while (!p.accept(Tok::RBrace)) {
        Token n = p.expect(Tok::Ident, "a section name");
        p.expect(Tok::Equals, "'='");
        try {
          CliffordSection s = parse_section_sum(p, e);
          if (!sections.emplace(n.text, std::move(s)).second)
            fail_at(n, "duplicate section '" + n.text + "'");
        } catch (const Error& err) {
          if (std::string(err.what()).rfind("line ", 0) == 0) throw;
          fail_input("section '" + n.text + "': " + err.what());
        }
        if (p.peek().kind == Tok::End) fail_at(p.peek(), "unterminated sections block");
      }
    } else {
      fail_at(p.peek(), "unknown top-level entry");
    }
  }

  if (!base) fail_input("missing base block");
  if (!e) fail_input("missing fibration E");
  if (!ehat) fail_input("missing fibration Ehat");
  if (!have_h) fail_input("missing twist H");
  if (!have_hhat) fail_input("missing twist Hhat");
  if (!have_f) fail_input("missing kernel F");

  ParsedScenario out;
  try {
    out.scenario = make_scenario(name.text, e, ehat, std::move(h), std::move(hhat), std::move(f));
  } catch (const Error& err) {
    fail_input("scenario '" + name.text + "': " + err.what());
  }
  out.sections = std::move(sections);
  return out;
}

// ---------------------------------------------------------------------------
// JSON mirror: converted to the text format, then parsed through the one
// semantic path.

std::string json_to_text(const nlohmann::json& j) {
  std::ostringstream os;
  auto expr = [](const nlohmann::json& v) -> std::string { return v.get<std::string>(); };
  os << "scenario \"" << j.at("name").get<std::string>() << "\"\n\n";
  const auto& jb = j.at("base");
  os << "base {\n";
  os << "  basis";
  for (const auto& it : jb.at("basis"))
    os << ' ' << it.at(0).get<std::string>() << ':' << it.at(1).get<int>();
  os << "\n  unit " << jb.at("unit").get<std::string>() << "\n";
  if (jb.contains("products"))
    for (const auto& it : jb.at("products"))
      os << "  product " << it.at(0).get<std::string>() << '*' << it.at(1).get<std::string>()
         << " = " << expr(it.at(2)) << "\n";
  if (jb.contains("differential"))
    for (const auto& it : jb.at("differential"))
      os << "  d " << it.at(0).get<std::string>() << " = " << expr(it.at(1)) << "\n";
  if (jb.contains("contractions"))
    for (const auto& c : jb.at("contractions"))
      for (const auto& im : c.at("images"))
        os << "  contraction " << c.at("name").get<std::string>() << ' '
           << im.at(0).get<std::string>() << " = " << expr(im.at(1)) << "\n";
  os << "}\n\n";
  for (const char* side : {"E", "Ehat"}) {
    os << "fibration " << side << " {\n";
    for (const auto& g : j.at(side))
      os << "  gen " << g.at(0).get<std::string>() << ':' << g.at(1).get<int>() << " = "
         << expr(g.at(2)) << "\n";
    os << "}\n\n";
  }
  os << "twist H = " << expr(j.at("H")) << "\n";
  os << "twist Hhat = " << expr(j.at("Hhat")) << "\n";
  os << "kernel F = " << expr(j.at("F")) << "\n";
  if (j.contains("sections") && !j.at("sections").empty()) {
    os << "\nsections {\n";
    for (const auto& s : j.at("sections"))
      os << "  " << s.at(0).get<std::string>() << " = " << expr(s.at(1)) << "\n";
    os << "}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Rendering

struct TermWriter {
  std::ostringstream os;
  bool first = true;

  void add(const Scalar& coeff, const std::string& body) {
    Scalar mag = coeff < 0 ? Scalar(-coeff) : coeff;
    bool neg = coeff < 0;
    if (first) {
      if (neg) os << '-';
      first = false;
    } else {
      os << (neg ? " - " : " + ");
    }
    if (body.empty()) {
      os << scalar_to_string(mag);
    } else {
      if (!(mag == 1)) os << scalar_to_string(mag) << " * ";
      os << body;
    }
  }

  std::string str() const { return first ? std::string("0") : os.str(); }
};

std::string base_term_body(const CDGAPtr& base, int idx) {
  if (idx == base->unit) return std::string();
  return base->labels[std::size_t(idx)];
}

}  // namespace

std::string render_base_expression(const BaseElement& x) {
  TermWriter w;
  if (!x.is_zero())
    for (const auto& [i, c] : x.terms()) w.add(c, base_term_body(x.algebra(), i));
  return w.str();
}

std::string render_model_expression(const TCElement& x) {
  TermWriter w;
  if (!x.is_zero()) {
    const ModelPtr& m = x.model();
    for (const auto& [mask, a] : x.components()) {
      std::string word;
      for (int j = 0; j < m->n(); ++j)
        if (mask >> j & 1) {
          if (!word.empty()) word += '^';
          word += m->gens[std::size_t(j)].label;
        }
      for (const auto& [i, c] : a.terms()) {
        std::string body = word;
        if (i != m->base->unit) {
          std::string bl = m->base->labels[std::size_t(i)];
          body = word.empty() ? bl : word + " (x) " + bl;
        }
        w.add(c, body);
      }
    }
  }
  return w.str();
}

std::string render_section_expression(const CliffordSection& v) {
  bool has_vec = false;
  for (const Scalar& c : v.vector_part)
    if (!is_zero(c)) has_vec = true;
  bool has_cl = !v.clifford_part.is_zero();
  if (!has_vec && !has_cl) return "0";
  std::ostringstream os;
  if (has_vec) {
    TermWriter w;
    for (std::size_t k = 0; k < v.vector_part.size(); ++k)
      if (!is_zero(v.vector_part[k]))
        w.add(v.vector_part[k], v.model->base->contractions[k].name);
    os << "X: " << w.str();
  }
  if (has_cl) {
    if (has_vec) os << " ; ";
    TermWriter w;
    for (const auto& [ab, coeff] : word_decomposition(v.clifford_part)) {
      std::string word;
      for (int j = 0; j < v.model->n(); ++j)
        if (ab.first >> j & 1) {
          if (!word.empty()) word += '^';
          word += "psi[" + std::to_string(j + 1) + "]";
        }
      for (int j = 0; j < v.model->n(); ++j)
        if (ab.second >> j & 1) {
          if (!word.empty()) word += '^';
          word += "dpsi[" + std::to_string(j + 1) + "]";
        }
      for (const auto& [i, c] : coeff.terms()) {
        std::string body = word;
        if (i != v.model->base->unit) {
          std::string bl = v.model->base->labels[std::size_t(i)];
          body = word.empty() ? bl : word + " (x) " + bl;
        }
        w.add(c, body);
      }
    }
    os << "C: " << w.str();
  }
  return os.str();
}

namespace {

void render_base_block(std::ostringstream& os, const CDGAPtr& base) {
  os << "base {\n";
  os << "  basis";
  for (int i = 0; i < base->dim(); ++i)
    os << ' ' << base->labels[std::size_t(i)] << ':' << base->degrees[std::size_t(i)];
  os << "\n  unit " << base->labels[std::size_t(base->unit)] << "\n";
  for (int i = 0; i < base->dim(); ++i) {
    if (i == base->unit) continue;
    for (int j = i; j < base->dim(); ++j) {
      if (j == base->unit) continue;
      const SparseVec& prod = base->products[std::size_t(i)][std::size_t(j)];
      if (prod.empty()) continue;
      BaseElement v(base);
      for (const auto& [k, c] : prod) v.add_term(k, c);
      os << "  product " << base->labels[std::size_t(i)] << '*' << base->labels[std::size_t(j)]
         << " = " << render_base_expression(v) << "\n";
    }
  }
  for (int i = 0; i < base->dim(); ++i) {
    const SparseVec& d = base->differential[std::size_t(i)];
    if (d.empty()) continue;
    BaseElement v(base);
    for (const auto& [k, c] : d) v.add_term(k, c);
    os << "  d " << base->labels[std::size_t(i)] << " = " << render_base_expression(v) << "\n";
  }
  for (const auto& c : base->contractions)
    for (int i = 0; i < base->dim(); ++i) {
      const SparseVec& im = c.images[std::size_t(i)];
      if (im.empty()) continue;
      BaseElement v(base);
      for (const auto& [k, cc] : im) v.add_term(k, cc);
      os << "  contraction " << c.name << ' ' << base->labels[std::size_t(i)] << " = "
         << render_base_expression(v) << "\n";
    }
  os << "}\n";
}

void render_fibration_block(std::ostringstream& os, const char* which, const ModelPtr& m) {
  os << "fibration " << which << " {\n";
  for (const OddGenerator& g : m->gens)
    os << "  gen " << g.label << ':' << g.degree << " = "
       << render_base_expression(g.transgression) << "\n";
  os << "}\n";
}

}  // namespace

std::string render_scenario(const ParsedScenario& s) {
  std::ostringstream os;
  os << "scenario \"" << s.scenario.name << "\"\n\n";
  render_base_block(os, s.scenario.e->base);
  os << "\n";
  render_fibration_block(os, "E", s.scenario.e);
  os << "\n";
  render_fibration_block(os, "Ehat", s.scenario.ehat);
  os << "\n";
  os << "twist H = " << render_model_expression(s.scenario.h) << "\n";
  os << "twist Hhat = " << render_model_expression(s.scenario.hhat) << "\n";
  os << "kernel F = " << render_model_expression(s.scenario.f) << "\n";
  if (!s.sections.empty()) {
    os << "\nsections {\n";
    for (const auto& [name, sec] : s.sections)
      os << "  " << name << " = " << render_section_expression(sec) << "\n";
    os << "}\n";
  }
  return os.str();
}

std::string render_scenario_json(const ParsedScenario& s) {
  nlohmann::json j;
  j["name"] = s.scenario.name;
  const CDGAPtr& base = s.scenario.e->base;
  nlohmann::json jb;
  jb["basis"] = nlohmann::json::array();
  for (int i = 0; i < base->dim(); ++i)
    jb["basis"].push_back({base->labels[std::size_t(i)], base->degrees[std::size_t(i)]});
  jb["unit"] = base->labels[std::size_t(base->unit)];
  jb["products"] = nlohmann::json::array();
  for (int i = 0; i < base->dim(); ++i) {
    if (i == base->unit) continue;
    for (int j2 = i; j2 < base->dim(); ++j2) {
      if (j2 == base->unit) continue;
      const SparseVec& prod = base->products[std::size_t(i)][std::size_t(j2)];
      if (prod.empty()) continue;
      BaseElement v(base);
      for (const auto& [k, c] : prod) v.add_term(k, c);
      jb["products"].push_back({base->labels[std::size_t(i)], base->labels[std::size_t(j2)],
                                render_base_expression(v)});
    }
  }
  jb["differential"] = nlohmann::json::array();
  for (int i = 0; i < base->dim(); ++i) {
    const SparseVec& d = base->differential[std::size_t(i)];
    if (d.empty()) continue;
    BaseElement v(base);
    for (const auto& [k, c] : d) v.add_term(k, c);
    jb["differential"].push_back({base->labels[std::size_t(i)], render_base_expression(v)});
  }
  jb["contractions"] = nlohmann::json::array();
  for (const auto& c : base->contractions) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["images"] = nlohmann::json::array();
    for (int i = 0; i < base->dim(); ++i) {
      const SparseVec& im = c.images[std::size_t(i)];
      if (im.empty()) continue;
      BaseElement v(base);
      for (const auto& [k, cc] : im) v.add_term(k, cc);
      jc["images"].push_back({base->labels[std::size_t(i)], render_base_expression(v)});
    }
    jb["contractions"].push_back(std::move(jc));
  }
  j["base"] = std::move(jb);
  for (const char* side : {"E", "Ehat"}) {
    const ModelPtr& m = side[1] == '\0' ? s.scenario.e : s.scenario.ehat;
    j[side] = nlohmann::json::array();
    for (const OddGenerator& g : m->gens)
      j[side].push_back({g.label, g.degree, render_base_expression(g.transgression)});
  }
  j["H"] = render_model_expression(s.scenario.h);
  j["Hhat"] = render_model_expression(s.scenario.hhat);
  j["F"] = render_model_expression(s.scenario.f);
  if (!s.sections.empty()) {
    j["sections"] = nlohmann::json::array();
    for (const auto& [name, sec] : s.sections)
      j["sections"].push_back({name, render_section_expression(sec)});
  }
  return j.dump(2) + "\n";
}

ParsedScenario parse_scenario(const std::string& text) {
  std::size_t i = text.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text[i] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail_input(std::string("invalid JSON scenario: ") + e.what());
    }
    try {
      return parse_text_scenario(json_to_text(j));
    } catch (const nlohmann::json::exception& e) {
      fail_input(std::string("invalid JSON scenario: ") + e.what());
    }
  }
  return parse_text_scenario(text);
}

BaseElement parse_base_expression(const std::string& text, const CDGAPtr& base) {
  Parser p(text);
  BaseElement out = parse_base_sum(p, base);
  expect_end(p);
  return out;
}

TCElement parse_model_expression(const std::string& text, const ModelPtr& m) {
  Parser p(text);
  TCElement out = parse_model_sum(p, m);
  expect_end(p);
  return out;
}

CliffordSection parse_section_expression(const std::string& text, const ModelPtr& m) {
  Parser p(text);
  CliffordSection out = parse_section_sum(p, m);
  expect_end(p);
  return out;
}

std::map<std::string, CliffordSection> parse_sections_file(const std::string& text,
                                                           const ModelPtr& m) {
  Parser p(text);
  p.expect_keyword("sections");
  p.expect(Tok::LBrace, "'{' after sections");
  std::map<std::string, CliffordSection> out;
  while (!p.accept(Tok::RBrace)) {
    Token n = p.expect(Tok::Ident, "a section name");
    p.expect(Tok::Equals, "'='");
    CliffordSection s = parse_section_sum(p, m);
    if (!out.emplace(n.text, std::move(s)).second) fail_at(n, "duplicate section '" + n.text + "'");
    if (p.peek().kind == Tok::End) fail_at(p.peek(), "unterminated sections block");
  }
  expect_end(p);
  return out;
}

// ---------------------------------------------------------------------------
// Recipes

DualityScenario run_recipe(const std::string& text) {
  Parser p(text);
  p.expect_keyword("recipe");
  Token kind = p.expect(Tok::Ident, "a recipe kind");

  CDGAPtr base;
  ModelPtr e;
  bool have_h = false;
  TCElement h;
  bool have_euler = false;
  BaseElement euler_hat;
  std::vector<Scalar> lambda;
  bool have_lambda = false;
  int k = -1;
  std::vector<BaseElement> extra_chern, chern, chern_hat, h_list;
  bool have_extra = false, have_chern = false, have_chern_hat = false, have_h_list = false;
  BaseElement h_base;
  bool have_h_base = false;

  auto need_base = [&](const Token& where) {
    if (!base) fail_at(where, "the base block must come first");
  };
  auto parse_expr_list = [&](std::vector<BaseElement>& out) {
    do {
      out.push_back(parse_base_sum(p, base));
    } while (p.accept(Tok::Semi));
  };

  while (p.peek().kind != Tok::End) {
    Token t = p.peek();
    if (p.accept_keyword("base")) {
      if (base) fail_at(t, "duplicate base block");
      base = parse_base_block(p);
    } else if (p.accept_keyword("fibration")) {
      Token which = p.expect(Tok::Ident, "'E'");
      if (which.text != "E") fail_at(which, "recipes only take a fibration E");
      need_base(which);
      if (e) fail_at(which, "duplicate fibration E");
      e = parse_fibration_block(p, base, "E");
    } else if (p.accept_keyword("twist")) {
      Token which = p.expect(Tok::Ident, "'H'");
      if (which.text != "H") fail_at(which, "recipes only take a twist H");
      if (!e) fail_at(which, "fibration E must come before twist H");
      p.expect(Tok::Equals, "'='");
      h = parse_model_sum(p, e);
      have_h = true;
    } else if (p.accept_keyword("euler_hat")) {
      need_base(t);
      p.expect(Tok::Equals, "'='");
      euler_hat = parse_base_sum(p, base);
      have_euler = true;
    } else if (p.accept_keyword("lambda")) {
      p.expect(Tok::Equals, "'='");
      do {
        int sign = 1;
        if (p.accept(Tok::Minus)) sign = -1;
        else p.accept(Tok::Plus);
        lambda.push_back(sign * parse_rational(p));
      } while (p.accept(Tok::Comma));
      have_lambda = true;
    } else if (p.accept_keyword("k")) {
      p.expect(Tok::Equals, "'='");
      k = parse_int(p, "an integer");
    } else if (p.accept_keyword("extra_chern")) {
      need_base(t);
      p.expect(Tok::Equals, "'='");
      parse_expr_list(extra_chern);
      have_extra = true;
    } else if (p.accept_keyword("chern")) {
      need_base(t);
      p.expect(Tok::Equals, "'='");
      parse_expr_list(chern);
      have_chern = true;
    } else if (p.accept_keyword("chern_hat")) {
      need_base(t);
      p.expect(Tok::Equals, "'='");
      parse_expr_list(chern_hat);
      have_chern_hat = true;
    } else if (p.accept_keyword("h")) {
      need_base(t);
      p.expect(Tok::Equals, "'='");
      h_base = parse_base_sum(p, base);
      have_h_base = true;
    } else if (p.accept_keyword("h_list")) {
      need_base(t);
      p.expect(Tok::Equals, "'='");
      parse_expr_list(h_list);
      have_h_list = true;
    } else {
      fail_at(t, "unknown recipe entry");
    }
  }

  if (!base) fail_input("recipe needs a base block");
  auto require = [&](bool have, const char* what) {
    if (!have) fail_input(std::string("recipe '") + kind.text + "' needs " + what);
  };

  if (kind.text == "sphere") {
    require(bool(e), "a fibration E");
    require(have_h, "a twist H");
    require(have_euler, "euler_hat");
    return construct_sphere_dual(e, h, euler_hat);
  }
  if (kind.text == "frame1") {
    require(bool(e), "a fibration E");
    require(have_h, "a twist H");
    require(have_lambda, "lambda");
    return construct_frame_dual_I(e, h, lambda);
  }
  if (kind.text == "frame2") {
    require(bool(e), "a fibration E");
    require(have_h, "a twist H");
    require(have_lambda, "lambda");
    require(k >= 0, "k");
    if (!have_extra) extra_chern.assign(std::size_t(std::max(k, 0)), BaseElement(base));
    return construct_frame_dual_II(e, h, k, lambda, extra_chern);
  }
  if (kind.text == "relation") {
    require(have_chern, "chern");
    require(have_chern_hat, "chern_hat");
    require(have_lambda, "lambda");
    require(k >= 0, "k");
    if (!have_h_base) h_base = BaseElement(base);
    return construct_from_relation(base, chern, chern_hat, lambda, k, h_base);
  }
  if (kind.text == "multidegree") {
    require(have_chern, "chern");
    require(have_chern_hat, "chern_hat");
    require(k >= 0, "k");
    if (!have_h_list) h_list.assign(std::size_t(std::max(k, 0)), BaseElement(base));
    return construct_multidegree_frame_dual(base, chern, chern_hat, k, h_list);
  }
  fail_input("unknown recipe '" + kind.text + "'");
}

}  // namespace tgd
