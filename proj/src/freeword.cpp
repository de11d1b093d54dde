#include "pgv/freeword.hpp"

#include <cctype>
#include <sstream>

namespace pgv {

FreeWord free_reduce(const FreeWord& w) {
  FreeWord r;
  for (const auto& [g, e] : w.letters) {
    if (e == 0) continue;
    if (!r.letters.empty() && r.letters.back().first == g) {
      r.letters.back().second += e;
      if (r.letters.back().second == 0) r.letters.pop_back();
    } else {
      r.letters.emplace_back(g, e);
    }
  }
  return r;
}

FreeWord concat(const FreeWord& a, const FreeWord& b) {
  FreeWord r = a;
  for (const auto& l : b.letters) r.letters.push_back(l);
  return free_reduce(r);
}

FreeWord inverse(const FreeWord& w) {
  FreeWord r;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    r.letters.emplace_back(it->first, -it->second);
  return r;
}

FreeWord word_pow(const FreeWord& w, const Int& n) {
  if (n == 0) return {};
  FreeWord base = n < 0 ? inverse(w) : w;
  Int k = abs(n);
  // cyclic reduction would be fancier; plain repetition suffices here
  if (base.letters.size() == 1) {
    FreeWord r = base;
    r.letters[0].second *= k;
    return r;
  }
  FreeWord r;
  for (Int i = 0; i < k; ++i) r = concat(r, base);
  return r;
}

FreeWord conjugate(const FreeWord& u, const FreeWord& v) {
  return concat(concat(inverse(v), u), v);
}

FreeWord commutator(const FreeWord& u, const FreeWord& v) {
  return concat(concat(inverse(u), inverse(v)), concat(u, v));
}

FreeWord left_normed_commutator(const std::vector<FreeWord>& parts) {
  if (parts.size() < 2)
    throw std::invalid_argument("left_normed_commutator: need >= 2 entries");
  FreeWord acc = commutator(parts[0], parts[1]);
  for (size_t i = 2; i < parts.size(); i++) acc = commutator(acc, parts[i]);
  return acc;
}

// ---- parser ----------------------------------------------------------------

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& text) : s(text) {}

  int peek() const { return pos < s.size() ? (unsigned char)s[pos] : -1; }
  int get() {
    if (pos >= s.size()) return -1;
    int c = (unsigned char)s[pos++];
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    return c;
  }
  void skip_space_not_newline() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r'))
      get();
  }
};

struct WordParser {
  Lexer& lx;
  const FinitePresentation& pres;

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, lx.line, lx.col);
  }

  void skip() { lx.skip_space_not_newline(); }

  bool at_word_end() {
    skip();
    int c = lx.peek();
    return c == -1 || c == '\n' || c == ',' || c == ']' || c == ')' || c == '=';
  }

  Int parse_int() {
    skip();
    bool neg = false;
    if (lx.peek() == '-') {
      lx.get();
      neg = true;
    }
    if (!isdigit(lx.peek())) fail("expected integer");
    std::string digits;
    while (isdigit(lx.peek())) digits += (char)lx.get();
    Int v(digits);
    return neg ? Int(-v) : v;
  }

  FreeWord parse_atom() {
    skip();
    int c = lx.peek();
    if (c == '(') {
      lx.get();
      FreeWord w = parse_word();
      skip();
      if (lx.peek() != ')') fail("expected ')'");
      lx.get();
      return w;
    }
    if (c == '[') {
      lx.get();
      std::vector<FreeWord> parts;
      parts.push_back(parse_word());
      skip();
      while (lx.peek() == ',') {
        lx.get();
        parts.push_back(parse_word());
        skip();
      }
      if (lx.peek() != ']') fail("expected ']' to close commutator");
      lx.get();
      if (parts.size() < 2) fail("commutator needs at least two entries");
      return left_normed_commutator(parts);
    }
    if (isalpha(c) || c == '_') {
      std::string id;
      while (isalnum(lx.peek()) || lx.peek() == '_' || lx.peek() == '.')
        id += (char)lx.get();
      int gi = pres.gen_index(id);
      if (gi < 0) fail("undeclared generator '" + id + "'");
      return FreeWord::gen(gi);
    }
    fail("expected generator, '(' or '['");
  }

  // factor := atom ('^' (integer | atom))*
  FreeWord parse_factor() {
    FreeWord base = parse_atom();
    for (;;) {
      skip();
      if (lx.peek() != '^') return base;
      lx.get();
      skip();
      int c = lx.peek();
      if (c == '-' || isdigit(c)) {
        base = word_pow(base, parse_int());
      } else {
        FreeWord by = parse_atom();
        base = conjugate(base, by);
      }
    }
  }

  // word := factor factor ...   (juxtaposition, optional '*')
  FreeWord parse_word() {
    FreeWord acc;
    bool first = true;
    for (;;) {
      skip();
      if (lx.peek() == '*') {
        lx.get();
        skip();
      }
      if (at_word_end()) {
        if (first) return acc;  // empty word = identity
        return acc;
      }
      acc = concat(acc, parse_factor());
      first = false;
    }
  }

  // relation := word ('=' word)?   stored as u v^-1
  FreeWord parse_relation() {
    FreeWord u = parse_word();
    skip();
    if (lx.peek() == '=') {
      lx.get();
      FreeWord v = parse_word();
      return concat(u, inverse(v));
    }
    return u;
  }
};

std::string read_identifier(Lexer& lx) {
  lx.skip_space_not_newline();
  std::string id;
  while (isalnum(lx.peek()) || lx.peek() == '_' || lx.peek() == '.')
    id += (char)lx.get();
  return id;
}

}  // namespace

FinitePresentation parse_presentation(const std::string& text) {
  FinitePresentation p;
  Lexer lx(text);
  bool saw_prime = false;
  while (lx.peek() != -1) {
    lx.skip_space_not_newline();
    if (lx.peek() == '\n') {
      lx.get();
      continue;
    }
    if (lx.peek() == '#') {  // comment to end of line
      while (lx.peek() != -1 && lx.peek() != '\n') lx.get();
      continue;
    }
    int kw_line = lx.line, kw_col = lx.col;
    std::string kw = read_identifier(lx);
    if (kw == "group") {
      lx.skip_space_not_newline();
      if (lx.peek() == '"') {
        lx.get();
        std::string nm;
        while (lx.peek() != -1 && lx.peek() != '"' && lx.peek() != '\n')
          nm += (char)lx.get();
        if (lx.peek() != '"') throw ParseError("unterminated name", lx.line, lx.col);
        lx.get();
        p.name = nm;
      } else {
        p.name = read_identifier(lx);
      }
    } else if (kw == "prime") {
      lx.skip_space_not_newline();
      std::string digits;
      while (isdigit(lx.peek())) digits += (char)lx.get();
      if (digits.empty()) throw ParseError("expected prime", lx.line, lx.col);
      long pr = std::stol(digits);
      if (pr == 2)
        throw ParseError("prime 2 is not supported: the toolkit handles odd primes only",
                         kw_line, kw_col);
      if (!is_odd_prime(pr))
        throw ParseError("'" + digits + "' is not an odd prime", kw_line, kw_col);
      p.prime = pr;
      saw_prime = true;
    } else if (kw == "generators") {
      for (;;) {
        lx.skip_space_not_newline();
        if (lx.peek() == ',') {
          lx.get();
          continue;
        }
        if (!isalpha(lx.peek()) && lx.peek() != '_') break;
        std::string id = read_identifier(lx);
        if (p.gen_index(id) >= 0)
          throw ParseError("duplicate generator '" + id + "'", lx.line, lx.col);
        p.generators.push_back({id, (int)p.generators.size()});
      }
    } else if (kw == "relators") {
      WordParser wp{lx, p};
      for (;;) {
        lx.skip_space_not_newline();
        if (lx.peek() == -1 || lx.peek() == '\n') break;
        p.relators.push_back(free_reduce(wp.parse_relation()));
        lx.skip_space_not_newline();
        if (lx.peek() == ',') {
          lx.get();
          continue;
        }
        break;
      }
    } else if (kw == "expect") {
      for (;;) {
        lx.skip_space_not_newline();
        if (!isalpha(lx.peek())) break;
        std::string key = read_identifier(lx);
        lx.skip_space_not_newline();
        if (lx.peek() != '=') throw ParseError("expected '=' after " + key, lx.line, lx.col);
        lx.get();
        lx.skip_space_not_newline();
        std::string digits;
        while (isdigit(lx.peek())) digits += (char)lx.get();
        if (digits.empty()) throw ParseError("expected value for " + key, lx.line, lx.col);
        if (key == "order")
          p.expect.order = Int(digits);
        else if (key == "class")
          p.expect.nilpotency_class = std::stoi(digits);
        else if (key == "exponent")
          p.expect.exponent = Int(digits);
        else
          throw ParseError("unknown expectation '" + key + "'", lx.line, lx.col);
      }
    } else if (kw.empty()) {
      throw ParseError("unexpected character", lx.line, lx.col);
    } else {
      throw ParseError("unknown keyword '" + kw + "'", kw_line, kw_col);
    }
  }
  if (!saw_prime) p.prime = 3;
  return p;
}

std::string word_str(const FreeWord& w, const std::vector<GeneratorSymbol>& gens) {
  if (w.letters.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [g, e] : w.letters) {
    if (!first) os << "*";
    first = false;
    os << gens.at(g).name;
    if (e != 1) os << "^" << e.get_str();
  }
  return os.str();
}

std::string print_presentation(const FinitePresentation& p) {
  std::ostringstream os;
  os << "group \"" << p.name << "\"\n";
  os << "prime " << p.prime << "\n";
  os << "generators";
  for (const auto& g : p.generators) os << " " << g.name;
  os << "\n";
  for (const auto& r : p.relators) os << "relators " << word_str(r, p.generators) << "\n";
  if (p.expect.order) os << "expect order=" << p.expect.order->get_str() << "\n";
  if (p.expect.nilpotency_class)
    os << "expect class=" << *p.expect.nilpotency_class << "\n";
  if (p.expect.exponent) os << "expect exponent=" << p.expect.exponent->get_str() << "\n";
  return os.str();
}

}  // namespace pgv
