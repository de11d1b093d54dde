#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgv/ints.hpp"

namespace pgv {

struct GeneratorSymbol {
  std::string name;
  int index = 0;  // position in declaration order
};

// Word in a free group: freely reduced sequence of (generator, exponent)
// letters, adjacent letters on distinct generators, exponents nonzero.
struct FreeWord {
  std::vector<std::pair<int, Int>> letters;

  bool empty() const { return letters.empty(); }
  bool operator==(const FreeWord& o) const { return letters == o.letters; }

  static FreeWord gen(int i, Int e = 1) {
    FreeWord w;
    if (e != 0) w.letters.emplace_back(i, std::move(e));
    return w;
  }
};

FreeWord free_reduce(const FreeWord& w);
FreeWord concat(const FreeWord& a, const FreeWord& b);  // reduced product
FreeWord inverse(const FreeWord& w);
FreeWord word_pow(const FreeWord& w, const Int& n);
// v^-1 u v
FreeWord conjugate(const FreeWord& u, const FreeWord& v);
// left-normed [u, v] = u^-1 v^-1 u v; [u,v,w] = [[u,v],w]
FreeWord commutator(const FreeWord& u, const FreeWord& v);
FreeWord left_normed_commutator(const std::vector<FreeWord>& parts);

// Image of w under gen -> interp[gen], using the target's group operations.
// Ops needs: id(), mul(a,b), inv(a); exponents use binary powering.
template <class Ops, class Elem = decltype(std::declval<Ops>().id())>
Elem evaluate_word(const FreeWord& w, const std::vector<Elem>& interp,
                   const Ops& ops) {
  Elem acc = ops.id();
  for (const auto& [g, e] : w.letters) {
    if (g < 0 || g >= (int)interp.size())
      throw std::out_of_range("evaluate_word: generator without binding");
    Elem base = e < 0 ? ops.inv(interp[g]) : interp[g];
    Int n = abs(e);
    // binary powering over mul
    Elem pw = ops.id();
    Elem sq = base;
    size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (size_t b = 0; b < bits; b++) {
      if (mpz_tstbit(n.get_mpz_t(), b)) pw = ops.mul(pw, sq);
      if (b + 1 < bits) sq = ops.mul(sq, sq);
    }
    acc = ops.mul(acc, pw);
  }
  return acc;
}

struct PresentationMeta {
  std::optional<Int> order;
  std::optional<int> nilpotency_class;
  std::optional<Int> exponent;
};

struct FinitePresentation {
  std::string name;
  long prime = 3;
  std::vector<GeneratorSymbol> generators;
  std::vector<FreeWord> relators;
  PresentationMeta expect;

  int gen_index(const std::string& nm) const {
    for (const auto& g : generators)
      if (g.name == nm) return g.index;
    return -1;
  }
};

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(const std::string& msg, int ln, int col)
      : std::runtime_error(msg + " (line " + std::to_string(ln) + ", column " +
                           std::to_string(col) + ")"),
        line(ln),
        column(col) {}
};

FinitePresentation parse_presentation(const std::string& text);
std::string print_presentation(const FinitePresentation& p);
std::string word_str(const FreeWord& w, const std::vector<GeneratorSymbol>& gens);

}  // namespace pgv
