#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgv/ints.hpp"

namespace pgv {

// Dense matrix of unbounded integers, row-major.
struct IntMat {
  int rows = 0, cols = 0;
  std::vector<Int> a;

  IntMat() = default;
  IntMat(int r, int c) : rows(r), cols(c), a((size_t)r * c) {}

  Int& at(int i, int j) { return a[(size_t)i * cols + j]; }
  const Int& at(int i, int j) const { return a[(size_t)i * cols + j]; }

  static IntMat identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; i++) m.at(i, i) = 1;
    return m;
  }

  bool operator==(const IntMat& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }

  IntMat mul(const IntMat& o) const;
  IntMat transpose() const;
  std::string str() const;
};

// P*A*Q = D, D diagonal with divisibility chain d1 | d2 | ... ; P, Q
// unimodular (products of elementary operations).
struct SnfResult {
  IntMat d;
  IntMat p, q;  // empty unless requested
  int rank = 0;
  std::vector<Int> divisors;  // nonzero diagonal entries, in chain order
};

struct SnfOptions {
  bool want_p = false;
  bool want_q = false;
  bool verify = false;  // recompute P*A*Q and check the chain
};

SnfResult smith_normal_form(const IntMat& a, SnfOptions opt = {});

// Row Hermite form: echelon rows with positive pivots, entries above a pivot
// reduced into [0, pivot). Zero rows dropped.
struct HnfResult {
  IntMat h;
  std::vector<int> pivot_col;  // one per row of h, strictly increasing
};

HnfResult hermite_normal_form(const IntMat& a);

// Invariant factors of a finitely generated abelian group:
// Z^free_rank + sum Z/torsion[i], torsion[i] >= 2 and d1 | d2 | ...
struct AbelianInvariants {
  std::vector<Int> torsion;
  int free_rank = 0;

  bool operator==(const AbelianInvariants& o) const {
    return torsion == o.torsion && free_rank == o.free_rank;
  }
  bool finite() const { return free_rank == 0; }
  Int order() const {  // 0 when infinite
    if (free_rank > 0) return 0;
    Int n = 1;
    for (const Int& t : torsion) n *= t;
    return n;
  }
  Int exponent() const { return torsion.empty() ? Int(1) : torsion.back(); }
  std::string str() const;
};

// Invariants of Z^n / rowspace(relations); relations has n columns.
AbelianInvariants abelian_invariants(const IntMat& relations, int n);

// Solve A x = b where row i is read modulo moduli[i] (0 means exact over Z).
// On success gives one particular solution plus a spanning set for the
// homogeneous solutions.
struct IntSolveResult {
  bool solvable = false;
  std::vector<Int> particular;
  std::vector<std::vector<Int>> homogeneous;
};

IntSolveResult solve_integer_system(const IntMat& a, const std::vector<Int>& b,
                                    const std::vector<Int>& moduli);

// ---- sparse exact lattices -------------------------------------------------

// Sorted (index, coefficient) pairs, coefficients nonzero.
using SparseVec = std::vector<std::pair<int, Int>>;

SparseVec sparse_axpy(const SparseVec& x, const Int& c, const SparseVec& y);

// Incremental integer row echelon of a lattice in Z^dim, keyed by lead index.
// Exact over Z; used for large sparse lattices (boundary matrices, tail
// systems) before any dense step.
class SparseEchelon {
 public:
  explicit SparseEchelon(int dim) : dim_(dim) {}

  void add(SparseVec v);
  int rank() const { return (int)rows_.size(); }
  int dim() const { return dim_; }
  const std::map<int, SparseVec>& rows() const { return rows_; }

  // Dense matrix of the echelon rows (rank x dim).
  IntMat to_dense() const;

  // Invariants of Z^dim / lattice. Unit pivots are eliminated sparsely;
  // the small remaining block goes through dense SNF.
  AbelianInvariants quotient_invariants() const;

 private:
  int dim_;
  std::map<int, SparseVec> rows_;  // lead index -> row, lead coeff > 0
};

// Rank over the field Z/(2^61-1); lower bound on the rational rank, used to
// cross-check sparse eliminations on large matrices.
int modular_rank(const std::vector<SparseVec>& rows, int dim);

}  // namespace pgv
