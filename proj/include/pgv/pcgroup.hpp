#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgv/freeword.hpp"
#include "pgv/intmat.hpp"
#include "pgv/ints.hpp"

namespace pgv {

using PcVec = std::vector<Int>;  // exponent vector over the pc generators

// Weighted polycyclic presentation. Generator i has weight weights[i]
// (nondecreasing) and relative order orders[i] (0 = infinite). For finite
// orders, g_i^{m_i} equals the word encoded by power_tails[i] (support > i).
// For i < j, g_j^{g_i} = g_j * conj_tails[i][j] (support > j; empty vector
// means the generators commute).
struct PcPresentation {
  std::string name;
  long prime = 3;
  std::vector<std::string> gen_names;
  std::vector<int> weights;
  std::vector<Int> orders;
  std::vector<PcVec> power_tails;
  std::vector<std::vector<PcVec>> conj_tails;

  int count() const { return (int)orders.size(); }
  void validate() const;  // throws std::invalid_argument on structural faults
  bool all_finite() const;
  Int order() const;  // 0 when some generator has infinite order
  int hirsch_length() const;
  int max_weight() const;

  // finite order and power tail supported on torsion-certified generators
  std::vector<bool> torsion_certified() const;

  std::string format() const;
  static PcPresentation parse(const std::string& text);
};

std::string pc_element_str(const PcPresentation& pc, const PcVec& v);

// ---- collection ------------------------------------------------------------

using SparseZ = std::vector<std::pair<int, Int>>;

void sz_axpy(SparseZ& x, const Int& c, const SparseZ& y);  // x += c*y
void sz_add_unit(SparseZ& x, int idx, const Int& c);

// Relations that carry central tail unknowns (nilpotent quotient rounds).
struct TailTable {
  int count = 0;
  std::vector<int> pow_tid;               // per generator, -1 = none
  std::vector<std::vector<int>> conj_tid; // [i][j] for i<j, -1 = none
};

// Element of the (optionally centrally extended) group: collected exponent
// vector plus the abelian tail bookkeeping.
struct PcExt {
  PcVec v;
  SparseZ t;
  bool operator==(const PcExt& o) const { return v == o.v && t == o.t; }
};

// Collection context. All operations are value-semantic and reentrant.
class PcCtx {
 public:
  explicit PcCtx(const PcPresentation& p, const TailTable* tt = nullptr)
      : pc(p), tails(tt) {}

  const PcPresentation& pc;
  const TailTable* tails;

  PcExt identity() const { return PcExt{PcVec(pc.count()), {}}; }
  PcExt gen(int i) const;
  bool is_identity(const PcExt& x) const;

  // x := x * g_i^e, collected from the left
  void mul_genpow(PcExt& x, int i, Int e) const;
  PcExt mul(PcExt x, const PcExt& y) const;
  PcExt invert(const PcExt& x) const;
  PcExt power(const PcExt& x, const Int& n) const;
  PcExt conj_elem(const PcExt& x, const PcExt& y) const;  // y^-1 x y
  PcExt comm(const PcExt& x, const PcExt& y) const;       // x^-1 y^-1 x y
  PcExt collect_letters(const std::vector<std::pair<int, Int>>& letters) const;
  PcExt from_vec(PcVec v) const;  // collect arbitrary exponent vector

 private:
  PcExt conj_once(const PcExt& w, int i) const;      // w^{g_i}, support(w) > i
  PcExt conj_inv_once(const PcExt& w, int i) const;  // w^{g_i^-1}
  PcExt conj_power(PcExt w, int i, const Int& e) const;
  void bump(PcExt& x, int i, const Int& e) const;
};

// plain-element conveniences
PcVec pc_mul(const PcPresentation& pc, const PcVec& x, const PcVec& y);
PcVec pc_inv(const PcPresentation& pc, const PcVec& x);
PcVec pc_pow(const PcPresentation& pc, const PcVec& x, const Int& n);
PcVec pc_conj(const PcPresentation& pc, const PcVec& x, const PcVec& y);
PcVec pc_comm(const PcPresentation& pc, const PcVec& x, const PcVec& y);
bool pc_is_id(const PcVec& x);

// group ops adapter for evaluate_word
struct PcOps {
  const PcPresentation& pc;
  PcVec id() const { return PcVec(pc.count()); }
  PcVec mul(const PcVec& a, const PcVec& b) const { return pc_mul(pc, a, b); }
  PcVec inv(const PcVec& a) const { return pc_inv(pc, a); }
};

// Least p-power k with x^k = 1; returns 0 for infinite order (free support).
Int element_order(const PcPresentation& pc, const PcVec& x);

struct ConsistencyReport {
  bool pass = true;
  std::string witness;  // human-readable description of the failing overlap
};

// Overlap-based consistency test (associativity and power overlaps).
ConsistencyReport is_consistent(const PcPresentation& pc);

// Run fn(label, lhs, rhs) for every overlap instance. With a tail-tracking
// context the tail difference of the two sides is the consistency equation.
using OverlapFn =
    std::function<void(const std::string&, const PcExt&, const PcExt&)>;
void for_each_overlap(const PcCtx& ctx, const OverlapFn& fn);

// Enumerate all normal forms of a finite group; throws when order exceeds cap.
void for_each_element(const PcPresentation& pc,
                      const std::function<void(const PcVec&)>& fn,
                      const Int& cap);

// ---- subgroups -------------------------------------------------------------

struct PcSubgroup {
  std::vector<PcVec> gens;      // echelon, leads strictly increasing
  std::vector<int> leads;
  std::vector<Int> lead_coeffs; // positive; divides ambient order when finite
  std::vector<PcVec> shadows;   // optional tracked images (see span options)
  Int order = 1;                // 0 when infinite
  int hirsch = 0;

  bool trivial() const { return gens.empty(); }
};

struct SpanOptions {
  // conjugate the closure by these ambient generators (normal closure)
  std::vector<int> conjugators;
  // track images under the homomorphism sending ambient generator i to
  // shadow_of_gen[i] in shadow_target (must be defined for all generators
  // appearing in seeds/conjugators)
  const PcPresentation* shadow_target = nullptr;
  std::vector<PcVec> shadow_of_gen;
  std::vector<PcVec> seed_shadows;  // images of the seed elements
  bool verify = true;               // check closure on construction
};

PcSubgroup subgroup_span(const PcPresentation& pc, const std::vector<PcVec>& seeds,
                         const SpanOptions& opt = {});
PcSubgroup normal_closure(const PcPresentation& pc, const std::vector<PcVec>& seeds,
                          SpanOptions opt = {});

// canonical residue of x modulo H (coset representative)
PcVec sift(const PcPresentation& pc, const PcSubgroup& h, const PcVec& x);
bool membership(const PcPresentation& pc, const PcVec& x, const PcSubgroup& h);
// residue plus the exponents of the echelon generators used
std::pair<PcVec, std::vector<Int>> sift_coords(const PcPresentation& pc,
                                               const PcSubgroup& h, const PcVec& x);

PcSubgroup full_subgroup(const PcPresentation& pc);
bool subgroup_contains(const PcPresentation& pc, const PcSubgroup& big,
                       const PcSubgroup& small);
bool subgroup_equal(const PcPresentation& pc, const PcSubgroup& a, const PcSubgroup& b);
bool is_normal(const PcPresentation& pc, const PcSubgroup& h);

// elements of a finite subgroup (echelon odometer)
void for_each_subgroup_element(const PcPresentation& pc, const PcSubgroup& h,
                               const std::function<void(const PcVec&)>& fn,
                               const Int& cap);

// invariants of a finite abelian subgroup (relations among echelon gens)
AbelianInvariants subgroup_abelian_invariants(const PcPresentation& pc,
                                              const PcSubgroup& h);

// ---- quotients -------------------------------------------------------------

struct PcQuotient {
  PcPresentation group;
  std::vector<int> kept;  // quotient generator -> ambient generator index
  PcSubgroup nsub;        // the normal subgroup (reduced echelon)
};

// Quotient by a verified-normal subgroup, with the canonical projection.
PcQuotient quotient(const PcPresentation& pc, const PcSubgroup& n);
PcVec quotient_project(const PcPresentation& ambient, const PcQuotient& q,
                       const PcVec& x);
PcVec quotient_lift(const PcQuotient& q, int ambient_count, const PcVec& xq);

}  // namespace pgv
