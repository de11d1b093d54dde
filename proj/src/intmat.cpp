#include "pgv/intmat.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace pgv {

IntMat IntMat::mul(const IntMat& o) const {
  if (cols != o.rows) throw std::invalid_argument("IntMat::mul: shape");
  IntMat r(rows, o.cols);
  for (int i = 0; i < rows; i++)
    for (int k = 0; k < cols; k++) {
      const Int& v = at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < o.cols; j++) r.at(i, j) += v * o.at(k, j);
    }
  return r;
}

IntMat IntMat::transpose() const {
  IntMat r(cols, rows);
  for (int i = 0; i < rows; i++)
    for (int j = 0; j < cols; j++) r.at(j, i) = at(i, j);
  return r;
}

std::string IntMat::str() const {
  std::ostringstream os;
  for (int i = 0; i < rows; i++) {
    os << (i ? "\n" : "");
    for (int j = 0; j < cols; j++) os << (j ? " " : "") << at(i, j).get_str();
  }
  return os.str();
}

std::string AbelianInvariants::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < torsion.size(); i++)
    os << (i ? "," : "") << torsion[i].get_str();
  os << ")";
  if (free_rank) os << "+Z^" << free_rank;
  return os.str();
}

namespace {

void swap_rows(IntMat& m, int i, int j) {
  if (i == j) return;
  for (int c = 0; c < m.cols; c++) std::swap(m.at(i, c), m.at(j, c));
}

void swap_cols(IntMat& m, int i, int j) {
  if (i == j) return;
  for (int r = 0; r < m.rows; r++) std::swap(m.at(r, i), m.at(r, j));
}

// row[i] -= q * row[j]
void row_sub(IntMat& m, int i, const Int& q, int j) {
  if (q == 0) return;
  for (int c = 0; c < m.cols; c++) m.at(i, c) -= q * m.at(j, c);
}

void col_sub(IntMat& m, int i, const Int& q, int j) {
  if (q == 0) return;
  for (int r = 0; r < m.rows; r++) m.at(r, i) -= q * m.at(r, j);
}

void negate_row(IntMat& m, int i) {
  for (int c = 0; c < m.cols; c++) m.at(i, c) = -m.at(i, c);
}

void negate_col(IntMat& m, int j) {
  for (int r = 0; r < m.rows; r++) m.at(r, j) = -m.at(r, j);
}

}  // namespace

SnfResult smith_normal_form(const IntMat& input, SnfOptions opt) {
  SnfResult res;
  res.d = input;
  IntMat& d = res.d;
  const int m = d.rows, n = d.cols;
  if (opt.want_p || opt.verify) res.p = IntMat::identity(m);
  if (opt.want_q || opt.verify) res.q = IntMat::identity(n);
  bool tp = res.p.rows > 0, tq = res.q.rows > 0;

  int t = 0;
  while (t < m && t < n) {
    // smallest nonzero entry in the trailing block as pivot
    int pi = -1, pj = -1;
    for (int i = t; i < m; i++)
      for (int j = t; j < n; j++) {
        const Int& v = d.at(i, j);
        if (v == 0) continue;
        if (pi < 0 || mpz_cmpabs(v.get_mpz_t(), d.at(pi, pj).get_mpz_t()) < 0) {
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // trailing block is zero
    swap_rows(d, t, pi);
    if (tp) swap_rows(res.p, t, pi);
    swap_cols(d, t, pj);
    if (tq) swap_cols(res.q, t, pj);

    for (;;) {
      bool clean = true;
      for (int i = t + 1; i < m; i++) {
        if (d.at(i, t) == 0) continue;
        Int q = fdiv_q(d.at(i, t), d.at(t, t));
        row_sub(d, i, q, t);
        if (tp) row_sub(res.p, i, q, t);
        if (d.at(i, t) != 0) {  // remainder became the smaller pivot
          swap_rows(d, t, i);
          if (tp) swap_rows(res.p, t, i);
          clean = false;
        }
      }
      for (int j = t + 1; j < n; j++) {
        if (d.at(t, j) == 0) continue;
        Int q = fdiv_q(d.at(t, j), d.at(t, t));
        col_sub(d, j, q, t);
        if (tq) col_sub(res.q, j, q, t);
        if (d.at(t, j) != 0) {
          swap_cols(d, t, j);
          if (tq) swap_cols(res.q, t, j);
          clean = false;
        }
      }
      if (!clean) continue;
      // divisibility fix: pivot must divide the whole trailing block
      bool fixed = true;
      for (int i = t + 1; i < m && fixed; i++)
        for (int j = t + 1; j < n && fixed; j++)
          if (fdiv_r(d.at(i, j), d.at(t, t)) != 0) {
            row_sub(d, t, Int(-1), i);  // add row i to row t
            if (tp) row_sub(res.p, t, Int(-1), i);
            fixed = false;
          }
      if (fixed) break;
    }
    if (d.at(t, t) < 0) {
      negate_row(d, t);
      if (tp) negate_row(res.p, t);
    }
    t++;
  }
  res.rank = t;
  for (int i = 0; i < t; i++) res.divisors.push_back(d.at(i, i));

  if (opt.verify) {
    IntMat check = res.p.mul(input).mul(res.q);
    if (!(check == d)) throw std::logic_error("smith_normal_form: P*A*Q != D");
    for (int i = 0; i + 1 < res.rank; i++)
      if (fdiv_r(res.divisors[i + 1], res.divisors[i]) != 0)
        throw std::logic_error("smith_normal_form: divisor chain broken");
    for (int i = 0; i < d.rows; i++)
      for (int j = 0; j < d.cols; j++)
        if (i != j && d.at(i, j) != 0)
          throw std::logic_error("smith_normal_form: not diagonal");
    if (!opt.want_p) res.p = IntMat();
    if (!opt.want_q) res.q = IntMat();
  }
  return res;
}

HnfResult hermite_normal_form(const IntMat& input) {
  IntMat h = input;
  const int m = h.rows, n = h.cols;
  int r = 0;
  std::vector<int> pivots;
  for (int j = 0; j < n && r < m; j++) {
    // gcd the entries of column j at rows >= r into one row
    int pr = -1;
    for (int i = r; i < m; i++)
      if (h.at(i, j) != 0) {
        if (pr < 0 || mpz_cmpabs(h.at(i, j).get_mpz_t(), h.at(pr, j).get_mpz_t()) < 0)
          pr = i;
      }
    if (pr < 0) continue;
    swap_rows(h, r, pr);
    for (;;) {
      bool again = false;
      for (int i = r + 1; i < m; i++) {
        if (h.at(i, j) == 0) continue;
        Int q = fdiv_q(h.at(i, j), h.at(r, j));
        row_sub(h, i, q, r);
        if (h.at(i, j) != 0) {
          swap_rows(h, r, i);
          again = true;
        }
      }
      if (!again) break;
    }
    if (h.at(r, j) < 0) negate_row(h, r);
    // reduce entries above the pivot into [0, pivot)
    for (int i = 0; i < r; i++) {
      Int q = fdiv_q(h.at(i, j), h.at(r, j));
      row_sub(h, i, q, r);
    }
    pivots.push_back(j);
    r++;
  }
  HnfResult res;
  res.h = IntMat(r, n);
  for (int i = 0; i < r; i++)
    for (int j = 0; j < n; j++) res.h.at(i, j) = h.at(i, j);
  res.pivot_col = pivots;
  return res;
}

AbelianInvariants abelian_invariants(const IntMat& relations, int n) {
  if (relations.cols != n && relations.rows != 0)
    throw std::invalid_argument("abelian_invariants: column count");
  SnfResult s = smith_normal_form(relations);
  AbelianInvariants inv;
  for (const Int& dv : s.divisors)
    if (dv > 1) inv.torsion.push_back(dv);
  inv.free_rank = n - s.rank;
  return inv;
}

IntSolveResult solve_integer_system(const IntMat& a, const std::vector<Int>& b,
                                    const std::vector<Int>& moduli) {
  const int m = a.rows, n = a.cols;
  if ((int)b.size() != m || (int)moduli.size() != m)
    throw std::invalid_argument("solve_integer_system: dimension mismatch");
  int slack = 0;
  for (const Int& md : moduli)
    if (md != 0) slack++;
  IntMat ext(m, n + slack);
  for (int i = 0; i < m; i++)
    for (int j = 0; j < n; j++) ext.at(i, j) = a.at(i, j);
  {
    int c = n;
    for (int i = 0; i < m; i++)
      if (moduli[i] != 0) ext.at(i, c++) = moduli[i];
  }
  SnfOptions opt;
  opt.want_p = opt.want_q = true;
  SnfResult s = smith_normal_form(ext, opt);
  const int nn = n + slack;

  // D z = P b, y = Q z
  std::vector<Int> pb(m);
  for (int i = 0; i < m; i++)
    for (int k = 0; k < m; k++) pb[i] += s.p.at(i, k) * b[k];

  IntSolveResult res;
  std::vector<Int> z(nn);
  for (int i = 0; i < m; i++) {
    if (i < s.rank) {
      Int q, r;
      fdiv_qr(q, r, pb[i], s.d.at(i, i));
      if (r != 0) return res;  // unsolvable
      if (i < nn) z[i] = q;
    } else if (pb[i] != 0) {
      return res;  // inconsistent zero row
    }
  }
  res.solvable = true;
  res.particular.assign(n, Int(0));
  for (int j = 0; j < n; j++)
    for (int k = 0; k < nn; k++)
      if (z[k] != 0) res.particular[j] += s.q.at(j, k) * z[k];
  for (int k = s.rank; k < nn; k++) {
    std::vector<Int> hv(n);
    bool nonzero = false;
    for (int j = 0; j < n; j++) {
      hv[j] = s.q.at(j, k);
      if (hv[j] != 0) nonzero = true;
    }
    if (nonzero) res.homogeneous.push_back(std::move(hv));
  }
  return res;
}

// ---- sparse ----------------------------------------------------------------

SparseVec sparse_axpy(const SparseVec& x, const Int& c, const SparseVec& y) {
  // x + c*y
  SparseVec r;
  r.reserve(x.size() + y.size());
  size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      r.push_back(x[i++]);
    } else if (i == x.size() || y[j].first < x[i].first) {
      Int v = c * y[j].second;
      if (v != 0) r.emplace_back(y[j].first, std::move(v));
      j++;
    } else {
      Int v = x[i].second + c * y[j].second;
      if (v != 0) r.emplace_back(x[i].first, std::move(v));
      i++;
      j++;
    }
  }
  return r;
}

void SparseEchelon::add(SparseVec v) {
  while (!v.empty()) {
    int lead = v.front().first;
    auto it = rows_.find(lead);
    if (it == rows_.end()) {
      if (v.front().second < 0)
        for (auto& e : v) e.second = -e.second;
      rows_.emplace(lead, std::move(v));
      return;
    }
    SparseVec& r = it->second;
    const Int& a = r.front().second;
    const Int& bq = v.front().second;
    if (fdiv_r(bq, a) == 0) {
      Int q = -fdiv_q(bq, a);
      v = sparse_axpy(v, q, r);
    } else {
      Int u, w;
      Int g = gcdext(a, bq, u, w);
      // new pivot row u*r + w*v, residue (a/g)*v - (b/g)*r
      SparseVec nr = sparse_axpy({}, u, r);
      nr = sparse_axpy(nr, w, v);
      Int ca = a / g, cb = bq / g;
      SparseVec res1 = sparse_axpy({}, ca, v);
      res1 = sparse_axpy(res1, -cb, r);
      r = std::move(nr);
      v = std::move(res1);
    }
  }
}

IntMat SparseEchelon::to_dense() const {
  IntMat m((int)rows_.size(), dim_);
  int i = 0;
  for (const auto& [lead, row] : rows_) {
    (void)lead;
    for (const auto& [c, val] : row) m.at(i, c) = val;
    i++;
  }
  return m;
}

AbelianInvariants SparseEchelon::quotient_invariants() const {
  // eliminate unit pivots sparsely, then dense SNF on the rest
  std::map<int, SparseVec> work = rows_;
  std::vector<SparseVec> rest;
  bool changed = true;
  std::vector<int> dead_cols;
  while (changed) {
    changed = false;
    for (auto it = work.begin(); it != work.end(); ++it) {
      Int lc = it->second.front().second;
      if (lc == 1 || lc == -1) {
        SparseVec piv = it->second;
        int col = it->first;
        if (lc == -1)
          for (auto& e : piv) e.second = -e.second;
        work.erase(it);
        dead_cols.push_back(col);
        std::map<int, SparseVec> next;
        for (auto& [ld, row] : work) {
          SparseVec r2 = row;
          for (size_t i = 0; i < r2.size(); i++)
            if (r2[i].first == col) {
              Int c = -r2[i].second;
              r2 = sparse_axpy(r2, c, piv);
              break;
            }
          if (!r2.empty()) {
            if (r2.front().second < 0)
              for (auto& e : r2) e.second = -e.second;
            // lead may have moved; re-sift trivially
            auto jt = next.find(r2.front().first);
            if (jt == next.end())
              next.emplace(r2.front().first, std::move(r2));
            else {
              // rare collision: fall back to a tiny echelon
              SparseEchelon se(dim_);
              for (auto& [l2, rr] : next) {
                (void)l2;
                se.add(rr);
              }
              se.add(r2);
              next = se.rows_;
            }
          }
          (void)ld;
        }
        work = std::move(next);
        changed = true;
        break;
      }
    }
  }
  // columns absorbed by unit pivots are gone; remaining lattice is dense-small
  std::map<int, int> colmap;
  for (const auto& [ld, row] : work) {
    (void)ld;
    for (const auto& [c, v] : row) {
      (void)v;
      colmap.emplace(c, 0);
    }
  }
  int nc = 0;
  for (auto& [c, idx] : colmap) {
    (void)c;
    idx = nc++;
  }
  IntMat m((int)work.size(), nc);
  int i = 0;
  for (const auto& [ld, row] : work) {
    (void)ld;
    for (const auto& [c, v] : row) m.at(i, colmap[c]) = v;
    i++;
  }
  AbelianInvariants inv = abelian_invariants(m, nc);
  inv.free_rank = dim_ - rank();
  return inv;
}

int modular_rank(const std::vector<SparseVec>& rows, int dim) {
  (void)dim;
  constexpr uint64_t P = 2305843009213693951ull;  // 2^61 - 1
  auto mulmod = [](uint64_t x, uint64_t y) -> uint64_t {
    return (uint64_t)((__uint128_t)x * y % P);
  };
  auto norm = [&](const Int& v) -> uint64_t {
    Int r = fdiv_r(v, Int(P));
    return mpz_get_ui(r.get_mpz_t());
  };
  using Row = std::vector<std::pair<int, uint64_t>>;
  std::map<int, Row> ech;
  int rank = 0;
  for (const auto& rin : rows) {
    Row r;
    r.reserve(rin.size());
    for (const auto& [c, v] : rin) {
      uint64_t u = norm(v);
      if (u) r.emplace_back(c, u);
    }
    while (!r.empty()) {
      auto it = ech.find(r.front().first);
      if (it == ech.end()) {
        ech.emplace(r.front().first, std::move(r));
        rank++;
        break;
      }
      const Row& e = it->second;
      // r -= (r.lead / e.lead) * e
      uint64_t inv = 1, base = e.front().second, exp = P - 2;
      while (exp) {
        if (exp & 1) inv = mulmod(inv, base);
        base = mulmod(base, base);
        exp >>= 1;
      }
      uint64_t f = mulmod(r.front().second, inv);
      Row out;
      size_t i = 0, j = 0;
      while (i < r.size() || j < e.size()) {
        if (j == e.size() || (i < r.size() && r[i].first < e[j].first))
          out.push_back(r[i++]);
        else if (i == r.size() || e[j].first < r[i].first) {
          uint64_t v = P - mulmod(f, e[j].second);
          if (v != P && v != 0) out.emplace_back(e[j].first, v);
          j++;
        } else {
          uint64_t v = (r[i].second + P - mulmod(f, e[j].second)) % P;
          if (v) out.emplace_back(r[i].first, v);
          i++;
          j++;
        }
      }
      r = std::move(out);
    }
  }
  return rank;
}

}  // namespace pgv
