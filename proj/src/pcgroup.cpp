#include "pgv/pcgroup.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace pgv {

// ---- presentation structure --------------------------------------------

void PcPresentation::validate() const {
  const int k = count();
  if ((int)gen_names.size() != k || (int)weights.size() != k ||
      (int)power_tails.size() != k || (int)conj_tails.size() != k)
    throw std::invalid_argument("pc presentation: ragged tables");
  for (int i = 0; i < k; i++) {
    if (orders[i] < 0) throw std::invalid_argument("pc presentation: negative order");
    if (orders[i] != 0 && !is_prime_power_of(orders[i], prime))
      throw std::invalid_argument("pc presentation: relative order of '" +
                                  gen_names[i] + "' is not a power of " +
                                  std::to_string(prime));
    if (i && weights[i] < weights[i - 1])
      throw std::invalid_argument("pc presentation: weights must be nondecreasing");
    if (orders[i] != 0) {
      if ((int)power_tails[i].size() != k)
        throw std::invalid_argument("pc presentation: power tail shape");
      for (int j = 0; j <= i; j++)
        if (power_tails[i][j] != 0)
          throw std::invalid_argument(
              "pc presentation: power tail of '" + gen_names[i] +
              "' references generator of index <= its own");
      for (int j = i + 1; j < k; j++)
        if (orders[j] != 0 &&
            (power_tails[i][j] < 0 || power_tails[i][j] >= orders[j]))
          throw std::invalid_argument("pc presentation: power tail not collected");
    }
    if ((int)conj_tails[i].size() != k)
      throw std::invalid_argument("pc presentation: conjugate table shape");
    for (int j = i + 1; j < k; j++) {
      const PcVec& t = conj_tails[i][j];
      if (t.empty()) continue;
      if ((int)t.size() != k)
        throw std::invalid_argument("pc presentation: conjugate tail shape");
      for (int l = 0; l <= j; l++)
        if (t[l] != 0)
          throw std::invalid_argument(
              "pc presentation: tail of " + gen_names[j] + "^" + gen_names[i] +
              " references generator of index <= " + gen_names[j]);
    }
  }
}

bool PcPresentation::all_finite() const {
  for (const Int& m : orders)
    if (m == 0) return false;
  return true;
}

Int PcPresentation::order() const {
  Int n = 1;
  for (const Int& m : orders) {
    if (m == 0) return 0;
    n *= m;
  }
  return n;
}

int PcPresentation::hirsch_length() const {
  int h = 0;
  for (const Int& m : orders)
    if (m == 0) h++;
  return h;
}

int PcPresentation::max_weight() const {
  return weights.empty() ? 0 : weights.back();
}

std::vector<bool> PcPresentation::torsion_certified() const {
  const int k = count();
  std::vector<bool> cert(k, false);
  for (int i = k - 1; i >= 0; i--) {
    if (orders[i] == 0) continue;
    bool ok = true;
    for (int j = i + 1; j < k; j++)
      if (power_tails[i][j] != 0 && !cert[j]) ok = false;
    cert[i] = ok;
  }
  return cert;
}

std::string pc_element_str(const PcPresentation& pc, const PcVec& v) {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < pc.count(); i++) {
    if (v[i] == 0) continue;
    if (!first) os << " ";
    first = false;
    os << pc.gen_names[i];
    if (v[i] != 1) os << "^" << v[i].get_str();
  }
  return first ? "1" : os.str();
}

// ---- sparse tail vectors -------------------------------------------------

void sz_axpy(SparseZ& x, const Int& c, const SparseZ& y) {
  if (c == 0 || y.empty()) return;
  SparseZ r;
  r.reserve(x.size() + y.size());
  size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first))
      r.push_back(x[i++]);
    else if (i == x.size() || y[j].first < x[i].first) {
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
  x = std::move(r);
}

void sz_add_unit(SparseZ& x, int idx, const Int& c) {
  if (c == 0) return;
  SparseZ u{{idx, c}};
  sz_axpy(x, 1, u);
}

// ---- collection -----------------------------------------------------------

PcExt PcCtx::gen(int i) const {
  PcExt x = identity();
  x.v[i] = 1;
  return x;
}

bool PcCtx::is_identity(const PcExt& x) const {
  for (const Int& e : x.v)
    if (e != 0) return false;
  return x.t.empty();
}

// x.v[i] += e with reduction by the power relation; x must have no support > i
void PcCtx::bump(PcExt& x, int i, const Int& e) const {
  const Int& m = pc.orders[i];
  Int f = x.v[i] + e;
  if (m == 0) {
    x.v[i] = f;
    return;
  }
  Int q, r;
  fdiv_qr(q, r, f, m);
  x.v[i] = r;
  if (q == 0) return;
  PcExt pw;
  pw.v = pc.power_tails[i];
  if (tails && tails->pow_tid[i] >= 0) sz_add_unit(pw.t, tails->pow_tid[i], 1);
  PcExt z = power(pw, q);
  x = mul(std::move(x), z);
}

PcExt PcCtx::conj_once(const PcExt& w, int i) const {
  PcExt r = identity();
  r.t = w.t;  // central part is fixed by conjugation
  const int k = pc.count();
  for (int j = i + 1; j < k; j++) {
    if (w.v[j] == 0) continue;
    PcExt img;
    img.v = pc.conj_tails[i][j].empty() ? PcVec(k) : pc.conj_tails[i][j];
    img.v[j] += 1;
    if (tails && tails->conj_tid[i][j] >= 0)
      sz_add_unit(img.t, tails->conj_tid[i][j], 1);
    r = mul(std::move(r), power(img, w.v[j]));
  }
  return r;
}

PcExt PcCtx::conj_inv_once(const PcExt& w, int i) const {
  // solve y^{g_i} = w; discrepancy weight strictly increases per pass
  PcExt y = w;
  const int max_iter = pc.count() + 3;
  for (int it = 0; it < max_iter; it++) {
    PcExt z = conj_once(y, i);
    if (z == w) return y;
    PcExt delta = mul(invert(z), w);
    y = mul(std::move(y), delta);
  }
  throw std::logic_error("conjugation inversion did not converge");
}

PcExt PcCtx::conj_power(PcExt w, int i, const Int& e) const {
  if (e == 0) return w;
  if (!fits_long(e))
    throw std::overflow_error("conjugation exponent out of supported range");
  long n = to_long(e);
  if (n > 0)
    for (long s = 0; s < n; s++) w = conj_once(w, i);
  else
    for (long s = 0; s < -n; s++) w = conj_inv_once(w, i);
  return w;
}

void PcCtx::mul_genpow(PcExt& x, int i, Int e) const {
  if (e == 0) return;
  const int k = pc.count();
  int hi = -1;
  for (int j = k - 1; j > i; j--)
    if (x.v[j] != 0) {
      hi = j;
      break;
    }
  if (hi < 0) {
    bump(x, i, e);
    return;
  }
  PcExt trail = identity();
  for (int j = i + 1; j < k; j++) std::swap(trail.v[j], x.v[j]);
  trail = conj_power(std::move(trail), i, e);
  bump(x, i, e);
  x = mul(std::move(x), trail);
}

PcExt PcCtx::mul(PcExt x, const PcExt& y) const {
  sz_axpy(x.t, 1, y.t);
  for (int j = 0; j < pc.count(); j++)
    if (y.v[j] != 0) mul_genpow(x, j, y.v[j]);
  return x;
}

PcExt PcCtx::invert(const PcExt& x) const {
  PcExt r = identity();
  for (int j = pc.count() - 1; j >= 0; j--)
    if (x.v[j] != 0) mul_genpow(r, j, -x.v[j]);
  sz_axpy(r.t, -1, x.t);
  return r;
}

PcExt PcCtx::power(const PcExt& x, const Int& n) const {
  if (n == 0) return identity();
  PcExt base = n < 0 ? invert(x) : x;
  Int m = abs(n);
  PcExt acc = identity();
  size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
  for (size_t b = 0; b < bits; b++) {
    if (mpz_tstbit(m.get_mpz_t(), b)) acc = mul(std::move(acc), base);
    if (b + 1 < bits) base = mul(base, base);
  }
  return acc;
}

PcExt PcCtx::conj_elem(const PcExt& x, const PcExt& y) const {
  return mul(mul(invert(y), x), y);
}

PcExt PcCtx::comm(const PcExt& x, const PcExt& y) const {
  return mul(mul(invert(x), invert(y)), mul(x, y));
}

PcExt PcCtx::collect_letters(const std::vector<std::pair<int, Int>>& letters) const {
  PcExt r = identity();
  for (const auto& [g, e] : letters) mul_genpow(r, g, e);
  return r;
}

PcExt PcCtx::from_vec(PcVec v) const {
  PcExt r = identity();
  for (int j = 0; j < pc.count(); j++)
    if (v[j] != 0) mul_genpow(r, j, v[j]);
  return r;
}

// ---- plain wrappers ---------------------------------------------------------

PcVec pc_mul(const PcPresentation& pc, const PcVec& x, const PcVec& y) {
  PcCtx c(pc);
  return c.mul(PcExt{x, {}}, PcExt{y, {}}).v;
}
PcVec pc_inv(const PcPresentation& pc, const PcVec& x) {
  PcCtx c(pc);
  return c.invert(PcExt{x, {}}).v;
}
PcVec pc_pow(const PcPresentation& pc, const PcVec& x, const Int& n) {
  PcCtx c(pc);
  return c.power(PcExt{x, {}}, n).v;
}
PcVec pc_conj(const PcPresentation& pc, const PcVec& x, const PcVec& y) {
  PcCtx c(pc);
  return c.conj_elem(PcExt{x, {}}, PcExt{y, {}}).v;
}
PcVec pc_comm(const PcPresentation& pc, const PcVec& x, const PcVec& y) {
  PcCtx c(pc);
  return c.comm(PcExt{x, {}}, PcExt{y, {}}).v;
}
bool pc_is_id(const PcVec& x) {
  for (const Int& e : x)
    if (e != 0) return false;
  return true;
}

Int element_order(const PcPresentation& pc, const PcVec& x) {
  std::vector<bool> cert = pc.torsion_certified();
  for (int i = 0; i < pc.count(); i++)
    if (x[i] != 0 && !cert[i]) return 0;
  Int ord = 1;
  PcVec z = x;
  int guard = 0;
  while (!pc_is_id(z)) {
    z = pc_pow(pc, z, pc.prime);
    ord *= pc.prime;
    if (++guard > 512) throw std::logic_error("element_order: runaway");
  }
  return ord;
}

// ---- consistency ------------------------------------------------------------

void for_each_overlap(const PcCtx& ctx, const OverlapFn& fn) {
  const PcPresentation& pc = ctx.pc;
  const int k = pc.count();
  auto power_elem = [&](int i) {
    PcExt u;
    u.v = pc.power_tails[i];
    if (ctx.tails && ctx.tails->pow_tid[i] >= 0)
      sz_add_unit(u.t, ctx.tails->pow_tid[i], 1);
    return u;
  };
  std::ostringstream lbl;
  for (int l = 2; l < k; l++)
    for (int j = 1; j < l; j++)
      for (int i = 0; i < j; i++) {
        PcExt a = ctx.collect_letters({{l, 1}, {j, 1}, {i, 1}});
        PcExt b = ctx.mul(ctx.gen(l), ctx.collect_letters({{j, 1}, {i, 1}}));
        fn("associativity (" + pc.gen_names[l] + "," + pc.gen_names[j] + "," +
               pc.gen_names[i] + ")",
           a, b);
      }
  for (int j = 0; j < k; j++) {
    if (pc.orders[j] == 0) continue;
    const Int& mj = pc.orders[j];
    for (int i = 0; i < j; i++) {
      // g_j^{m_j} * g_i  vs  g_j^{m_j-1} * (g_j g_i)
      PcExt a = power_elem(j);
      ctx.mul_genpow(a, i, 1);
      PcExt b = ctx.collect_letters({{j, mj - 1}});
      b = ctx.mul(std::move(b), ctx.collect_letters({{j, 1}, {i, 1}}));
      fn("power overlap " + pc.gen_names[j] + "^m * " + pc.gen_names[i], a, b);
    }
    for (int l = j + 1; l < k; l++) {
      // g_l * g_j^{m_j}  vs  (g_l g_j) * g_j^{m_j-1}
      PcExt a = ctx.mul(ctx.gen(l), power_elem(j));
      PcExt b = ctx.collect_letters({{l, 1}, {j, 1}});
      ctx.mul_genpow(b, j, mj - 1);
      fn("power overlap " + pc.gen_names[l] + " * " + pc.gen_names[j] + "^m", a, b);
    }
    // g_j * g_j^{m_j} vs g_j^{m_j} * g_j
    PcExt a = ctx.mul(ctx.gen(j), power_elem(j));
    PcExt b = ctx.mul(power_elem(j), ctx.gen(j));
    fn("power overlap " + pc.gen_names[j] + " * " + pc.gen_names[j] + "^m", a, b);
  }
}

ConsistencyReport is_consistent(const PcPresentation& pc) {
  pc.validate();
  PcCtx ctx(pc);
  ConsistencyReport rep;
  for_each_overlap(ctx, [&](const std::string& label, const PcExt& a, const PcExt& b) {
    if (rep.pass && !(a.v == b.v)) {
      rep.pass = false;
      rep.witness = label + ": " + pc_element_str(pc, a.v) + " != " +
                    pc_element_str(pc, b.v);
    }
  });
  return rep;
}

void for_each_element(const PcPresentation& pc,
                      const std::function<void(const PcVec&)>& fn, const Int& cap) {
  Int n = pc.order();
  if (n == 0) throw std::domain_error("for_each_element: infinite group");
  if (n > cap)
    throw std::domain_error("for_each_element: order " + n.get_str() +
                            " exceeds enumeration threshold " + cap.get_str());
  const int k = pc.count();
  PcVec v(k);
  for (;;) {
    fn(v);
    int i = k - 1;
    while (i >= 0) {
      v[i] += 1;
      if (v[i] < pc.orders[i]) break;
      v[i] = 0;
      i--;
    }
    if (i < 0) break;
  }
}

// ---- subgroup machinery ------------------------------------------------------

namespace {

struct SpanElem {
  PcVec v;
  PcVec sh;  // shadow image; empty when untracked
};

class SpanBuilder {
 public:
  SpanBuilder(const PcPresentation& p, const SpanOptions& o)
      : pc(p), ctx(p), opt(o), tracked(o.shadow_target != nullptr) {
    if (tracked) tctx.emplace(*o.shadow_target);
  }

  const PcPresentation& pc;
  PcCtx ctx;
  const SpanOptions& opt;
  bool tracked;
  std::optional<PcCtx> tctx;
  std::map<int, SpanElem> rows;
  std::deque<SpanElem> pool;
  long steps = 0;

  SpanElem se_mul(const SpanElem& a, const SpanElem& b) const {
    SpanElem r;
    r.v = ctx.mul(PcExt{a.v, {}}, PcExt{b.v, {}}).v;
    if (tracked) r.sh = tctx->mul(PcExt{a.sh, {}}, PcExt{b.sh, {}}).v;
    return r;
  }
  SpanElem se_inv(const SpanElem& a) const {
    SpanElem r;
    r.v = ctx.invert(PcExt{a.v, {}}).v;
    if (tracked) r.sh = tctx->invert(PcExt{a.sh, {}}).v;
    return r;
  }
  SpanElem se_pow(const SpanElem& a, const Int& n) const {
    SpanElem r;
    r.v = ctx.power(PcExt{a.v, {}}, n).v;
    if (tracked) r.sh = tctx->power(PcExt{a.sh, {}}, n).v;
    return r;
  }
  SpanElem se_conj(const SpanElem& a, const SpanElem& b) const {
    SpanElem r;
    r.v = ctx.conj_elem(PcExt{a.v, {}}, PcExt{b.v, {}}).v;
    if (tracked) r.sh = tctx->conj_elem(PcExt{a.sh, {}}, PcExt{b.sh, {}}).v;
    return r;
  }
  SpanElem se_conj_by_gen(const SpanElem& a, int g, int sign) const {
    SpanElem r;
    PcExt cg = ctx.gen(g);
    if (sign < 0) cg = ctx.invert(cg);
    r.v = ctx.conj_elem(PcExt{a.v, {}}, cg).v;
    if (tracked) {
      PcExt sg = PcExt{opt.shadow_of_gen.at(g), {}};
      if (sign < 0) sg = tctx->invert(sg);
      r.sh = tctx->conj_elem(PcExt{a.sh, {}}, sg).v;
    }
    return r;
  }

  int lead_of(const PcVec& v) const {
    for (int i = 0; i < (int)v.size(); i++)
      if (v[i] != 0) return i;
    return -1;
  }

  void guard() {
    if (++steps > 20000000)
      throw std::runtime_error("subgroup closure: step limit exceeded");
  }

  void enqueue_closure(const SpanElem& y) {
    for (int g : opt.conjugators) {
      pool.push_back(se_conj_by_gen(y, g, +1));
      pool.push_back(se_conj_by_gen(y, g, -1));
    }
    for (const auto& [l, r] : rows) {
      (void)l;
      if (&r == &y) continue;
      pool.push_back(se_conj(y, r));
      pool.push_back(se_conj(r, y));
    }
  }

  // install y as the row at lead l (normalizing at finite coordinates)
  void place(int l, SpanElem y) {
    const Int& m = pc.orders[l];
    if (m != 0) {
      Int b = y.v[l];
      Int g = gcd(b, m);
      if (g != b) {
        Int s = modinv(b / g, m / g);
        SpanElem y2 = se_pow(y, s);
        pool.push_back(y);  // keep the original reachable
        y = std::move(y2);
      }
      rows[l] = y;
      pool.push_back(se_pow(y, m / g));  // power residue, support > l
    } else {
      rows[l] = y;
    }
    enqueue_closure(rows[l]);
  }

  void process(SpanElem x) {
    for (;;) {
      guard();
      int l = lead_of(x.v);
      if (l < 0) {
        if (tracked && !pc_is_id(x.sh))
          throw std::logic_error("tracked span: shadow map inconsistent");
        return;
      }
      if (pc.orders[l] == 0 && x.v[l] < 0) {
        x = se_inv(x);
        continue;
      }
      auto it = rows.find(l);
      if (it == rows.end()) {
        place(l, std::move(x));
        return;
      }
      Int a = x.v[l];
      Int b = it->second.v[l];
      if (fdiv_r(a, b) == 0) {
        x = se_mul(x, se_pow(it->second, -(a / b)));
        if (x.v[l] != 0) throw std::logic_error("span sift: lead not cleared");
      } else {
        Int u, w;
        Int g = gcdext(a, b, u, w);
        SpanElem y = se_mul(se_pow(x, u), se_pow(it->second, w));
        if (y.v[l] != g) throw std::logic_error("span refine: lead mismatch");
        SpanElem old = it->second;
        place(l, std::move(y));
        pool.push_back(std::move(old));
      }
    }
  }

  void run(const std::vector<PcVec>& seeds, const std::vector<PcVec>& seed_shadows) {
    for (size_t i = 0; i < seeds.size(); i++) {
      SpanElem e;
      e.v = ctx.from_vec(seeds[i]).v;
      if (tracked) {
        if (i < seed_shadows.size())
          e.sh = seed_shadows[i];
        else
          throw std::invalid_argument("tracked span: missing seed shadow");
      }
      pool.push_back(std::move(e));
    }
    while (!pool.empty()) {
      SpanElem x = std::move(pool.front());
      pool.pop_front();
      process(std::move(x));
    }
  }

  PcSubgroup finish() {
    PcSubgroup h;
    for (auto& [l, e] : rows) {
      h.leads.push_back(l);
      h.lead_coeffs.push_back(e.v[l]);
      h.gens.push_back(e.v);
      if (tracked) h.shadows.push_back(e.sh);
    }
    h.order = 1;
    for (size_t t = 0; t < h.leads.size(); t++) {
      const Int& m = pc.orders[h.leads[t]];
      if (m == 0) {
        h.hirsch++;
      } else {
        h.order *= m / h.lead_coeffs[t];
      }
    }
    if (h.hirsch > 0) h.order = 0;
    return h;
  }
};

}  // namespace

PcSubgroup subgroup_span(const PcPresentation& pc, const std::vector<PcVec>& seeds,
                         const SpanOptions& opt) {
  SpanBuilder b(pc, opt);
  b.run(seeds, opt.seed_shadows);
  PcSubgroup h = b.finish();
  if (opt.verify) {
    for (size_t s = 0; s < h.gens.size(); s++)
      for (size_t t = 0; t < h.gens.size(); t++) {
        if (s == t) continue;
        PcVec c = pc_conj(pc, h.gens[s], h.gens[t]);
        if (!pc_is_id(sift(pc, h, c)))
          throw std::logic_error("subgroup span: closure verification failed");
      }
    for (size_t t = 0; t < h.gens.size(); t++) {
      const Int& m = pc.orders[h.leads[t]];
      if (m == 0) continue;
      PcVec pw = pc_pow(pc, h.gens[t], m / h.lead_coeffs[t]);
      if (!pc_is_id(sift(pc, h, pw)))
        throw std::logic_error("subgroup span: power residue escapes");
    }
  }
  return h;
}

PcSubgroup normal_closure(const PcPresentation& pc, const std::vector<PcVec>& seeds,
                          SpanOptions opt) {
  if (opt.conjugators.empty())
    for (int i = 0; i < pc.count(); i++) opt.conjugators.push_back(i);
  return subgroup_span(pc, seeds, opt);
}

std::pair<PcVec, std::vector<Int>> sift_coords(const PcPresentation& pc,
                                               const PcSubgroup& h, const PcVec& x) {
  PcCtx ctx(pc);
  PcExt cur{x, {}};
  std::vector<Int> coords(h.gens.size());
  for (size_t t = 0; t < h.gens.size(); t++) {
    int l = h.leads[t];
    const Int& a = cur.v[l];
    if (a == 0) continue;
    Int q = fdiv_q(a, h.lead_coeffs[t]);
    if (q == 0) continue;
    cur = ctx.mul(std::move(cur), ctx.power(PcExt{h.gens[t], {}}, -q));
    coords[t] = q;
  }
  return {cur.v, coords};
}

PcVec sift(const PcPresentation& pc, const PcSubgroup& h, const PcVec& x) {
  return sift_coords(pc, h, x).first;
}

bool membership(const PcPresentation& pc, const PcVec& x, const PcSubgroup& h) {
  return pc_is_id(sift(pc, h, x));
}

PcSubgroup full_subgroup(const PcPresentation& pc) {
  std::vector<PcVec> seeds;
  for (int i = 0; i < pc.count(); i++) {
    PcVec v(pc.count());
    v[i] = 1;
    seeds.push_back(v);
  }
  SpanOptions opt;
  opt.verify = false;
  return subgroup_span(pc, seeds, opt);
}

bool subgroup_contains(const PcPresentation& pc, const PcSubgroup& big,
                       const PcSubgroup& small) {
  for (const PcVec& g : small.gens)
    if (!membership(pc, g, big)) return false;
  return true;
}

bool subgroup_equal(const PcPresentation& pc, const PcSubgroup& a,
                    const PcSubgroup& b) {
  return subgroup_contains(pc, a, b) && subgroup_contains(pc, b, a);
}

bool is_normal(const PcPresentation& pc, const PcSubgroup& h) {
  for (const PcVec& g : h.gens)
    for (int i = 0; i < pc.count(); i++) {
      PcVec gi(pc.count());
      gi[i] = 1;
      if (!membership(pc, pc_conj(pc, g, gi), h)) return false;
      if (!membership(pc, pc_conj(pc, g, pc_inv(pc, gi)), h)) return false;
    }
  return true;
}

void for_each_subgroup_element(const PcPresentation& pc, const PcSubgroup& h,
                               const std::function<void(const PcVec&)>& fn,
                               const Int& cap) {
  if (h.order == 0) throw std::domain_error("for_each_subgroup_element: infinite");
  if (h.order > cap)
    throw std::domain_error("for_each_subgroup_element: order exceeds threshold");
  const size_t n = h.gens.size();
  std::vector<Int> limit(n);
  for (size_t t = 0; t < n; t++)
    limit[t] = pc.orders[h.leads[t]] / h.lead_coeffs[t];
  // depth-first product over the echelon generators
  std::function<void(size_t, const PcVec&)> rec = [&](size_t t, const PcVec& acc) {
    if (t == n) {
      fn(acc);
      return;
    }
    PcVec cur = acc;
    for (Int e = 0; e < limit[t]; ++e) {
      rec(t + 1, cur);
      if (e + 1 < limit[t]) cur = pc_mul(pc, cur, h.gens[t]);
    }
  };
  rec(0, PcVec(pc.count()));
}

AbelianInvariants subgroup_abelian_invariants(const PcPresentation& pc,
                                              const PcSubgroup& h) {
  const size_t n = h.gens.size();
  for (size_t s = 0; s < n; s++)
    for (size_t t = s + 1; t < n; t++)
      if (!pc_is_id(pc_comm(pc, h.gens[s], h.gens[t])))
        throw std::domain_error("subgroup_abelian_invariants: subgroup not abelian");
  std::vector<std::vector<Int>> rel;
  for (size_t t = 0; t < n; t++) {
    const Int& m = pc.orders[h.leads[t]];
    if (m == 0) continue;  // free generator
    Int o = m / h.lead_coeffs[t];
    auto [res, coords] = sift_coords(pc, h, pc_pow(pc, h.gens[t], o));
    if (!pc_is_id(res))
      throw std::logic_error("subgroup_abelian_invariants: power residue escapes");
    std::vector<Int> row(n);
    row[t] = o;
    for (size_t s = 0; s < n; s++) row[s] -= coords[s];
    rel.push_back(std::move(row));
  }
  IntMat m((int)rel.size(), (int)n);
  for (int i = 0; i < m.rows; i++)
    for (int j = 0; j < m.cols; j++) m.at(i, j) = rel[i][j];
  return abelian_invariants(m, (int)n);
}

// ---- quotient ---------------------------------------------------------------

PcQuotient quotient(const PcPresentation& pc, const PcSubgroup& n) {
  if (!is_normal(pc, n))
    throw std::invalid_argument("quotient: subgroup is not normal");
  const int k = pc.count();
  std::vector<Int> d(k);  // coordinate order in the quotient; 0 = infinite
  std::map<int, size_t> lead_row;
  for (size_t t = 0; t < n.gens.size(); t++) lead_row[n.leads[t]] = t;
  for (int i = 0; i < k; i++) {
    auto it = lead_row.find(i);
    if (it != lead_row.end())
      d[i] = n.lead_coeffs[it->second];
    else
      d[i] = pc.orders[i];
  }
  PcQuotient q;
  q.nsub = n;
  for (int i = 0; i < k; i++)
    if (d[i] != 1) q.kept.push_back(i);
  const int kk = (int)q.kept.size();
  PcPresentation& g = q.group;
  g.prime = pc.prime;
  g.name = pc.name + "/N";
  std::vector<int> pos(k, -1);
  for (int t = 0; t < kk; t++) pos[q.kept[t]] = t;

  auto project = [&](const PcVec& x) {
    PcVec res = sift(pc, n, x);
    PcVec out(kk);
    for (int t = 0; t < kk; t++) out[t] = res[q.kept[t]];
    for (int i = 0; i < k; i++)
      if (pos[i] < 0 && res[i] != 0)
        throw std::logic_error("quotient: residue on eliminated coordinate");
    return out;
  };

  for (int t = 0; t < kk; t++) {
    int i = q.kept[t];
    g.gen_names.push_back(pc.gen_names[i]);
    g.weights.push_back(pc.weights[i]);
    g.orders.push_back(d[i]);
  }
  g.power_tails.assign(kk, {});
  g.conj_tails.assign(kk, std::vector<PcVec>(kk));
  for (int t = 0; t < kk; t++) {
    int i = q.kept[t];
    if (d[i] != 0) {
      PcVec gi(k);
      gi[i] = 1;
      PcVec pw = project(pc_pow(pc, gi, d[i]));
      for (int s = 0; s <= t; s++)
        if (pw[s] != 0) throw std::logic_error("quotient: power tail support");
      g.power_tails[t] = pw;
    }
    for (int s = 0; s < t; s++) {
      int i2 = q.kept[s];  // i2 < i
      PcVec gi(k), gj(k);
      gi[i2] = 1;
      gj[i] = 1;
      PcVec cj = project(pc_conj(pc, gj, gi));
      if (cj[t] != 1) throw std::logic_error("quotient: conjugate lost its head");
      cj[t] = 0;
      bool zero = pc_is_id(cj);
      if (!zero) g.conj_tails[s][t] = cj;
    }
  }
  g.validate();
  ConsistencyReport rep = is_consistent(g);
  if (!rep.pass)
    throw std::logic_error("quotient: inconsistent result: " + rep.witness);
  if (pc.all_finite()) {
    if (g.order() * n.order != pc.order())
      throw std::logic_error("quotient: order bookkeeping failed");
  }
  return q;
}

PcVec quotient_project(const PcPresentation& ambient, const PcQuotient& q,
                       const PcVec& x) {
  PcVec res = sift(ambient, q.nsub, x);
  PcVec out(q.kept.size());
  for (size_t t = 0; t < q.kept.size(); t++) out[t] = res[q.kept[t]];
  return out;
}

PcVec quotient_lift(const PcQuotient& q, int ambient_count, const PcVec& xq) {
  PcVec out(ambient_count);
  for (size_t t = 0; t < q.kept.size(); t++) out[q.kept[t]] = xq[t];
  return out;
}

// ---- textual format -----------------------------------------------------------

std::string PcPresentation::format() const {
  std::ostringstream os;
  os << "pcgroup \"" << name << "\"\n";
  os << "prime " << prime << "\n";
  for (int i = 0; i < count(); i++) {
    os << "gen " << gen_names[i] << " order ";
    if (orders[i] == 0)
      os << "inf";
    else
      os << orders[i].get_str();
    os << " weight " << weights[i] << "\n";
  }
  for (int i = 0; i < count(); i++) {
    if (orders[i] == 0) continue;
    bool zero = true;
    for (const Int& e : power_tails[i])
      if (e != 0) zero = false;
    if (!zero)
      os << "power " << gen_names[i] << " = " << pc_element_str(*this, power_tails[i])
         << "\n";
  }
  for (int i = 0; i < count(); i++)
    for (int j = i + 1; j < count(); j++) {
      if (conj_tails[i][j].empty()) continue;
      PcVec rhs = conj_tails[i][j];
      rhs[j] += 1;
      os << "conj " << gen_names[j] << "^" << gen_names[i] << " = "
         << pc_element_str(*this, rhs) << "\n";
    }
  return os.str();
}

namespace {

// read "name^exp name^exp ..." as a collected exponent vector
PcVec parse_nf_word(const std::string& text, const PcPresentation& pc, int line) {
  PcVec v(pc.count());
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok == "1" || tok == "*") continue;
    std::string nm = tok;
    Int e = 1;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      nm = tok.substr(0, caret);
      e = Int(tok.substr(caret + 1));
    }
    int gi = -1;
    for (int i = 0; i < pc.count(); i++)
      if (pc.gen_names[i] == nm) gi = i;
    if (gi < 0)
      throw ParseError("unknown pc generator '" + nm + "'", line, 1);
    v[gi] += e;
  }
  return v;
}

}  // namespace

PcPresentation PcPresentation::parse(const std::string& text) {
  PcPresentation pc;
  std::istringstream is(text);
  std::string rawline;
  int ln = 0;
  std::vector<std::tuple<int, std::string, std::string>> deferred;  // kind, payload
  while (std::getline(is, rawline)) {
    ln++;
    std::string linestr = rawline;
    auto hash = linestr.find('#');
    if (hash != std::string::npos) linestr = linestr.substr(0, hash);
    std::istringstream ls(linestr);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "pcgroup") {
      std::string rest;
      std::getline(ls, rest);
      auto q1 = rest.find('"');
      auto q2 = rest.rfind('"');
      pc.name = (q1 != std::string::npos && q2 > q1)
                    ? rest.substr(q1 + 1, q2 - q1 - 1)
                    : rest;
    } else if (kw == "prime") {
      long p;
      ls >> p;
      if (!is_odd_prime(p)) throw ParseError("prime must be an odd prime", ln, 1);
      pc.prime = p;
    } else if (kw == "gen") {
      std::string nm, kworder, ordstr, kwweight;
      int w;
      ls >> nm >> kworder >> ordstr >> kwweight >> w;
      if (kworder != "order" || kwweight != "weight")
        throw ParseError("expected: gen <name> order <m|inf> weight <w>", ln, 1);
      pc.gen_names.push_back(nm);
      pc.orders.push_back(ordstr == "inf" ? Int(0) : Int(ordstr));
      pc.weights.push_back(w);
    } else if (kw == "power" || kw == "conj") {
      std::string rest;
      std::getline(ls, rest);
      deferred.emplace_back(ln, kw, rest);
    } else if (kw == "expect") {
      continue;  // metadata handled at the presentation level
    } else {
      throw ParseError("unknown keyword '" + kw + "'", ln, 1);
    }
  }
  const int k = pc.count();
  pc.power_tails.assign(k, {});
  pc.conj_tails.assign(k, std::vector<PcVec>(k));
  for (int i = 0; i < k; i++)
    if (pc.orders[i] != 0) pc.power_tails[i] = PcVec(k);
  for (auto& [line, kind, payload] : deferred) {
    auto eq = payload.find('=');
    if (eq == std::string::npos) throw ParseError("expected '='", line, 1);
    std::string lhs = payload.substr(0, eq);
    std::string rhs = payload.substr(eq + 1);
    if (kind == "power") {
      std::istringstream l2(lhs);
      std::string nm;
      l2 >> nm;
      int gi = -1;
      for (int i = 0; i < k; i++)
        if (pc.gen_names[i] == nm) gi = i;
      if (gi < 0 || pc.orders[gi] == 0)
        throw ParseError("power tail for unknown/infinite generator", line, 1);
      pc.power_tails[gi] = parse_nf_word(rhs, pc, line);
    } else {
      std::istringstream l2(lhs);
      std::string expr;
      l2 >> expr;
      auto caret = expr.find('^');
      if (caret == std::string::npos)
        throw ParseError("expected gj^gi on the left of conj", line, 1);
      std::string jn = expr.substr(0, caret), in = expr.substr(caret + 1);
      int gj = -1, gi = -1;
      for (int i = 0; i < k; i++) {
        if (pc.gen_names[i] == jn) gj = i;
        if (pc.gen_names[i] == in) gi = i;
      }
      if (gi < 0 || gj < 0 || gi >= gj)
        throw ParseError("conj requires gj^gi with i < j", line, 1);
      PcVec rhsv = parse_nf_word(rhs, pc, line);
      if (rhsv[gj] != 1)
        throw ParseError("conjugate value must start with the conjugated generator",
                         line, 1);
      rhsv[gj] = 0;
      if (!pc_is_id(rhsv)) pc.conj_tails[gi][gj] = rhsv;
    }
  }
  pc.validate();
  return pc;
}

}  // namespace pgv
