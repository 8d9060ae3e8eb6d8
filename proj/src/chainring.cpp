#include "dlr/chainring.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dlr/rat.hpp"

namespace dlr {

namespace {

uint64_t upow(uint64_t b, uint64_t k) {
  uint64_t r = 1;
  while (k) {
    if (k & 1) {
      if (b != 0 && r > UINT64_MAX / b) throw overflow_error("upow overflow");
      r *= b;
    }
    k >>= 1;
    if (k && b != 0 && b > UINT64_MAX / b) throw overflow_error("upow overflow");
    if (k) b *= b;
  }
  return r;
}

// ---- F_p[x] utilities for choosing the residue-field modulus ----

using FpPoly = std::vector<int64_t>;  // coefficients in [0, p)

FpPoly fp_reduce(FpPoly c, const FpPoly& m, int64_t p) {
  size_t d = m.size() - 1;
  for (size_t i = c.size(); i-- > d;) {
    int64_t lead = c[i] % p;
    if (lead == 0) continue;
    size_t off = i - d;
    for (size_t j = 0; j <= d; ++j)
      c[off + j] = ((c[off + j] - lead * m[j]) % p + p) % p;
  }
  c.resize(std::max<size_t>(d, 1));
  return c;
}

FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, int64_t p) {
  FpPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  return fp_reduce(std::move(c), m, p);
}

FpPoly fp_powmod_x(uint64_t k, const FpPoly& m, int64_t p) {
  size_t d = m.size() - 1;
  FpPoly r(std::max<size_t>(d, 1), 0);
  r[0] = 1;
  FpPoly b = fp_reduce(FpPoly{0, 1}, m, p);
  while (k) {
    if (k & 1) r = fp_mulmod(r, b, m, p);
    b = fp_mulmod(b, b, m, p);
    k >>= 1;
  }
  return r;
}

void fp_trim(FpPoly& f) {
  while (f.size() > 1 && f.back() == 0) f.pop_back();
}

FpPoly fp_gcd(FpPoly a, FpPoly b, int64_t p) {
  fp_trim(a);
  fp_trim(b);
  while (!(b.size() == 1 && b[0] == 0)) {
    // a mod b
    int64_t inv_lead = 1;
    for (int64_t t = 1; t < p; ++t)
      if (t * b.back() % p == 1) { inv_lead = t; break; }
    while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
      int64_t c = a.back() * inv_lead % p;
      size_t off = a.size() - b.size();
      for (size_t j = 0; j < b.size(); ++j)
        a[off + j] = ((a[off + j] - c * b[j]) % p + p) % p;
      fp_trim(a);
      if (a.back() == 0) break;
    }
    std::swap(a, b);
    fp_trim(b);
  }
  return a;
}

bool fp_irreducible(const FpPoly& f, int64_t p) {
  int d = (int)f.size() - 1;
  if (d < 1) return false;
  FpPoly x = fp_reduce(FpPoly{0, 1}, f, p);
  FpPoly xq = fp_powmod_x(upow((uint64_t)p, d), f, p);
  if (xq != x) return false;
  for (int ell = 2; ell <= d; ++ell) {
    if (d % ell != 0) continue;
    bool prime = true;
    for (int t = 2; t * t <= ell; ++t)
      if (ell % t == 0) { prime = false; break; }
    if (!prime) continue;
    FpPoly xe = fp_powmod_x(upow((uint64_t)p, d / ell), f, p);
    FpPoly diff(std::max(xe.size(), x.size()) + 1, 0);
    for (size_t j = 0; j < xe.size(); ++j) diff[j] = xe[j];
    for (size_t j = 0; j < x.size(); ++j) diff[j] = ((diff[j] - x[j]) % p + p) % p;
    FpPoly g = fp_gcd(diff, f, p);
    if (!(g.size() == 1)) return false;
  }
  return true;
}

}  // namespace

std::vector<int64_t> least_irreducible(int64_t p, int d) {
  uint64_t total = upow((uint64_t)p, d);
  for (uint64_t k = 0; k < total; ++k) {
    FpPoly g(d + 1, 0);
    uint64_t t = k;
    for (int j = 0; j < d; ++j) {
      g[j] = (int64_t)(t % (uint64_t)p);
      t /= (uint64_t)p;
    }
    g[d] = 1;
    if (g[0] == 0) continue;  // root 0 is not a unit
    if (fp_irreducible(g, p)) return g;
  }
  throw std::runtime_error("least_irreducible: none found");
}

// ---- RingSpec ----

int64_t RingSpec::q() const {
  int64_t v = 1;
  for (int i = 0; i < e; ++i) v *= p;
  return v;
}

std::string RingSpec::key() const {
  std::ostringstream os;
  os << (kind == RingKind::mixed ? "mixed" : "equal") << ":p" << p << ":e" << e
     << ":r" << r << ":a" << a;
  return os.str();
}

RingSpec RingSpec::parse(const std::string& key) {
  RingSpec s;
  std::istringstream is(key);
  std::string tok;
  int idx = 0;
  while (std::getline(is, tok, ':')) {
    if (idx == 0) {
      if (tok == "mixed") s.kind = RingKind::mixed;
      else if (tok == "equal") s.kind = RingKind::equal;
      else throw std::runtime_error("RingSpec: bad kind " + tok);
    } else {
      if (tok.size() < 2) throw std::runtime_error("RingSpec: bad field " + tok);
      int64_t v = std::stoll(tok.substr(1));
      switch (tok[0]) {
        case 'p': s.p = v; break;
        case 'e': s.e = (int)v; break;
        case 'r': s.r = (int)v; break;
        case 'a': s.a = (int)v; break;
        default: throw std::runtime_error("RingSpec: bad field " + tok);
      }
    }
    ++idx;
  }
  return s;
}

// ---- base chain ring ops (prime ring Z/p^l or F_p[t]/t^l) ----

uint64_t Ring::badd(uint64_t x, uint64_t y) const {
  if (kind_ == RingKind::mixed) return (x + y) % pl_;
  uint64_t r = 0, mul = 1;
  for (int i = 0; i < level_; ++i) {
    uint64_t dx = x % (uint64_t)p_, dy = y % (uint64_t)p_;
    r += (dx + dy) % (uint64_t)p_ * mul;
    x /= (uint64_t)p_;
    y /= (uint64_t)p_;
    mul *= (uint64_t)p_;
  }
  return r;
}

uint64_t Ring::bneg(uint64_t x) const {
  if (kind_ == RingKind::mixed) return x == 0 ? 0 : pl_ - x;
  uint64_t r = 0, mul = 1;
  for (int i = 0; i < level_; ++i) {
    uint64_t dx = x % (uint64_t)p_;
    r += (dx == 0 ? 0 : (uint64_t)p_ - dx) * mul;
    x /= (uint64_t)p_;
    mul *= (uint64_t)p_;
  }
  return r;
}

uint64_t Ring::bsub(uint64_t x, uint64_t y) const { return badd(x, bneg(y)); }

uint64_t Ring::bmul(uint64_t x, uint64_t y) const {
  if (kind_ == RingKind::mixed) return (uint64_t)((__uint128_t)x * y % pl_);
  uint64_t dx[40], dy[40], dr[40] = {0};
  for (int i = 0; i < level_; ++i) {
    dx[i] = x % (uint64_t)p_;
    x /= (uint64_t)p_;
    dy[i] = y % (uint64_t)p_;
    y /= (uint64_t)p_;
  }
  for (int i = 0; i < level_; ++i) {
    if (dx[i] == 0) continue;
    for (int j = 0; i + j < level_; ++j)
      dr[i + j] = (dr[i + j] + dx[i] * dy[j]) % (uint64_t)p_;
  }
  uint64_t r = 0, mul = 1;
  for (int i = 0; i < level_; ++i) {
    r += dr[i] * mul;
    mul *= (uint64_t)p_;
  }
  return r;
}

uint64_t Ring::binv(uint64_t x) const {
  if (bval(x) != 0) throw std::runtime_error("base inverse of non-unit");
  if (kind_ == RingKind::mixed) {
    // extended gcd with p^level
    int64_t a = (int64_t)x, m = (int64_t)pl_;
    int64_t g0 = m, g1 = a % m, u0 = 0, u1 = 1;
    while (g1 != 0) {
      int64_t q = g0 / g1;
      int64_t g2 = g0 - q * g1, u2 = u0 - q * u1;
      g0 = g1; g1 = g2; u0 = u1; u1 = u2;
    }
    int64_t u = ((u0 % m) + m) % m;
    return (uint64_t)u;
  }
  uint64_t du[40], dv[40] = {0};
  uint64_t t = x;
  for (int i = 0; i < level_; ++i) {
    du[i] = t % (uint64_t)p_;
    t /= (uint64_t)p_;
  }
  uint64_t inv0 = 1;
  for (uint64_t c = 1; c < (uint64_t)p_; ++c)
    if (c * du[0] % (uint64_t)p_ == 1) { inv0 = c; break; }
  dv[0] = inv0;
  for (int j = 1; j < level_; ++j) {
    uint64_t s = 0;
    for (int i = 1; i <= j; ++i) s = (s + du[i] * dv[j - i]) % (uint64_t)p_;
    dv[j] = s == 0 ? 0 : inv0 * ((uint64_t)p_ - s) % (uint64_t)p_;
  }
  uint64_t r = 0, mul = 1;
  for (int i = 0; i < level_; ++i) {
    r += dv[i] * mul;
    mul *= (uint64_t)p_;
  }
  return r;
}

int Ring::bval(uint64_t x) const {
  if (x == 0) return level_;
  int v = 0;
  while (x % (uint64_t)p_ == 0) {
    x /= (uint64_t)p_;
    ++v;
  }
  // same rule for both kinds: divisibility by p in the packed encoding
  // equals divisibility by the uniformiser
  return v;
}

uint64_t Ring::breduce(uint64_t x, int new_level) const {
  return x % upow((uint64_t)p_, new_level);
}

uint64_t Ring::bdivpi(uint64_t x, int k) const {
  uint64_t pk = upow((uint64_t)p_, k);
  if (x % pk != 0) throw std::runtime_error("div_pi: not divisible");
  return x / pk;
}

uint64_t Ring::bmulpi(uint64_t x, int k) const {
  return (uint64_t)((__uint128_t)x * upow((uint64_t)p_, k) % pl_);
}

// ---- Ring element ops ----

bool Ring::Elem::operator==(const Elem& o) const {
  if (ring != o.ring) return false;
  for (int j = 0; j < ring->deg(); ++j)
    if (c[j] != o.c[j]) return false;
  return true;
}

bool Ring::Elem::operator<(const Elem& o) const {
  for (int j = ring->deg(); j-- > 0;) {
    if (c[j] != o.c[j]) return c[j] < o.c[j];
  }
  return false;
}

uint64_t Ring::size() const { return upow((uint64_t)qa_, level_); }

uint64_t Ring::unit_count() const {
  return upow((uint64_t)qa_, level_ - 1) * (uint64_t)(qa_ - 1);
}

RElem Ring::zero() const {
  Elem x;
  x.ring = this;
  x.c.fill(0);
  return x;
}

RElem Ring::one() const {
  Elem x = zero();
  x.c[0] = 1 % pl_;
  return x;
}

RElem Ring::gen() const {
  Elem x = zero();
  if (d_ == 1) {
    // modulus X - h0: the generator is the scalar h0
    x.c[0] = bneg(h_[0]);
  } else {
    x.c[1] = 1;
  }
  return x;
}

RElem Ring::from_coords(const std::vector<uint64_t>& c) const {
  if ((int)c.size() != d_) throw std::runtime_error("from_coords: size");
  Elem x = zero();
  for (int j = 0; j < d_; ++j) x.c[j] = c[j] % pl_;
  return x;
}

RElem Ring::from_int(int64_t v) const {
  Elem x = zero();
  int64_t m = (int64_t)pl_;
  int64_t w = ((v % m) + m) % m;
  if (kind_ == RingKind::mixed) {
    x.c[0] = (uint64_t)w;
  } else {
    x.c[0] = (uint64_t)(w % p_);  // prime subfield only
  }
  return x;
}

RElem Ring::add(const Elem& x, const Elem& y) const {
  Elem r = zero();
  for (int j = 0; j < d_; ++j) r.c[j] = badd(x.c[j], y.c[j]);
  return r;
}

RElem Ring::sub(const Elem& x, const Elem& y) const {
  Elem r = zero();
  for (int j = 0; j < d_; ++j) r.c[j] = bsub(x.c[j], y.c[j]);
  return r;
}

RElem Ring::neg(const Elem& x) const {
  Elem r = zero();
  for (int j = 0; j < d_; ++j) r.c[j] = bneg(x.c[j]);
  return r;
}

RElem Ring::mul(const Elem& x, const Elem& y) const {
  uint64_t conv[2 * kMaxDeg] = {0};
  for (int i = 0; i < d_; ++i) {
    if (x.c[i] == 0) continue;
    for (int j = 0; j < d_; ++j) {
      if (y.c[j] == 0) continue;
      conv[i + j] = badd(conv[i + j], bmul(x.c[i], y.c[j]));
    }
  }
  Elem r = zero();
  for (int j = 0; j < d_; ++j) r.c[j] = conv[j];
  for (int k = 0; k < d_ - 1; ++k) {
    uint64_t lead = conv[d_ + k];
    if (lead == 0) continue;
    const auto& row = red_[k];
    for (int j = 0; j < d_; ++j) r.c[j] = badd(r.c[j], bmul(lead, row[j]));
  }
  return r;
}

RElem Ring::mul_base(const Elem& x, uint64_t b) const {
  Elem r = zero();
  for (int j = 0; j < d_; ++j) r.c[j] = bmul(x.c[j], b);
  return r;
}

RElem Ring::pow(const Elem& x, uint64_t k) const {
  Elem r = one(), b = x;
  while (k) {
    if (k & 1) r = mul(r, b);
    b = mul(b, b);
    k >>= 1;
  }
  return r;
}

bool Ring::is_zero(const Elem& x) const {
  for (int j = 0; j < d_; ++j)
    if (x.c[j] != 0) return false;
  return true;
}

bool Ring::is_unit(const Elem& x) const { return valuation(x) == 0; }

RElem Ring::inverse(const Elem& x) const {
  if (!is_unit(x)) throw std::runtime_error("Ring: inverse of non-unit");
  // solve (mult-by-x) w = 1 by unit-pivot elimination over the prime ring
  int n = d_;
  std::vector<std::vector<uint64_t>> m(n, std::vector<uint64_t>(n + 1, 0));
  Elem xp = x;
  Elem g = gen();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m[i][j] = xp.c[i];
    if (j + 1 < n) xp = mul(xp, g);
  }
  m[0][n] = 1 % pl_;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (bval(m[i][col]) == 0) { piv = i; break; }
    if (piv < 0) throw std::runtime_error("Ring: inverse pivot failure");
    std::swap(m[col], m[piv]);
    uint64_t inv = binv(m[col][col]);
    for (int j = col; j <= n; ++j) m[col][j] = bmul(m[col][j], inv);
    for (int i = 0; i < n; ++i) {
      if (i == col || m[i][col] == 0) continue;
      uint64_t f = m[i][col];
      for (int j = col; j <= n; ++j)
        m[i][j] = bsub(m[i][j], bmul(f, m[col][j]));
    }
  }
  Elem w = zero();
  for (int i = 0; i < n; ++i) w.c[i] = m[i][n];
  return w;
}

int Ring::valuation(const Elem& x) const {
  int v = level_;
  for (int j = 0; j < d_; ++j) v = std::min(v, bval(x.c[j]));
  return v;
}

RElem Ring::mul_pi(const Elem& x, int k) const {
  Elem r = zero();
  for (int j = 0; j < d_; ++j) r.c[j] = bmulpi(x.c[j], k);
  return r;
}

RElem Ring::div_pi(const Elem& x, int k) const {
  const Ring& target = tower_->ring(level_ - k, a_);
  Elem r = target.zero();
  for (int j = 0; j < d_; ++j) r.c[j] = target.breduce(bdivpi(x.c[j], k), level_ - k);
  return r;
}

RElem Ring::reduce_to(const Elem& x, int new_level) const {
  const Ring& target = tower_->ring(new_level, a_);
  Elem r = target.zero();
  for (int j = 0; j < d_; ++j) r.c[j] = breduce(x.c[j], new_level);
  return r;
}

RElem Ring::lift_to(const Elem& x, int new_level) const {
  const Ring& target = tower_->ring(new_level, a_);
  Elem r = target.zero();
  for (int j = 0; j < d_; ++j) r.c[j] = x.c[j];
  return r;
}

RElem Ring::frobenius_p(const Elem& x) const {
  Elem r = zero();
  for (int j = 0; j < d_; ++j) {
    if (x.c[j] == 0) continue;
    const Coords& col = frob_cols_[j];
    for (int i = 0; i < d_; ++i) r.c[i] = badd(r.c[i], bmul(x.c[j], col[i]));
  }
  return r;
}

RElem Ring::frobenius_q(const Elem& x) const {
  Elem r = x;
  for (int i = 0; i < e_; ++i) r = frobenius_p(r);
  return r;
}

bool Ring::is_rational(const Elem& x) const { return frobenius_q(x) == x; }

RElem Ring::teichmuller(const Elem& residue1) const {
  if (residue1.ring->level() != 1 || residue1.ring->deg() != d_)
    throw std::runtime_error("teichmuller: residue must be level-1, same degree");
  std::vector<uint64_t> key;
  residue1.ring->append_key(residue1, &key);
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = teich_cache_.find(key);
    if (it != teich_cache_.end()) return it->second;
  }
  Elem z = zero();
  for (int j = 0; j < d_; ++j) z.c[j] = residue1.c[j];
  for (int iter = 0; iter < 2 * level_ + 4; ++iter) {
    Elem nz = pow(z, (uint64_t)qa_);
    if (nz == z) {
      std::lock_guard<std::mutex> lock(cache_mu_);
      teich_cache_.emplace(std::move(key), z);
      return z;
    }
    z = nz;
  }
  throw std::runtime_error("teichmuller: did not stabilize");
}

RElem Ring::teichmuller_here(const Elem& x) const {
  return teichmuller(residue(x));
}

bool Ring::is_teichmuller(const Elem& x) const { return pow(x, (uint64_t)qa_) == x; }

uint64_t Ring::trace_abs(const Elem& x) const {
  Elem s = x, fx = x;
  for (int j = 1; j < d_; ++j) {
    fx = frobenius_p(fx);
    s = add(s, fx);
  }
  for (int j = 1; j < d_; ++j)
    if (s.c[j] != 0) throw std::runtime_error("trace_abs: not in prime ring");
  return s.c[0];
}

RElem Ring::trace_F(const Elem& x, int steps) const {
  Elem s = x, fx = x;
  for (int j = 1; j < steps; ++j) {
    fx = frobenius_q(fx);
    s = add(s, fx);
  }
  return s;
}

RElem Ring::norm_F(const Elem& x, int steps) const {
  Elem s = x, fx = x;
  for (int j = 1; j < steps; ++j) {
    fx = frobenius_q(fx);
    s = mul(s, fx);
  }
  return s;
}

namespace {
std::vector<std::pair<uint64_t, int>> factorize(uint64_t n) {
  std::vector<std::pair<uint64_t, int>> f;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    int m = 0;
    while (n % d == 0) { n /= d; ++m; }
    f.push_back({d, m});
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}
}  // namespace

uint64_t Ring::mult_order(const Elem& x) const {
  if (!is_unit(x)) throw std::runtime_error("mult_order: non-unit");
  uint64_t n = unit_count();
  if (!(pow(x, n) == one())) throw std::runtime_error("mult_order: group order mismatch");
  uint64_t ord = n;
  for (auto [q, m] : factorize(n)) {
    for (int i = 0; i < m; ++i) {
      if (pow(x, ord / q) == one())
        ord /= q;
      else
        break;
    }
  }
  return ord;
}

RElem Ring::teich_generator() const {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    if (teich_gen_ready_) return teich_gen_;
  }
  for (const Elem& u : residue_field()) {
    if (u.ring->is_zero(u)) continue;
    Elem t = teichmuller(u);
    if (mult_order(t) == (uint64_t)(qa_ - 1)) {
      std::lock_guard<std::mutex> lock(cache_mu_);
      teich_gen_ = t;
      teich_gen_ready_ = true;
      return t;
    }
  }
  throw std::runtime_error("teich_generator: not found");
}

void Ring::enumerate(const std::function<void(const Elem&)>& f) const {
  Elem x = zero();
  uint64_t total = size();
  for (uint64_t k = 0; k < total; ++k) {
    uint64_t t = k;
    for (int j = 0; j < d_; ++j) {
      x.c[j] = t % pl_;
      t /= pl_;
    }
    f(x);
  }
}

const std::vector<RElem>& Ring::residue_field() const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  if (!residue_field_.empty()) return residue_field_;
  const Ring& r1 = tower_->ring(1, a_);
  r1.enumerate([&](const Elem& x) { residue_field_.push_back(x); });
  return residue_field_;
}

std::string Ring::str(const Elem& x) const {
  std::string s = "(";
  for (int j = 0; j < d_; ++j) {
    if (j) s += ",";
    s += std::to_string(x.c[j]);
  }
  return s + ")";
}

void Ring::append_key(const Elem& x, std::vector<uint64_t>* out) const {
  for (int j = 0; j < d_; ++j) out->push_back(x.c[j]);
}

// ---- RingTower ----

namespace {

// minimal polynomial machinery used during construction: arithmetic in
// base[x]/(mod) where mod is a monic degree-d polynomial over the base
struct RawQuot {
  const Ring* scalars;  // degree-1 ring at the right level: base ops only
  std::vector<uint64_t> mod;  // monic, length d+1

  int deg() const { return (int)mod.size() - 1; }

  std::vector<uint64_t> mul(const std::vector<uint64_t>& x,
                            const std::vector<uint64_t>& y) const {
    int d = deg();
    std::vector<uint64_t> conv(2 * d - 1, 0);
    for (int i = 0; i < d; ++i) {
      if (x[i] == 0) continue;
      for (int j = 0; j < d; ++j)
        conv[i + j] = scalars->badd(conv[i + j], scalars->bmul(x[i], y[j]));
    }
    for (int k = 2 * d - 2; k >= d; --k) {
      uint64_t lead = conv[k];
      if (lead == 0) continue;
      conv[k] = 0;
      for (int j = 0; j < d; ++j)
        conv[k - d + j] = scalars->bsub(conv[k - d + j], scalars->bmul(lead, mod[j]));
    }
    conv.resize(d);
    return conv;
  }

  std::vector<uint64_t> pow(std::vector<uint64_t> x, uint64_t k) const {
    std::vector<uint64_t> r(deg(), 0);
    r[0] = 1;
    while (k) {
      if (k & 1) r = mul(r, x);
      x = mul(x, x);
      k >>= 1;
    }
    return r;
  }
};

}  // namespace

RingTower::RingTower(const RingSpec& spec) : spec_(spec) {
  if (spec.p < 2) throw std::runtime_error("RingTower: p must be >= 2");
  for (int64_t t = 2; t * t <= spec.p; ++t)
    if (spec.p % t == 0) throw std::runtime_error("RingTower: p must be prime");
  if (spec.r < 1 || spec.e < 1 || spec.a < 1)
    throw std::runtime_error("RingTower: bad spec");
}

const Ring& RingTower::ring(int level, int a) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(level, a);
  auto it = rings_.find(key);
  if (it != rings_.end()) return *it->second;
  if (level < 1 || a < 1) throw std::runtime_error("RingTower: bad ring request");

  auto ring = std::unique_ptr<Ring>(new Ring());
  Ring& R = *ring;
  R.tower_ = this;
  R.kind_ = spec_.kind;
  R.p_ = spec_.p;
  R.e_ = spec_.e;
  R.a_ = a;
  R.level_ = level;
  R.d_ = spec_.e * a;
  if (R.d_ > Ring::kMaxDeg) throw std::runtime_error("RingTower: degree too large");
  R.pl_ = upow((uint64_t)spec_.p, level);
  R.q_ = 1;
  for (int i = 0; i < spec_.e; ++i) R.q_ *= spec_.p;
  R.qa_ = 1;
  for (int i = 0; i < R.d_; ++i) R.qa_ *= spec_.p;
  if ((uint64_t)R.qa_ > (uint64_t)1 << 40) throw std::runtime_error("RingTower: field too large");

  int d = R.d_;
  FpPoly g = least_irreducible(spec_.p, d);

  if (spec_.kind == RingKind::equal || level == 1) {
    R.h_.assign(g.begin(), g.end());
    for (auto& c : R.h_) c = (uint64_t)c % (uint64_t)spec_.p;  // digit-0 constants
  } else {
    // Hensel data via the Teichmueller lift of the generator in the naive
    // quotient by a monic lift of g
    RawQuot raw;
    raw.scalars = &R;  // base ops only depend on (kind, p, level)
    raw.mod.assign(g.begin(), g.end());
    std::vector<uint64_t> xi(d, 0);
    if (d == 1) {
      xi[0] = R.bneg(raw.mod[0]);
    } else {
      xi[1] = 1;
    }
    std::vector<uint64_t> tau = xi;
    for (int iter = 0;; ++iter) {
      if (iter > 2 * level + 4) throw std::runtime_error("RingTower: Hensel lift stuck");
      auto nt = raw.pow(tau, (uint64_t)R.qa_);
      if (nt == tau) break;
      tau = nt;
    }
    // h = prod_j (X - tau^{p^j}), computed coefficient-wise in the raw quotient
    std::vector<std::vector<uint64_t>> hc(1, std::vector<uint64_t>(d, 0));
    hc[0][0] = 1;  // constant polynomial 1
    std::vector<uint64_t> root = tau;
    for (int j = 0; j < d; ++j) {
      std::vector<std::vector<uint64_t>> nh(hc.size() + 1, std::vector<uint64_t>(d, 0));
      for (size_t i = 0; i < hc.size(); ++i) {
        nh[i + 1] = hc[i];  // X * hc
        auto t = raw.mul(root, hc[i]);
        for (int k = 0; k < d; ++k) nh[i][k] = R.bsub(nh[i][k], t[k]);
      }
      hc = std::move(nh);
      root = raw.pow(root, (uint64_t)spec_.p);
    }
    R.h_.resize(d + 1);
    for (int i = 0; i <= d; ++i) {
      for (int k = 1; k < d; ++k)
        if (hc[i][k] != 0) throw std::runtime_error("RingTower: modulus not rational");
      R.h_[i] = hc[i][0];
    }
    if (R.h_[d] != 1) throw std::runtime_error("RingTower: modulus not monic");
  }

  // reduction rows x^{d+k} mod h for k = 0..d-2
  R.red_.assign(std::max(0, d - 1), {});
  std::array<uint64_t, Ring::kMaxDeg> cur{};
  // x^d = -(h_0 + h_1 x + ...)
  for (int j = 0; j < d; ++j) cur[j] = R.bneg(R.h_[j]);
  for (int k = 0; k < d - 1; ++k) {
    R.red_[k] = cur;
    if (k + 1 < d - 1) {
      // multiply by x: shift and reduce once
      std::array<uint64_t, Ring::kMaxDeg> nxt{};
      uint64_t lead = cur[d - 1];
      for (int j = d - 1; j >= 1; --j) nxt[j] = cur[j - 1];
      nxt[0] = 0;
      if (lead != 0)
        for (int j = 0; j < d; ++j)
          nxt[j] = R.badd(nxt[j], R.bmul(lead, R.bneg(R.h_[j])));
      cur = nxt;
    }
  }

  // Frobenius columns: (x^p)^j
  R.frob_cols_.resize(d);
  {
    RElem xp = R.pow(R.gen(), (uint64_t)spec_.p);
    RElem acc = R.one();
    for (int j = 0; j < d; ++j) {
      R.frob_cols_[j] = acc.c;
      if (j + 1 < d) acc = R.mul(acc, xp);
    }
  }

  const Ring& ref = *ring;
  rings_.emplace(key, std::move(ring));
  return ref;
}

const RingTower::EmbedData& RingTower::embed_data(int level, int b, int a) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = embeds_.find(std::make_tuple(level, b, a));
    if (it != embeds_.end()) return *it->second;
  }
  if (a % b != 0) throw std::runtime_error("embed: degrees incompatible");
  const Ring& S = ring(level, b);
  const Ring& B = ring(level, a);
  auto ed = std::make_unique<EmbedData>();

  // root of the small residue modulus in the big residue field
  FpPoly gs = least_irreducible(spec_.p, S.deg());
  const Ring& B1 = ring(1, a);
  RElem root1 = B1.zero();
  bool found = false;
  for (const RElem& u : B.residue_field()) {
    RElem acc = B1.zero();
    RElem up = B1.one();
    for (size_t i = 0; i < gs.size(); ++i) {
      acc = B1.add(acc, B1.mul_base(up, (uint64_t)gs[i] % (uint64_t)spec_.p));
      up = B1.mul(up, u);
    }
    if (B1.is_zero(acc)) {
      root1 = u;
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("embed: no residue root");
  ed->root_image = B.teichmuller(root1);
  // exact root check against the small modulus
  {
    RElem acc = B.zero(), up = B.one();
    for (size_t i = 0; i < S.modulus().size(); ++i) {
      acc = B.add(acc, B.mul_base(up, S.modulus()[i]));
      if (i + 1 < S.modulus().size()) up = B.mul(up, ed->root_image);
    }
    if (!B.is_zero(acc)) throw std::runtime_error("embed: Hensel root mismatch");
  }

  // forward matrix: column j = coords of root_image^j
  ed->fwd.assign(S.deg(), std::vector<uint64_t>(B.deg(), 0));
  RElem acc = B.one();
  for (int j = 0; j < S.deg(); ++j) {
    for (int i = 0; i < B.deg(); ++i) ed->fwd[j][i] = acc.c[i];
    if (j + 1 < S.deg()) acc = B.mul(acc, ed->root_image);
  }

  // section: pick S.deg() rows giving a unit-pivot invertible submatrix;
  // store its inverse and the row selection
  int ds = S.deg(), db = B.deg();
  std::vector<std::vector<uint64_t>> work(db, std::vector<uint64_t>(ds, 0));
  for (int i = 0; i < db; ++i)
    for (int j = 0; j < ds; ++j) work[i][j] = ed->fwd[j][i];
  std::vector<int> chosen;
  std::vector<std::vector<uint64_t>> sub;
  {
    // greedy row selection by elimination on a copy
    std::vector<std::vector<uint64_t>> w = work;
    std::vector<bool> used(db, false);
    for (int col = 0; col < ds; ++col) {
      int piv = -1;
      for (int i = 0; i < db; ++i) {
        if (used[i]) continue;
        if (w[i][col] % (uint64_t)spec_.p != 0) { piv = i; break; }
      }
      if (piv < 0) throw std::runtime_error("embed: section pivot failure");
      used[piv] = true;
      chosen.push_back(piv);
      uint64_t inv = B.binv(w[piv][col]);
      for (int j = 0; j < ds; ++j) w[piv][j] = B.bmul(w[piv][j], inv);
      for (int i = 0; i < db; ++i) {
        if (i == piv || w[i][col] == 0) continue;
        uint64_t f = w[i][col];
        for (int j = 0; j < ds; ++j) w[i][j] = B.bsub(w[i][j], B.bmul(f, w[piv][j]));
      }
    }
    sub.assign(ds, std::vector<uint64_t>(ds, 0));
    for (int i = 0; i < ds; ++i)
      for (int j = 0; j < ds; ++j) sub[i][j] = work[chosen[i]][j];
  }
  // invert sub by Gauss-Jordan with unit pivots
  {
    int n = ds;
    std::vector<std::vector<uint64_t>> m(n, std::vector<uint64_t>(2 * n, 0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m[i][j] = sub[i][j];
      m[i][n + i] = 1;
    }
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int i = col; i < n; ++i)
        if (m[i][col] % (uint64_t)spec_.p != 0) { piv = i; break; }
      if (piv < 0) throw std::runtime_error("embed: inverse pivot failure");
      std::swap(m[col], m[piv]);
      uint64_t inv = B.binv(m[col][col]);
      for (int j = 0; j < 2 * n; ++j) m[col][j] = B.bmul(m[col][j], inv);
      for (int i = 0; i < n; ++i) {
        if (i == col || m[i][col] == 0) continue;
        uint64_t f = m[i][col];
        for (int j = 0; j < 2 * n; ++j) m[i][j] = B.bsub(m[i][j], B.bmul(f, m[col][j]));
      }
    }
    ed->sec.assign(n, std::vector<uint64_t>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ed->sec[i][j] = m[i][n + j];
    ed->sec_perm = chosen;
  }

  std::lock_guard<std::mutex> lock(mu_);
  auto res = embeds_.emplace(std::make_tuple(level, b, a), std::move(ed));
  return *res.first->second;
}

RElem RingTower::embed(const RElem& x, const Ring& to) const {
  const Ring& from = *x.ring;
  if (&from == &to) return x;
  if (from.level() != to.level()) throw std::runtime_error("embed: level mismatch");
  const EmbedData& ed = embed_data(from.level(), from.a(), to.a());
  RElem r = to.zero();
  for (int j = 0; j < from.deg(); ++j) {
    if (x.c[j] == 0) continue;
    for (int i = 0; i < to.deg(); ++i)
      r.c[i] = to.badd(r.c[i], to.bmul(x.c[j], ed.fwd[j][i]));
  }
  return r;
}

bool RingTower::try_project(const RElem& x, const Ring& to, RElem* out) const {
  const Ring& from = *x.ring;
  if (&from == &to) {
    *out = x;
    return true;
  }
  if (from.level() != to.level()) throw std::runtime_error("project: level mismatch");
  const EmbedData& ed = embed_data(from.level(), to.a(), from.a());
  int ds = to.deg();
  RElem r = to.zero();
  for (int i = 0; i < ds; ++i) {
    uint64_t v = 0;
    for (int j = 0; j < ds; ++j)
      v = to.badd(v, to.bmul(ed.sec[i][j], x.c[ed.sec_perm[j]]));
    r.c[i] = v;
  }
  if (!(embed(r, from) == x)) return false;
  *out = r;
  return true;
}

RElem RingTower::project(const RElem& x, const Ring& to) const {
  RElem r;
  if (!try_project(x, to, &r)) throw std::runtime_error("project: not in subring");
  return r;
}

const RingTower::RelData& RingTower::rel_data(int level, int a) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = rels_.find(std::make_pair(level, a));
    if (it != rels_.end()) return *it->second;
  }
  const Ring& A = ring(level, a);
  const Ring& O = ring(level, 1);
  int n = A.deg();
  // basis matrix: columns (j,k) -> coords of embed(gen_O^k) * gen_A^j
  std::vector<std::vector<uint64_t>> m(n, std::vector<uint64_t>(n, 0));
  RElem xj = A.one();
  for (int j = 0; j < a; ++j) {
    RElem zk = O.one();
    for (int k = 0; k < O.deg(); ++k) {
      RElem v = A.mul(xj, embed(zk, A));
      int col = j * O.deg() + k;
      for (int i = 0; i < n; ++i) m[i][col] = v.c[i];
      if (k + 1 < O.deg()) zk = O.mul(zk, O.gen());
    }
    if (j + 1 < a) xj = A.mul(xj, A.gen());
  }
  // invert
  auto rd = std::make_unique<RelData>();
  {
    std::vector<std::vector<uint64_t>> w(n, std::vector<uint64_t>(2 * n, 0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) w[i][j] = m[i][j];
      w[i][n + i] = 1;
    }
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int i = col; i < n; ++i)
        if (w[i][col] % (uint64_t)spec_.p != 0) { piv = i; break; }
      if (piv < 0) throw std::runtime_error("rel_data: pivot failure");
      std::swap(w[col], w[piv]);
      uint64_t inv = A.binv(w[col][col]);
      for (int j = 0; j < 2 * n; ++j) w[col][j] = A.bmul(w[col][j], inv);
      for (int i = 0; i < n; ++i) {
        if (i == col || w[i][col] == 0) continue;
        uint64_t f = w[i][col];
        for (int j = 0; j < 2 * n; ++j) w[i][j] = A.bsub(w[i][j], A.bmul(f, w[col][j]));
      }
    }
    rd->inv.assign(n, std::vector<uint64_t>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rd->inv[i][j] = w[i][n + j];
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto res = rels_.emplace(std::make_pair(level, a), std::move(rd));
  return *res.first->second;
}

std::vector<RElem> RingTower::rel_coords(const RElem& x) const {
  const Ring& A = *x.ring;
  const Ring& O = ring(A.level(), 1);
  const RelData& rd = rel_data(A.level(), A.a());
  int n = A.deg();
  std::vector<uint64_t> c(n, 0);
  for (int i = 0; i < n; ++i) {
    uint64_t v = 0;
    for (int j = 0; j < n; ++j) v = A.badd(v, A.bmul(rd.inv[i][j], x.c[j]));
    c[i] = v;
  }
  std::vector<RElem> out;
  for (int j = 0; j < A.a(); ++j) {
    std::vector<uint64_t> coords(O.deg());
    for (int k = 0; k < O.deg(); ++k) coords[k] = c[j * O.deg() + k];
    out.push_back(O.from_coords(coords));
  }
  return out;
}

RElem RingTower::rel_eval(const std::vector<RElem>& c, const Ring& to) const {
  RElem acc = to.zero();
  RElem xj = to.one();
  for (size_t j = 0; j < c.size(); ++j) {
    acc = to.add(acc, to.mul(xj, embed(c[j], to)));
    if (j + 1 < c.size()) xj = to.mul(xj, to.gen());
  }
  return acc;
}

}  // namespace dlr
