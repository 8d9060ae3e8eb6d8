#include "dlr/cyclo.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace dlr {

uint32_t euler_phi(uint32_t n) {
  uint32_t result = n;
  for (uint32_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

namespace {

// Exact division of integer polynomials, remainder must vanish.
std::vector<int64_t> poly_div_exact(std::vector<int64_t> a, const std::vector<int64_t>& b) {
  if (b.empty() || b.back() == 0) throw std::runtime_error("poly_div_exact: bad divisor");
  if (a.size() < b.size()) throw std::runtime_error("poly_div_exact: degree");
  std::vector<int64_t> q(a.size() - b.size() + 1, 0);
  for (size_t i = q.size(); i-- > 0;) {
    int64_t lead = a[i + b.size() - 1];
    if (lead % b.back() != 0) throw std::runtime_error("poly_div_exact: not divisible");
    int64_t c = lead / b.back();
    q[i] = c;
    for (size_t j = 0; j < b.size(); ++j)
      a[i + j] = checked_add(a[i + j], -checked_mul(c, b[j]));
  }
  for (int64_t v : a)
    if (v != 0) throw std::runtime_error("poly_div_exact: nonzero remainder");
  return q;
}

std::vector<int64_t> cyclotomic_poly(uint32_t N, const std::map<uint32_t, std::vector<int64_t>>& lower) {
  // (x^N - 1) / prod_{d | N, d < N} Phi_d
  std::vector<int64_t> f(N + 1, 0);
  f[0] = -1;
  f[N] = 1;
  for (uint32_t d = 1; d < N; ++d) {
    if (N % d != 0) continue;
    f = poly_div_exact(std::move(f), lower.at(d));
  }
  return f;
}

struct ConductorCache {
  std::mutex mu;
  std::map<uint32_t, std::vector<int64_t>> polys;
  std::map<uint32_t, std::unique_ptr<ConductorData>> data;

  const std::vector<int64_t>& poly(uint32_t N) {
    auto it = polys.find(N);
    if (it != polys.end()) return it->second;
    for (uint32_t d = 1; d < N; ++d)
      if (N % d == 0 && !polys.count(d)) poly(d);
    auto p = cyclotomic_poly(N, polys);
    return polys.emplace(N, std::move(p)).first->second;
  }

  const ConductorData& get(uint32_t N) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = data.find(N);
    if (it != data.end()) return *it->second;
    auto cd = std::make_unique<ConductorData>();
    cd->N = N;
    cd->phi = euler_phi(N);
    cd->cyclo_poly = poly(N);
    uint32_t phi = cd->phi;
    uint32_t emax = std::max<uint32_t>(N, 2 * phi > 0 ? 2 * phi - 1 : 1);
    cd->rewrite.resize(emax);
    for (uint32_t e = 0; e < emax; ++e) {
      std::vector<int64_t> row(phi, 0);
      if (e < phi) {
        row[e] = 1;
      } else {
        // x^e = x^{e-phi} * (-(Phi_N - x^phi)) rewritten through lower rows
        for (uint32_t j = 0; j < phi; ++j) {
          int64_t c = cd->cyclo_poly[j];
          if (c == 0) continue;
          const auto& lo = cd->rewrite[e - phi + j];
          for (uint32_t k = 0; k < phi; ++k)
            row[k] = checked_add(row[k], -checked_mul(c, lo[k]));
        }
      }
      cd->rewrite[e] = std::move(row);
    }
    const ConductorData& ref = *cd;
    data.emplace(N, std::move(cd));
    return ref;
  }
};

ConductorCache& cache() {
  static ConductorCache c;
  return c;
}

int64_t vec_content(const std::vector<int64_t>& v, int64_t den) {
  int64_t g = den < 0 ? -den : den;
  for (int64_t x : v) {
    g = std::gcd(g, x < 0 ? -x : x);
    if (g == 1) break;
  }
  return g == 0 ? 1 : g;
}

}  // namespace

const ConductorData& conductor_data(uint32_t N) { return cache().get(N); }

void CycloNum::normalize() {
  if (den_ == 0) throw std::runtime_error("CycloNum: zero denominator");
  if (den_ < 0) {
    den_ = -den_;
    for (auto& x : num_) x = -x;
  }
  int64_t g = vec_content(num_, den_);
  if (g > 1) {
    den_ /= g;
    for (auto& x : num_) x /= g;
  }
  bool zero = true;
  for (int64_t x : num_)
    if (x != 0) { zero = false; break; }
  if (zero) den_ = 1;
}

CycloNum CycloNum::root_of_unity(uint32_t N, int64_t k) {
  const auto& cd = conductor_data(N);
  k %= (int64_t)N;
  if (k < 0) k += N;
  std::vector<int64_t> num(cd.rewrite[(size_t)k]);
  return CycloNum(N, 1, std::move(num));
}

CycloNum CycloNum::from_root_histogram(uint32_t N, const std::vector<int64_t>& counts) {
  const auto& cd = conductor_data(N);
  if (counts.size() != N) throw std::runtime_error("from_root_histogram: size");
  std::vector<__int128> acc(cd.phi, 0);
  for (uint32_t k = 0; k < N; ++k) {
    if (counts[k] == 0) continue;
    const auto& row = cd.rewrite[k];
    for (uint32_t j = 0; j < cd.phi; ++j) acc[j] += (__int128)counts[k] * row[j];
  }
  std::vector<int64_t> num(cd.phi);
  for (uint32_t j = 0; j < cd.phi; ++j) {
    if (acc[j] > INT64_MAX || acc[j] < INT64_MIN) throw overflow_error("histogram overflow");
    num[j] = (int64_t)acc[j];
  }
  return CycloNum(N, 1, std::move(num));
}

bool CycloNum::is_zero() const {
  for (int64_t x : num_)
    if (x != 0) return false;
  return true;
}

bool CycloNum::is_rational() const {
  for (size_t j = 1; j < num_.size(); ++j)
    if (num_[j] != 0) return false;
  return true;
}

Rat CycloNum::as_rat() const {
  if (!is_rational()) throw std::runtime_error("CycloNum: not rational: " + str());
  return Rat(num_.empty() ? 0 : num_[0], den_);
}

int64_t CycloNum::as_integer() const {
  Rat r = as_rat();
  if (r.den != 1) throw std::runtime_error("CycloNum: not an integer: " + str());
  return r.num;
}

CycloNum CycloNum::promoted(uint32_t M) const {
  if (M == n_) return *this;
  if (M % n_ != 0) throw std::runtime_error("CycloNum: bad promotion");
  const auto& cd = conductor_data(M);
  uint32_t step = M / n_;
  std::vector<__int128> acc(cd.phi, 0);
  for (size_t j = 0; j < num_.size(); ++j) {
    if (num_[j] == 0) continue;
    const auto& row = cd.rewrite[j * step];
    for (uint32_t k = 0; k < cd.phi; ++k) acc[k] += (__int128)num_[j] * row[k];
  }
  std::vector<int64_t> num(cd.phi);
  for (uint32_t k = 0; k < cd.phi; ++k) {
    if (acc[k] > INT64_MAX || acc[k] < INT64_MIN) throw overflow_error("promotion overflow");
    num[k] = (int64_t)acc[k];
  }
  return CycloNum(M, den_, std::move(num));
}

CycloNum operator+(const CycloNum& a, const CycloNum& b) {
  uint32_t M = std::lcm(a.n_, b.n_);
  CycloNum x = a.promoted(M), y = b.promoted(M);
  int64_t g = std::gcd(x.den_, y.den_);
  int64_t fx = y.den_ / g, fy = x.den_ / g;
  std::vector<int64_t> num(x.num_.size());
  for (size_t j = 0; j < num.size(); ++j)
    num[j] = checked_add(checked_mul(x.num_[j], fx), checked_mul(y.num_[j], fy));
  return CycloNum(M, checked_mul(x.den_, fx), std::move(num));
}

CycloNum operator-(const CycloNum& a) {
  CycloNum r = a;
  for (auto& x : r.num_) x = -x;
  return r;
}

CycloNum operator-(const CycloNum& a, const CycloNum& b) { return a + (-b); }

CycloNum operator*(const CycloNum& a, const CycloNum& b) {
  uint32_t M = std::lcm(a.n_, b.n_);
  CycloNum x = a.promoted(M), y = b.promoted(M);
  const auto& cd = conductor_data(M);
  uint32_t phi = cd.phi;
  std::vector<__int128> conv(2 * phi > 0 ? 2 * phi - 1 : 1, 0);
  for (uint32_t i = 0; i < phi; ++i) {
    if (x.num_[i] == 0) continue;
    for (uint32_t j = 0; j < phi; ++j) {
      if (y.num_[j] == 0) continue;
      conv[i + j] += (__int128)x.num_[i] * y.num_[j];
    }
  }
  std::vector<__int128> acc(phi, 0);
  for (uint32_t e = 0; e < conv.size(); ++e) {
    if (conv[e] == 0) continue;
    if (e < phi) {
      acc[e] += conv[e];
    } else {
      const auto& row = cd.rewrite[e];
      for (uint32_t k = 0; k < phi; ++k)
        if (row[k] != 0) acc[k] += conv[e] * row[k];
    }
  }
  std::vector<int64_t> num(phi);
  for (uint32_t k = 0; k < phi; ++k) {
    if (acc[k] > INT64_MAX || acc[k] < INT64_MIN) throw overflow_error("mul overflow");
    num[k] = (int64_t)acc[k];
  }
  return CycloNum(M, checked_mul(x.den_, y.den_), std::move(num));
}

CycloNum CycloNum::scaled(const Rat& r) const {
  std::vector<int64_t> num(num_.size());
  for (size_t j = 0; j < num.size(); ++j) num[j] = checked_mul(num_[j], r.num);
  return CycloNum(n_, checked_mul(den_, r.den), std::move(num));
}

CycloNum CycloNum::conj() const {
  const auto& cd = conductor_data(n_);
  std::vector<__int128> acc(cd.phi, 0);
  for (size_t j = 0; j < num_.size(); ++j) {
    if (num_[j] == 0) continue;
    uint32_t e = j == 0 ? 0 : n_ - (uint32_t)j;
    const auto& row = cd.rewrite[e];
    for (uint32_t k = 0; k < cd.phi; ++k) acc[k] += (__int128)num_[j] * row[k];
  }
  std::vector<int64_t> num(cd.phi);
  for (uint32_t k = 0; k < cd.phi; ++k) {
    if (acc[k] > INT64_MAX || acc[k] < INT64_MIN) throw overflow_error("conj overflow");
    num[k] = (int64_t)acc[k];
  }
  return CycloNum(n_, den_, std::move(num));
}

Rat CycloNum::abs2() const { return (*this * conj()).as_rat(); }

namespace {
// polynomial arithmetic over Rat for the inverse path
using RPoly = std::vector<Rat>;

void rp_trim(RPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

RPoly rp_rem(RPoly a, const RPoly& b) {
  rp_trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rat c = a.back() / b.back();
    size_t off = a.size() - b.size();
    for (size_t j = 0; j < b.size(); ++j) a[off + j] -= c * b[j];
    rp_trim(a);
  }
  return a;
}
}  // namespace

CycloNum CycloNum::inverse() const {
  if (is_zero()) throw std::runtime_error("CycloNum: inverse of zero");
  // extended Euclid: s*f + t*Phi_N = gcd = const
  const auto& cd = conductor_data(n_);
  RPoly f(num_.size());
  for (size_t j = 0; j < num_.size(); ++j) f[j] = Rat(num_[j], den_);
  rp_trim(f);
  RPoly g(cd.cyclo_poly.size());
  for (size_t j = 0; j < g.size(); ++j) g[j] = Rat(cd.cyclo_poly[j]);
  RPoly r0 = g, r1 = f;
  RPoly s0 = {Rat(0)}, s1 = {Rat(1)};  // coefficients of f
  while (true) {
    rp_trim(r1);
    if (r1.empty()) throw std::runtime_error("CycloNum: inverse failed");
    if (r1.size() == 1) break;
    // quotient of r0 by r1
    RPoly q(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 0, Rat(0));
    RPoly rem = r0;
    while (rem.size() >= r1.size() && !rem.empty()) {
      Rat c = rem.back() / r1.back();
      size_t off = rem.size() - r1.size();
      q[off] = c;
      for (size_t j = 0; j < r1.size(); ++j) rem[off + j] -= c * r1[j];
      rp_trim(rem);
    }
    // (r0, r1) <- (r1, rem); (s0, s1) <- (s1, s0 - q*s1)
    RPoly qs(q.size() + s1.size(), Rat(0));
    for (size_t i = 0; i < q.size(); ++i)
      for (size_t j = 0; j < s1.size(); ++j) qs[i + j] += q[i] * s1[j];
    RPoly s2(std::max(s0.size(), qs.size()), Rat(0));
    for (size_t j = 0; j < s0.size(); ++j) s2[j] += s0[j];
    for (size_t j = 0; j < qs.size(); ++j) s2[j] -= qs[j];
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  Rat c = r1[0];
  RPoly inv = rp_rem(std::move(s1), g);
  // result = inv / c
  CycloNum out(n_, 1, std::vector<int64_t>(cd.phi, 0));
  int64_t den = 1;
  for (const Rat& x : inv) den = checked_mul(den / std::gcd(den, x.den), x.den);
  den = checked_mul(den, c.num < 0 ? -c.num : c.num);
  std::vector<int64_t> num(cd.phi, 0);
  for (size_t j = 0; j < inv.size(); ++j) {
    Rat v = inv[j] / c;
    num[j] = checked_mul(v.num, den / v.den);
  }
  return CycloNum(n_, den, std::move(num));
}

CycloNum CycloNum::pow(int64_t k) const {
  if (k < 0) return inverse().pow(-k);
  CycloNum r = CycloNum::one(), b = *this;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

bool operator==(const CycloNum& a, const CycloNum& b) {
  uint32_t M = std::lcm(a.n_, b.n_);
  CycloNum x = a.promoted(M), y = b.promoted(M);
  return x.den_ == y.den_ && x.num_ == y.num_;
}

bool CycloNum::as_root_of_unity(uint32_t* order, uint32_t* exponent) const {
  if (den_ != 1) return false;
  // roots of unity in Q(zeta_N) have order dividing L = lcm(2, N)
  uint32_t L = n_ % 2 == 0 ? n_ : 2 * n_;
  for (uint32_t k = 0; k < L; ++k) {
    CycloNum cand = n_ % 2 == 0
                        ? CycloNum::root_of_unity(n_, k)
                        : (k % 2 == 0 ? CycloNum::root_of_unity(n_, (uint32_t)(((uint64_t)(k / 2)) % n_))
                                      : -CycloNum::root_of_unity(n_, (uint32_t)(((uint64_t)k * ((n_ + 1) / 2)) % n_)));
    if (cand == *this) {
      uint32_t g = std::gcd(k, L);
      *order = L / g;
      *exponent = k / g;
      return true;
    }
  }
  return false;
}

std::string CycloNum::str() const {
  std::string s = std::to_string(n_) + ":[";
  for (size_t j = 0; j < num_.size(); ++j) {
    if (j) s += ",";
    s += Rat(num_[j], den_).str();
  }
  s += "]";
  return s;
}

}  // namespace dlr
