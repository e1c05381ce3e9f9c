#include "newform/field.hpp"

#include <algorithm>
#include <sstream>

#include "newform/errors.hpp"

namespace newform {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    if (n % d == 0) return n == d;
  }
  for (std::uint64_t d = 17; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) { return a / gcd_u64(a, b) * b; }

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

namespace {

// polynomials over F_p, low to high, trimmed
using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, std::uint32_t p) {
  trim(a);
  std::uint32_t lead_inv = 1;
  {
    std::uint64_t b = m.back(), e = p - 2, r = 1;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    lead_inv = static_cast<std::uint32_t>(r);
  }
  while (a.size() >= m.size()) {
    std::uint64_t c = std::uint64_t(a.back()) * lead_inv % p;
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) {
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - c * m[i] % p) % p);
    }
    trim(a);
  }
  return a;
}

bool irreducible(const Poly& f, std::uint32_t p) {
  const std::size_t k = f.size() - 1;
  if (k <= 1) return k == 1;
  // trial division by all monic polys of degree 1..k/2
  for (std::size_t d = 1; d <= k / 2; ++d) {
    std::uint64_t count = ipow(p, static_cast<unsigned>(d));
    for (std::uint64_t code = 0; code < count; ++code) {
      Poly g(d + 1);
      std::uint64_t c = code;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      g[d] = 1;
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace

Field Field::make(std::uint32_t p, unsigned k, std::vector<std::uint32_t> poly, std::uint64_t q_bound) {
  if (!is_prime(p)) throw NonPrimeCharacteristic("characteristic " + std::to_string(p) + " is not prime");
  if (k == 0) throw InvalidArgument("extension degree must be positive");
  std::uint64_t q = 1;
  for (unsigned i = 0; i < k; ++i) {
    q *= p;
    if (q > q_bound) throw InvalidArgument("field size exceeds bound " + std::to_string(q_bound));
  }
  Field F;
  F.p_ = p;
  F.k_ = k;
  F.q_ = static_cast<std::uint32_t>(q);
  if (poly.empty()) {
    if (k == 1) {
      poly = {0, 1};
    } else {
      // lexicographic on (c_{k-1}, ..., c_0) read as a base-p number
      bool found = false;
      for (std::uint64_t code = 0; code < q && !found; ++code) {
        Poly f(k + 1);
        std::uint64_t c = code;
        for (unsigned i = 0; i < k; ++i) {
          f[i] = static_cast<std::uint32_t>(c % p);
          c /= p;
        }
        f[k] = 1;
        if (irreducible(f, p)) {
          poly = f;
          found = true;
        }
      }
      if (!found) throw SearchBudgetExceeded("no irreducible polynomial found");
    }
  } else {
    if (poly.size() != k + 1 || poly.back() % p != 1)
      throw ReduciblePolynomial("defining polynomial must be monic of degree k");
    for (auto& c : poly) c %= p;
    if (!irreducible(poly, p)) throw ReduciblePolynomial("defining polynomial is reducible over F_p");
  }
  F.poly_ = poly;

  if (q <= 256) {
    F.add_.resize(q * q);
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b) {
        fq_t s = 0, pw = 1;
        std::uint32_t x = a, y = b;
        for (unsigned i = 0; i < k; ++i) {
          s += ((x % p + y % p) % p) * pw;
          x /= p;
          y /= p;
          pw *= p;
        }
        F.add_[a * q + b] = static_cast<std::uint8_t>(s);
      }
  }

  // log/exp tables from a primitive element
  F.exp_.assign(q, 0);
  F.log_.assign(q, 0);
  if (q == 2) {
    F.exp_[0] = 1;
    F.exp_[1] = 1;
    return F;
  }
  for (fq_t g = 2 <= q - 1 ? 2 : 1; g < q; ++g) {
    std::vector<fq_t> e;
    e.reserve(q - 1);
    fq_t x = 1;
    do {
      e.push_back(x);
      x = F.slow_mul(x, g);
    } while (x != 1 && e.size() < q);
    if (e.size() == q - 1) {
      for (std::uint32_t i = 0; i < q - 1; ++i) {
        F.exp_[i] = e[i];
        F.log_[e[i]] = i;
      }
      F.exp_[q - 1] = 1;
      return F;
    }
  }
  throw SearchBudgetExceeded("no primitive element");
}

std::string Field::descriptor() const {
  std::ostringstream s;
  s << "p=" << p_ << ";k=" << k_ << ";poly=";
  for (std::size_t i = 0; i < poly_.size(); ++i) s << (i ? "," : "") << poly_[i];
  return s.str();
}

std::vector<std::uint32_t> Field::coefficients(fq_t a) const {
  std::vector<std::uint32_t> c(k_);
  for (unsigned i = 0; i < k_; ++i) {
    c[i] = a % p_;
    a /= p_;
  }
  return c;
}

fq_t Field::from_coefficients(const std::vector<std::uint32_t>& c) const {
  fq_t a = 0, pw = 1;
  for (unsigned i = 0; i < k_ && i < c.size(); ++i) {
    a += (c[i] % p_) * pw;
    pw *= p_;
  }
  return a;
}

fq_t Field::slow_mul(fq_t a, fq_t b) const {
  auto x = coefficients(a), y = coefficients(b);
  Poly prod(2 * k_, 0);
  for (unsigned i = 0; i < k_; ++i)
    for (unsigned j = 0; j < k_; ++j)
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t(x[i]) * y[j]) % p_);
  return from_coefficients(poly_mod(prod, poly_, p_));
}

fq_t Field::add(fq_t a, fq_t b) const {
  if (!add_.empty()) return add_[a * q_ + b];
  if (k_ == 1) return (a + b) % p_;
  fq_t s = 0, pw = 1;
  for (unsigned i = 0; i < k_; ++i) {
    s += ((a % p_ + b % p_) % p_) * pw;
    a /= p_;
    b /= p_;
    pw *= p_;
  }
  return s;
}

fq_t Field::neg(fq_t a) const {
  fq_t s = 0, pw = 1;
  for (unsigned i = 0; i < k_; ++i) {
    s += ((p_ - a % p_) % p_) * pw;
    a /= p_;
    pw *= p_;
  }
  return s;
}

fq_t Field::sub(fq_t a, fq_t b) const { return add(a, neg(b)); }

fq_t Field::inv(fq_t a) const {
  if (a == 0) throw SingularMatrix("inverse of zero in F_q");
  if (q_ == 2) return 1;
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

fq_t Field::pow(fq_t a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (q_ == 2) return 1;
  return exp_[(std::uint64_t(log_[a]) * (e % (q_ - 1))) % (q_ - 1)];
}

fq_t Field::from_int(std::int64_t v) const {
  std::int64_t r = v % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return static_cast<fq_t>(r);
}

std::uint32_t Field::trace(fq_t a) const {
  fq_t s = 0, x = a;
  for (unsigned i = 0; i < k_; ++i) {
    s = add(s, x);
    x = frobenius(x);
  }
  return s;  // lies in the prime field, i.e. < p
}

std::uint64_t ModField::pow(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t r = 1 % ell_;
  a %= ell_;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t ModField::inv(std::uint64_t a) const {
  if (a % ell_ == 0) throw SingularMatrix("inverse of zero in F_l");
  return pow(a, ell_ - 2);
}

std::uint64_t ModField::from_int(std::int64_t v) const {
  std::int64_t r = v % static_cast<std::int64_t>(ell_);
  if (r < 0) r += static_cast<std::int64_t>(ell_);
  return static_cast<std::uint64_t>(r);
}

std::uint64_t ModField::root_of_unity(std::uint64_t d) const {
  if (d == 0 || order_ % d) throw InvalidArgument("root order does not divide M");
  return pow(zeta_, order_ / d);
}

std::uint64_t gl_order(unsigned n, std::uint64_t q) {
  unsigned __int128 order = 1;
  unsigned __int128 qn = 1;
  for (unsigned i = 0; i < n; ++i) qn *= q;
  unsigned __int128 qi = 1;
  for (unsigned i = 0; i < n; ++i) {
    order *= (qn - qi);
    qi *= q;
    if (order >> 62) throw EnumerationBoundExceeded("|GL_n(F_q)| overflows");
  }
  return static_cast<std::uint64_t>(order);
}

std::uint64_t gl_exponent(unsigned n, std::uint32_t p, std::uint64_t q) {
  std::uint64_t e = 1, qi = 1;
  for (unsigned i = 1; i <= n; ++i) {
    qi *= q;
    e = lcm_u64(e, qi - 1);
  }
  // unipotent part: smallest power of p that is >= n
  std::uint64_t pe = 1;
  while (pe < n) pe *= p;
  return e * pe;
}

ModField make_computation_field(unsigned n, const Field& F, std::uint64_t search_bound) {
  const std::uint64_t order = gl_order(n, F.q());
  const std::uint64_t M = lcm_u64(gl_exponent(n, F.p(), F.q()), F.p());
  std::uint64_t ell = 0;
  for (std::uint64_t c = M + 1; c <= search_bound; c += M) {
    if (c > order && is_prime(c)) {
      ell = c;
      break;
    }
  }
  if (!ell) throw SearchBudgetExceeded("no prime l = 1 mod M below the search bound");
  ModField tmp(ell, M, 1);
  const auto factors = prime_factors(M);
  for (std::uint64_t a = 2; a < ell; ++a) {
    std::uint64_t z = tmp.pow(a, (ell - 1) / M);
    bool ok = tmp.pow(z, M) == 1;
    for (auto r : factors)
      if (tmp.pow(z, M / r) == 1) ok = false;
    if (ok) return ModField(ell, M, z);
  }
  throw SearchBudgetExceeded("no primitive M-th root of unity");
}

}  // namespace newform
