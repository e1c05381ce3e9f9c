#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace newform {

// Elements of F_q are encoded as integers 0..q-1; the base-p digits are the
// coefficients in the power basis of the defining polynomial.
using fq_t = std::uint32_t;

bool is_prime(std::uint64_t n);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);  // distinct, ascending
std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b);
std::uint64_t ipow(std::uint64_t b, unsigned e);

class Field {
 public:
  static constexpr std::uint64_t kDefaultBound = 1u << 20;

  // poly: coefficients low to high, monic of degree k; empty -> default search.
  static Field make(std::uint32_t p, unsigned k, std::vector<std::uint32_t> poly = {},
                    std::uint64_t q_bound = kDefaultBound);

  std::uint32_t p() const { return p_; }
  unsigned k() const { return k_; }
  std::uint32_t q() const { return q_; }
  const std::vector<std::uint32_t>& poly() const { return poly_; }
  std::string descriptor() const;  // stable text, used in cache keys

  fq_t add(fq_t a, fq_t b) const;
  fq_t sub(fq_t a, fq_t b) const;
  fq_t neg(fq_t a) const;
  fq_t mul(fq_t a, fq_t b) const {
    if (a == 0 || b == 0) return 0;
    std::uint32_t s = log_[a] + log_[b];
    if (s >= q_ - 1) s -= q_ - 1;
    return exp_[s];
  }
  fq_t inv(fq_t a) const;
  fq_t div(fq_t a, fq_t b) const { return mul(a, inv(b)); }
  fq_t pow(fq_t a, std::uint64_t e) const;
  fq_t from_int(std::int64_t v) const;  // image of the prime subfield
  fq_t frobenius(fq_t a) const { return pow(a, p_); }
  std::uint32_t trace(fq_t a) const;  // F_q -> F_p
  fq_t primitive() const { return exp_[1 % (q_ - 1 ? q_ - 1 : 1)]; }
  std::uint32_t log(fq_t a) const { return log_[a]; }  // a != 0
  fq_t exp(std::uint64_t e) const { return exp_[e % (q_ - 1)]; }

  std::vector<std::uint32_t> coefficients(fq_t a) const;
  fq_t from_coefficients(const std::vector<std::uint32_t>& c) const;

 private:
  fq_t slow_mul(fq_t a, fq_t b) const;
  std::uint32_t p_ = 2, q_ = 2;
  unsigned k_ = 1;
  std::vector<std::uint32_t> poly_;
  std::vector<std::uint32_t> exp_, log_;
  std::vector<std::uint8_t> add_;  // q*q table when q is small
};

// The prime field F_l standing in for the characteristic-zero coefficients.
class ModField {
 public:
  ModField() = default;
  ModField(std::uint64_t ell, std::uint64_t order, std::uint64_t zeta)
      : ell_(ell), order_(order), zeta_(zeta) {}

  std::uint64_t ell() const { return ell_; }
  std::uint64_t order() const { return order_; }  // M
  std::uint64_t zeta() const { return zeta_; }    // primitive M-th root

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= ell_ ? s - ell_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + ell_ - b; }
  std::uint64_t neg(std::uint64_t a) const { return a ? ell_ - a : 0; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>((unsigned __int128)a * b % ell_);
  }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t inv(std::uint64_t a) const;  // throws SingularMatrix on 0
  std::uint64_t from_int(std::int64_t v) const;
  // integer in (-l/2, l/2]
  std::int64_t lift_signed(std::uint64_t a) const {
    return a > ell_ / 2 ? static_cast<std::int64_t>(a) - static_cast<std::int64_t>(ell_)
                        : static_cast<std::int64_t>(a);
  }
  // primitive d-th root of unity, d | M
  std::uint64_t root_of_unity(std::uint64_t d) const;

 private:
  std::uint64_t ell_ = 2, order_ = 1, zeta_ = 1;
};

std::uint64_t gl_order(unsigned n, std::uint64_t q);  // throws on overflow
std::uint64_t gl_exponent(unsigned n, std::uint32_t p, std::uint64_t q);
ModField make_computation_field(unsigned n, const Field& F, std::uint64_t search_bound = 1ull << 40);

}  // namespace newform
