#include <algorithm>
#include <climits>
#include <sstream>

#include "newform/errors.hpp"
#include "newform/local.hpp"

namespace newform {

namespace {

using u128 = unsigned __int128;

// largest L with p^L < 2^62, so products of two residues fit in 128 bits
int max_mixed_digits(std::uint32_t p) {
  int L = 0;
  u128 v = 1;
  while (v * p < (u128(1) << 62)) {
    v *= p;
    ++L;
  }
  return L;
}

u128 pow_u128(std::uint32_t p, int e) {
  u128 r = 1;
  while (e-- > 0) r *= p;
  return r;
}

}  // namespace

LocalRing::LocalRing(Field F, Mode mode, int B, int N, int psi_level)
    : F_(std::move(F)), mode_(mode), B_(B), N_(N), psi_level_(psi_level) {
  if (B < 0 || N <= B) throw InvalidArgument("window needs N > B >= 0");
  if (mode == Mode::Mixed) {
    if (F_.k() != 1) throw InvalidArgument("mixed characteristic needs a prime residue field");
    if (N + B > max_mixed_digits(F_.p()))
      throw WindowOverflow("mixed-mode window exceeds machine precision for p = " + std::to_string(F_.p()));
  }
  if (psi_level != 0 && psi_level != 1) throw InvalidArgument("psi level must be 0 or 1");
}

LocalRing LocalRing::default_window(Field F, unsigned n, int m, Mode mode) {
  const int B = static_cast<int>(n - 1) * (m + 1);
  const int N = 2 * static_cast<int>(n) * (m + 1) + B;
  return LocalRing(std::move(F), mode, B, N);
}

std::string LocalRing::describe() const {
  std::ostringstream s;
  s << (mode_ == Mode::Equal ? "equal" : "mixed") << ";" << F_.descriptor() << ";B=" << B_ << ";N=" << N_
    << ";psi_level=" << psi_level_;
  return s.str();
}

Scalar Scalar::monomial(const LocalRing& R, fq_t c, int e) {
  Scalar s(R);
  if (c == 0) return s;
  s.lo_ = e;
  s.coef_ = {c};
  if (R.mode() == LocalRing::Mode::Mixed) {
    s.prec_ = R.N();
    if (c >= R.p()) return from_digits(R, e, {c});
  }
  s.normalize();
  return s;
}

Scalar Scalar::from_digits(const LocalRing& R, int lo, const std::vector<fq_t>& d) {
  Scalar s(R);
  s.lo_ = lo;
  s.coef_ = d;
  if (R.mode() == LocalRing::Mode::Mixed) {
    // digits may exceed p - 1 here; carry them through integer form
    s.prec_ = R.N();
    u128 X = 0, pw = 1;
    const int L = R.N() - lo;
    if (L <= 0) {
      s.coef_.clear();
      s.normalize();
      return s;
    }
    const u128 mod = pow_u128(R.p(), L);
    for (std::size_t i = 0; i < d.size() && static_cast<int>(i) < L; ++i) {
      X = (X + u128(d[i]) * pw) % mod;
      pw *= R.p();
    }
    s.coef_.clear();
    for (int i = 0; i < L && X; ++i) {
      s.coef_.push_back(static_cast<fq_t>(X % R.p()));
      X /= R.p();
    }
  }
  s.normalize();
  return s;
}

Scalar Scalar::from_int(const LocalRing& R, std::int64_t v) {
  if (R.mode() == LocalRing::Mode::Equal) return monomial(R, R.residue().from_int(v), 0);
  Scalar s(R);
  s.prec_ = R.N();
  const int L = R.N();
  const u128 mod = pow_u128(R.p(), L);
  std::int64_t r = v % static_cast<std::int64_t>(mod > u128(INT64_MAX) ? INT64_MAX : static_cast<std::int64_t>(mod));
  u128 X = r >= 0 ? u128(r) : mod - u128(-r);
  for (int i = 0; i < L && X; ++i) {
    s.coef_.push_back(static_cast<fq_t>(X % R.p()));
    X /= R.p();
  }
  s.normalize();
  return s;
}

void Scalar::normalize() {
  const int N = R_->N();
  if (!is_exact() && prec_ > N) prec_ = N;
  // leading zeros
  std::size_t z = 0;
  while (z < coef_.size() && coef_[z] == 0) ++z;
  if (z == coef_.size()) {
    coef_.clear();
    lo_ = 0;
    return;
  }
  if (is_exact() && R_->mode() == LocalRing::Mode::Mixed) prec_ = N;
  if (z) {
    coef_.erase(coef_.begin(), coef_.begin() + static_cast<std::ptrdiff_t>(z));
    lo_ += static_cast<int>(z);
  }
  // digits at or above precision, or above the window for exact values
  int cap = prec_;
  if (is_exact() && lo_ + static_cast<int>(coef_.size()) > N) {
    prec_ = N;
    cap = N;
  }
  if (lo_ + static_cast<int>(coef_.size()) > cap) coef_.resize(std::max(0, cap - lo_));
  while (!coef_.empty() && coef_.back() == 0) coef_.pop_back();
  if (coef_.empty()) {
    lo_ = 0;
    return;
  }
  if (lo_ < -R_->B()) throw WindowOverflow("pole of order " + std::to_string(-lo_) + " exceeds window B = " +
                                           std::to_string(R_->B()));
}

int Scalar::val() const {
  if (!coef_.empty()) return lo_;
  if (is_exact()) return kExact;
  throw WindowOverflow("valuation undetermined: value is zero modulo pi^" + std::to_string(prec_));
}

bool Scalar::val_at_least(int b) const {
  if (!coef_.empty()) return lo_ >= b;
  if (is_exact() || prec_ >= b) return true;
  throw WindowOverflow("cannot decide val >= " + std::to_string(b) + " at precision " + std::to_string(prec_));
}

fq_t Scalar::digit(int d) const {
  if (d >= prec_) throw WindowOverflow("digit " + std::to_string(d) + " beyond precision " + std::to_string(prec_));
  if (coef_.empty() || d < lo_ || d >= lo_ + static_cast<int>(coef_.size())) return 0;
  return coef_[d - lo_];
}

fq_t Scalar::residue() const {
  if (!val_at_least(0)) throw NotIntegral("residue of a non-integral element");
  return digit(0);
}

Scalar Scalar::shift(int k) const {
  Scalar s = *this;
  if (!coef_.empty()) s.lo_ += k;
  if (!is_exact()) s.prec_ += k;
  s.normalize();
  return s;
}

Scalar Scalar::truncate(int prec) const {
  Scalar s = *this;
  s.prec_ = std::min(prec_, prec);
  s.normalize();
  return s;
}

Scalar Scalar::operator-() const {
  Scalar s = *this;
  if (coef_.empty()) return s;
  if (R_->mode() == LocalRing::Mode::Equal) {
    const Field& F = R_->residue();
    for (auto& c : s.coef_) c = F.neg(c);
    return s;
  }
  // p-adic negation: complement digits with borrow
  const std::uint32_t p = R_->p();
  const int L = prec_ - lo_;
  std::vector<fq_t> out(static_cast<std::size_t>(std::max(L, 0)), 0);
  bool started = false;
  for (int i = 0; i < L; ++i) {
    std::int64_t d = i < static_cast<int>(coef_.size()) ? coef_[i] : 0;
    std::int64_t v;
    if (!started) {
      if (d == 0) {
        v = 0;
      } else {
        v = p - d;
        started = true;
      }
    } else {
      v = (p - 1) - d;
    }
    out[i] = static_cast<fq_t>(v);
  }
  s.coef_ = std::move(out);
  s.normalize();
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  if (coef_.empty() && is_exact()) return o;
  if (o.coef_.empty() && o.is_exact()) return *this;
  Scalar s(*R_);
  s.prec_ = std::min(prec_, o.prec_);
  if (R_->mode() == LocalRing::Mode::Equal) {
    const Field& F = R_->residue();
    const int start = std::min(coef_.empty() ? INT_MAX : lo_, o.coef_.empty() ? INT_MAX : o.lo_);
    if (start == INT_MAX) {
      s.normalize();
      return s;
    }
    const int end_a = coef_.empty() ? start : lo_ + static_cast<int>(coef_.size());
    const int end_b = o.coef_.empty() ? start : o.lo_ + static_cast<int>(o.coef_.size());
    int end = std::max(end_a, end_b);
    if (!s.is_exact()) end = std::min(end, s.prec_);
    if (end <= start) {
      s.normalize();
      return s;
    }
    s.lo_ = start;
    s.coef_.assign(static_cast<std::size_t>(end - start), 0);
    for (std::size_t i = 0; i < coef_.size(); ++i) {
      int d = lo_ + static_cast<int>(i);
      if (d < end) s.coef_[d - start] = coef_[i];
    }
    for (std::size_t i = 0; i < o.coef_.size(); ++i) {
      int d = o.lo_ + static_cast<int>(i);
      if (d < end) s.coef_[d - start] = F.add(s.coef_[d - start], o.coef_[i]);
    }
    s.normalize();
    return s;
  }
  // mixed: integer addition at the common base
  const std::uint32_t p = R_->p();
  const int start = std::min(coef_.empty() ? prec_ : lo_, o.coef_.empty() ? o.prec_ : o.lo_);
  const int L = s.prec_ - start;
  if (L <= 0) {
    s.normalize();
    return s;
  }
  const u128 mod = pow_u128(p, L);
  auto to_int = [&](const Scalar& x) {
    u128 X = 0;
    u128 pw = pow_u128(p, x.lo_ - start);
    for (std::size_t i = 0; i < x.coef_.size(); ++i) {
      if (x.lo_ + static_cast<int>(i) - start >= L) break;
      X = (X + u128(x.coef_[i]) * pw) % mod;
      pw *= p;
    }
    return X;
  };
  u128 X = (to_int(*this) + to_int(o)) % mod;
  s.lo_ = start;
  for (int i = 0; i < L; ++i) {
    s.coef_.push_back(static_cast<fq_t>(X % p));
    X /= p;
  }
  s.normalize();
  return s;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
  const bool za = coef_.empty(), zb = o.coef_.empty();
  if ((za && is_exact()) || (zb && o.is_exact())) return Scalar(*R_);
  const int va = za ? prec_ : lo_, vb = zb ? o.prec_ : o.lo_;
  Scalar s(*R_);
  {
    long long pa = is_exact() ? LLONG_MAX / 4 : static_cast<long long>(prec_) + vb;
    long long pb = o.is_exact() ? LLONG_MAX / 4 : static_cast<long long>(o.prec_) + va;
    long long pr = std::min(pa, pb);
    s.prec_ = pr >= kExact ? kExact : static_cast<int>(pr);
  }
  if (za || zb) {
    s.normalize();
    return s;
  }
  const int base = lo_ + o.lo_;
  int len = static_cast<int>(coef_.size() + o.coef_.size()) - 1;
  int limit = s.is_exact() ? R_->N() + 1 - base : s.prec_ - base;  // exact results are capped by normalize
  if (limit <= 0) {
    s.coef_.clear();
    s.normalize();
    return s;
  }
  if (R_->mode() == LocalRing::Mode::Equal) {
    const Field& F = R_->residue();
    len = std::min(len, limit);
    s.lo_ = base;
    s.coef_.assign(static_cast<std::size_t>(len), 0);
    for (std::size_t i = 0; i < coef_.size() && static_cast<int>(i) < len; ++i) {
      const fq_t a = coef_[i];
      if (!a) continue;
      for (std::size_t j = 0; j < o.coef_.size() && static_cast<int>(i + j) < len; ++j)
        s.coef_[i + j] = F.add(s.coef_[i + j], F.mul(a, o.coef_[j]));
    }
    if (s.is_exact() && base + len > R_->N()) s.prec_ = R_->N();
    s.normalize();
    return s;
  }
  const std::uint32_t p = R_->p();
  const int L = std::min(limit, R_->N() + R_->B());
  s.prec_ = std::min(s.prec_, base + L);
  const u128 mod = pow_u128(p, L);
  auto to_int = [&](const Scalar& x) {
    u128 X = 0, pw = 1;
    for (std::size_t i = 0; i < x.coef_.size() && static_cast<int>(i) < L; ++i) {
      X += u128(x.coef_[i]) * pw;
      pw *= p;
    }
    return X % mod;
  };
  u128 X = (to_int(*this) * to_int(o)) % mod;
  s.lo_ = base;
  for (int i = 0; i < L; ++i) {
    s.coef_.push_back(static_cast<fq_t>(X % p));
    X /= p;
  }
  s.normalize();
  return s;
}

Scalar Scalar::inv() const {
  if (coef_.empty()) {
    if (is_exact()) throw SingularMatrix("inverse of zero");
    throw WindowOverflow("inverse of an element that is zero to known precision");
  }
  const int v = lo_;
  const int N = R_->N();
  Scalar s(*R_);
  s.lo_ = -v;
  if (is_exact() && coef_.size() == 1 && R_->mode() == LocalRing::Mode::Equal) {
    s.coef_ = {R_->residue().inv(coef_[0])};
    s.normalize();
    return s;
  }
  const long long rel = is_exact() ? LLONG_MAX / 4 : static_cast<long long>(prec_) - v;
  const int target = static_cast<int>(std::min<long long>(rel, static_cast<long long>(N) + v));
  if (target <= 0) throw WindowOverflow("inverse has no valid digits inside the window");
  s.prec_ = -v + target;
  if (R_->mode() == LocalRing::Mode::Equal) {
    const Field& F = R_->residue();
    const fq_t c0inv = F.inv(coef_[0]);
    s.coef_.assign(static_cast<std::size_t>(target), 0);
    s.coef_[0] = c0inv;
    for (int k = 1; k < target; ++k) {
      fq_t acc = 0;
      for (int i = 1; i <= k && i < static_cast<int>(coef_.size()); ++i) acc = F.add(acc, F.mul(coef_[i], s.coef_[k - i]));
      s.coef_[k] = F.neg(F.mul(c0inv, acc));
    }
    s.normalize();
    return s;
  }
  const std::uint32_t p = R_->p();
  const u128 mod = pow_u128(p, target);
  u128 U = 0, pw = 1;
  for (std::size_t i = 0; i < coef_.size() && static_cast<int>(i) < target; ++i) {
    U += u128(coef_[i]) * pw;
    pw *= p;
  }
  U %= mod;
  // Newton: x <- x (2 - U x)
  u128 x = 1;
  {
    std::uint64_t c0 = coef_[0], r = 1, e = p - 2, b = c0;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    x = r;
  }
  for (int prec = 1; prec < target; prec *= 2) {
    u128 ux = (U * x) % mod;
    u128 two_minus = (2 + mod - ux) % mod;
    x = (x * two_minus) % mod;
  }
  for (int i = 0; i < target; ++i) {
    s.coef_.push_back(static_cast<fq_t>(x % p));
    x /= p;
  }
  s.normalize();
  return s;
}

bool Scalar::same(const Scalar& o) const {
  const Scalar d = *this - o;
  return d.coef_.empty();
}

std::string Scalar::str() const {
  std::ostringstream s;
  if (coef_.empty()) {
    s << "0";
  } else {
    bool first = true;
    for (std::size_t i = 0; i < coef_.size(); ++i) {
      if (!coef_[i]) continue;
      s << (first ? "" : "+") << coef_[i] << "t^" << lo_ + static_cast<int>(i);
      first = false;
    }
  }
  if (!is_exact()) s << "+O(t^" << prec_ << ")";
  return s.str();
}

}  // namespace newform
