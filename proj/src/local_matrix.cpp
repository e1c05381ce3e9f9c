#include <algorithm>
#include <climits>
#include <sstream>

#include "newform/errors.hpp"
#include "newform/local.hpp"

namespace newform {

WindowMatrix::WindowMatrix(const LocalRing& R, unsigned n) : R_(&R), n_(n), a_(n * n, Scalar(R)) {}

WindowMatrix WindowMatrix::identity(const LocalRing& R, unsigned n) {
  WindowMatrix m(R, n);
  for (unsigned i = 0; i < n; ++i) m.at(i, i) = Scalar::one(R);
  return m;
}

WindowMatrix WindowMatrix::diag_powers(const LocalRing& R, const std::vector<int>& e) {
  const auto n = static_cast<unsigned>(e.size());
  WindowMatrix m(R, n);
  for (unsigned i = 0; i < n; ++i) m.at(i, i) = Scalar::monomial(R, 1, e[i]);
  return m;
}

WindowMatrix WindowMatrix::lift(const LocalRing& R, const FqMatrix& x) {
  WindowMatrix m(R, x.n);
  for (unsigned i = 0; i < x.n; ++i)
    for (unsigned j = 0; j < x.n; ++j) m.at(i, j) = Scalar::monomial(R, x.at(i, j), 0);
  return m;
}

WindowMatrix WindowMatrix::operator*(const WindowMatrix& o) const {
  WindowMatrix r(*R_, n_);
  for (unsigned i = 0; i < n_; ++i)
    for (unsigned j = 0; j < n_; ++j) {
      Scalar acc(*R_);
      for (unsigned k = 0; k < n_; ++k) {
        const Scalar& x = at(i, k);
        const Scalar& y = o.at(k, j);
        if ((x.known_zero() && x.is_exact()) || (y.known_zero() && y.is_exact())) continue;
        acc = acc + x * y;
      }
      r.at(i, j) = acc;
    }
  return r;
}

WindowMatrix WindowMatrix::operator+(const WindowMatrix& o) const {
  WindowMatrix r(*R_, n_);
  for (unsigned i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

WindowMatrix WindowMatrix::operator-(const WindowMatrix& o) const {
  WindowMatrix r(*R_, n_);
  for (unsigned i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

WindowMatrix WindowMatrix::scaled(const Scalar& s) const {
  WindowMatrix r(*R_, n_);
  for (unsigned i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i] * s;
  return r;
}

WindowMatrix WindowMatrix::shift(int k) const {
  WindowMatrix r(*R_, n_);
  for (unsigned i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i].shift(k);
  return r;
}

namespace {

// row with a known nonzero entry of least valuation in column c, rows >= c
unsigned choose_pivot(const std::vector<Scalar>& a, unsigned n, unsigned cols, unsigned c) {
  unsigned best = n;
  int best_val = INT_MAX;
  bool unknown = false;
  for (unsigned r = c; r < n; ++r) {
    const Scalar& x = a[r * cols + c];
    if (x.known_zero()) {
      if (!x.is_exact()) unknown = true;
      continue;
    }
    if (x.lo() < best_val) {
      best_val = x.lo();
      best = r;
    }
  }
  if (best == n) {
    if (unknown) throw WindowOverflow("pivot undetermined at the working precision");
    throw SingularMatrix("matrix over the local field is singular");
  }
  return best;
}

}  // namespace

WindowMatrix WindowMatrix::inverse() const {
  const unsigned n = n_, cols = 2 * n_;
  std::vector<Scalar> a(n * cols, Scalar(*R_));
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) a[i * cols + j] = at(i, j);
    a[i * cols + n + i] = Scalar::one(*R_);
  }
  for (unsigned c = 0; c < n; ++c) {
    const unsigned piv = choose_pivot(a, n, cols, c);
    if (piv != c)
      for (unsigned j = 0; j < cols; ++j) std::swap(a[piv * cols + j], a[c * cols + j]);
    const Scalar pinv = a[c * cols + c].inv();
    for (unsigned j = 0; j < cols; ++j) a[c * cols + j] = a[c * cols + j] * pinv;
    for (unsigned r = 0; r < n; ++r) {
      if (r == c) continue;
      const Scalar f = a[r * cols + c];
      if (f.known_zero() && f.is_exact()) continue;
      for (unsigned j = 0; j < cols; ++j) a[r * cols + j] = a[r * cols + j] - f * a[c * cols + j];
    }
  }
  WindowMatrix out(*R_, n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) out.at(i, j) = a[i * cols + n + j];
  return out;
}

Scalar WindowMatrix::det() const {
  const unsigned n = n_;
  std::vector<Scalar> a = a_;
  Scalar d = Scalar::one(*R_);
  for (unsigned c = 0; c < n; ++c) {
    unsigned piv;
    try {
      piv = choose_pivot(a, n, n, c);
    } catch (const SingularMatrix&) {
      return Scalar(*R_);
    }
    if (piv != c) {
      for (unsigned j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
      d = -d;
    }
    d = d * a[c * n + c];
    const Scalar pinv = a[c * n + c].inv();
    for (unsigned r = c + 1; r < n; ++r) {
      const Scalar f = a[r * n + c] * pinv;
      if (f.known_zero() && f.is_exact()) continue;
      for (unsigned j = c; j < n; ++j) a[r * n + j] = a[r * n + j] - f * a[c * n + j];
    }
  }
  return d;
}

int WindowMatrix::det_val() const {
  const unsigned n = n_;
  std::vector<Scalar> a = a_;
  int v = 0;
  for (unsigned c = 0; c < n; ++c) {
    const unsigned piv = choose_pivot(a, n, n, c);
    if (piv != c)
      for (unsigned j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
    v += a[c * n + c].lo();
    const Scalar pinv = a[c * n + c].inv();
    for (unsigned r = c + 1; r < n; ++r) {
      const Scalar f = a[r * n + c] * pinv;
      if (f.known_zero() && f.is_exact()) continue;
      for (unsigned j = c; j < n; ++j) a[r * n + j] = a[r * n + j] - f * a[c * n + j];
    }
  }
  return v;
}

int WindowMatrix::min_val() const {
  int v = Scalar::kExact;
  for (const auto& x : a_)
    if (!x.known_zero()) v = std::min(v, x.lo());
  for (const auto& x : a_)
    if (x.known_zero() && !x.is_exact() && x.prec() < v)
      throw WindowOverflow("minimum valuation undetermined at the working precision");
  return v;
}

bool WindowMatrix::is_integral() const {
  for (const auto& x : a_)
    if (!x.val_at_least(0)) return false;
  return true;
}

bool WindowMatrix::in_K() const { return is_integral() && mat_det(R_->residue(), reduce()) != 0; }

FqMatrix WindowMatrix::reduce() const {
  FqMatrix m(n_);
  for (unsigned i = 0; i < n_ * n_; ++i) m.a[i] = a_[i].residue();
  return m;
}

bool WindowMatrix::is_monomial() const {
  for (unsigned i = 0; i < n_; ++i) {
    unsigned row = 0, col = 0;
    for (unsigned j = 0; j < n_; ++j) {
      if (!at(i, j).known_zero()) ++row;
      if (!at(j, i).known_zero()) ++col;
    }
    if (row != 1 || col != 1) return false;
  }
  return true;
}

std::string WindowMatrix::str() const {
  std::ostringstream s;
  s << "[";
  for (unsigned i = 0; i < n_; ++i) {
    s << (i ? "; " : "");
    for (unsigned j = 0; j < n_; ++j) s << (j ? ", " : "") << at(i, j).str();
  }
  s << "]";
  return s.str();
}

ResidueRing::ResidueRing(const Field& F, LocalRing::Mode mode, int m) : F_(F), mode_(mode), m_(m), size_(1) {
  if (mode == LocalRing::Mode::Mixed && F.k() != 1) throw InvalidArgument("mixed mode needs a prime field");
  for (int i = 0; i < m; ++i) {
    if (size_ > (1ull << 40)) throw EnumerationBoundExceeded("residue ring too large");
    size_ *= F.q();
  }
  if (size_ <= 1024) {
    std::vector<std::uint32_t> at(size_ * size_), mt(size_ * size_);
    for (std::uint64_t a = 0; a < size_; ++a)
      for (std::uint64_t b = 0; b < size_; ++b) {
        at[a * size_ + b] = static_cast<std::uint32_t>(add(a, b));
        mt[a * size_ + b] = static_cast<std::uint32_t>(mul(a, b));
      }
    add_t_ = std::move(at);
    mul_t_ = std::move(mt);
  }
}

std::vector<fq_t> ResidueRing::digits(std::uint64_t a) const {
  std::vector<fq_t> d(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) {
    d[i] = static_cast<fq_t>(a % F_.q());
    a /= F_.q();
  }
  return d;
}

std::uint64_t ResidueRing::from_digits(const std::vector<fq_t>& d) const {
  std::uint64_t a = 0;
  for (int i = std::min<int>(m_, static_cast<int>(d.size())); i-- > 0;) a = a * F_.q() + d[i];
  return a;
}

std::uint64_t ResidueRing::add(std::uint64_t a, std::uint64_t b) const {
  if (!add_t_.empty()) return add_t_[a * size_ + b];
  if (mode_ == LocalRing::Mode::Mixed) return (a + b) % size_;
  std::uint64_t r = 0, pw = 1;
  for (int i = 0; i < m_; ++i) {
    r += F_.add(static_cast<fq_t>(a % F_.q()), static_cast<fq_t>(b % F_.q())) * pw;
    a /= F_.q();
    b /= F_.q();
    pw *= F_.q();
  }
  return r;
}

std::uint64_t ResidueRing::neg(std::uint64_t a) const {
  if (mode_ == LocalRing::Mode::Mixed) return (size_ - a % size_) % size_;
  std::uint64_t r = 0, pw = 1;
  for (int i = 0; i < m_; ++i) {
    r += F_.neg(static_cast<fq_t>(a % F_.q())) * pw;
    a /= F_.q();
    pw *= F_.q();
  }
  return r;
}

std::uint64_t ResidueRing::mul(std::uint64_t a, std::uint64_t b) const {
  if (!mul_t_.empty()) return mul_t_[a * size_ + b];
  if (mode_ == LocalRing::Mode::Mixed) return static_cast<std::uint64_t>((unsigned __int128)a * b % size_);
  auto x = digits(a), y = digits(b);
  std::vector<fq_t> z(static_cast<std::size_t>(m_), 0);
  for (int i = 0; i < m_; ++i) {
    if (!x[i]) continue;
    for (int j = 0; i + j < m_; ++j) z[i + j] = F_.add(z[i + j], F_.mul(x[i], y[j]));
  }
  return from_digits(z);
}

std::uint64_t ResidueRing::inv(std::uint64_t a) const {
  if (!is_unit(a)) throw SingularMatrix("inverse of a non-unit residue");
  if (mode_ == LocalRing::Mode::Mixed) {
    // extended Euclid
    __int128 t = 0, nt = 1, r = static_cast<__int128>(size_), nr = static_cast<__int128>(a);
    while (nr) {
      __int128 qq = r / nr;
      __int128 tmp = t - qq * nt;
      t = nt;
      nt = tmp;
      tmp = r - qq * nr;
      r = nr;
      nr = tmp;
    }
    if (t < 0) t += static_cast<__int128>(size_);
    return static_cast<std::uint64_t>(t);
  }
  auto c = digits(a);
  std::vector<fq_t> b(static_cast<std::size_t>(m_), 0);
  const fq_t c0inv = F_.inv(c[0]);
  b[0] = c0inv;
  for (int k = 1; k < m_; ++k) {
    fq_t acc = 0;
    for (int i = 1; i <= k; ++i) acc = F_.add(acc, F_.mul(c[i], b[k - i]));
    b[k] = F_.neg(F_.mul(c0inv, acc));
  }
  return from_digits(b);
}

int ResidueRing::val(std::uint64_t a) const {
  for (int i = 0; i < m_; ++i) {
    if (a % F_.q()) return i;
    a /= F_.q();
  }
  return m_;
}

}  // namespace newform
